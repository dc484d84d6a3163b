#pragma once

#include "readlab/corpus.hpp"
#include "readlab/dataset.hpp"
#include "readlab/embeddings.hpp"
#include "readlab/eval.hpp"
#include "readlab/lingfeats.hpp"
#include "readlab/models.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace readlab {

// --------------------------------------------------------------------------
// Configuration

struct DatasetConfig {
    std::string name;
    std::filesystem::path corpus;     ///< manifest
    std::filesystem::path embeddings; ///< JSONL
    std::optional<std::filesystem::path> lexicon;
    LanguageProfile profile = LanguageProfile::english;
};

/// How score samples are formed for the substitution tests: every fold score
/// of every cell, or one mean F1 per (dataset, algorithm) cell.
enum class ScorePairing { per_fold, per_cell };

ScorePairing parse_pairing(std::string_view name);
std::string_view to_string(ScorePairing pairing);

struct ExperimentConfig {
    std::vector<DatasetConfig> datasets;
    std::vector<Algorithm> algorithms = {Algorithm::logreg, Algorithm::svm, Algorithm::rf};
    std::vector<FeatureMode> modes = {FeatureMode::ling_only, FeatureMode::emb_only, FeatureMode::combined};
    int k = 5;
    std::uint64_t seed = 42;
    std::vector<int> pca_percentages = {25, 50, 75, 95, 100};
    std::set<FeatureGroup> removed_groups = {FeatureGroup::syn, FeatureGroup::sem};
    std::filesystem::path output = "results";
    ScorePairing pairing = ScorePairing::per_fold;
    /// Overrides of ModelSpec::defaults, per algorithm.
    std::map<Algorithm, std::map<std::string, double>> hyperparameters;

    ModelSpec model_spec(Algorithm algorithm) const;

    /// Throws ConfigError on invalid values or missing input files.
    void validate() const;
};

/// Relative paths are resolved against `base_dir`. Throws ConfigError.
ExperimentConfig parse_config(std::string_view toml_text, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Fully resolved config as TOML (every default spelled out, absolute paths,
/// output directory omitted). parse_config(to_toml(c)) == c.
std::string to_toml(const ExperimentConfig& config);
nlohmann::json to_json(const ExperimentConfig& config);

// --------------------------------------------------------------------------
// Data preparation

struct PreparedDataset {
    std::string name;
    LanguageProfile profile = LanguageProfile::english;
    LabeledCorpus corpus;
    std::vector<SegmentedDocument> segmented;
    std::vector<AnnotationSet> annotations;
    Eigen::MatrixXd embeddings; ///< documents x dim, manifest order
    std::string embedding_model;
    std::vector<std::string> warnings;
};

/// Loads the corpus, segments and tags every document, and aligns the
/// embeddings. Errors carry the dataset name.
PreparedDataset prepare_dataset(const DatasetConfig& config);

FeatureBlock linguistic_block(const PreparedDataset& data, const FeatureRegistry& registry);

Dataset build_dataset(const PreparedDataset& data, const FeatureRegistry& registry, FeatureMode mode);

// --------------------------------------------------------------------------
// Experiments

/// Named report files (file name -> contents), written by write_report.
struct ExperimentOutput {
    std::string experiment;
    nlohmann::json report;
    std::map<std::string, std::string> files;
    std::vector<std::string> warnings;
};

ExperimentOutput run_ablation(const ExperimentConfig& config);
ExperimentOutput run_substitution(const ExperimentConfig& config);
ExperimentOutput run_pca_sweep(const ExperimentConfig& config);

/// Creates `dir` and writes every file of `output` into it.
void write_report(const ExperimentOutput& output, const std::filesystem::path& dir);

/// Worker count: READABILITY_LAB_THREADS when set to a positive integer,
/// else the hardware concurrency, never above `jobs`.
unsigned worker_count(std::size_t jobs);

/// Runs job(i) for i in [0, n) on a bounded pool. The first failing job by
/// index is rethrown after every worker has finished.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& job);

} // namespace readlab
