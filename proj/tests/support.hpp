#pragma once

#include "readlab/dataset.hpp"
#include "readlab/random.hpp"
#include "readlab/runner.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace readlab::testing {

inline std::filesystem::path data_dir() { return READLAB_DATA_DIR; }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag)
    {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("readlab-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& contents)
{
    std::filesystem::create_directories(path.parent_path());
    std::ofstream(path, std::ios::binary) << contents;
}

inline std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline Dataset make_dataset(Eigen::MatrixXd X, std::vector<int> y, int num_classes = 0)
{
    Dataset d;
    d.X = std::move(X);
    d.y = std::move(y);
    if (num_classes == 0)
        for (const int c : d.y) num_classes = std::max(num_classes, c + 1);
    for (int c = 0; c < num_classes; ++c) d.class_names.push_back("c" + std::to_string(c));
    for (Eigen::Index j = 0; j < d.X.cols(); ++j) d.column_names.push_back("x" + std::to_string(j));
    d.block_boundary = d.X.cols();
    return d;
}

/// Standard normal draw via Box-Muller on the shared generator.
inline double gaussian(SplitMix64& rng)
{
    double u1 = rng.uniform();
    while (u1 <= 0.0) u1 = rng.uniform();
    const double u2 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

/// Two Gaussian blobs at -3 and +3 along every axis: n/2 documents each.
inline Dataset separable_fixture(int n, int d, std::uint64_t seed)
{
    SplitMix64 rng(seed);
    Eigen::MatrixXd X(n, d);
    std::vector<int> y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int label = i % 2;
        y[static_cast<std::size_t>(i)] = label;
        for (int j = 0; j < d; ++j) X(i, j) = (label == 0 ? -3.0 : 3.0) + 0.5 * gaussian(rng);
    }
    return make_dataset(std::move(X), std::move(y), 2);
}

/// Three balanced classes whose features carry signal, then labels shuffled
/// with `seed` so the features no longer predict them.
inline Dataset permutation_null_fixture(int per_class, int d, std::uint64_t seed)
{
    SplitMix64 rng(1000 + seed);
    const int n = 3 * per_class;
    Eigen::MatrixXd X(n, d);
    std::vector<int> y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int label = i % 3;
        y[static_cast<std::size_t>(i)] = label;
        for (int j = 0; j < d; ++j) X(i, j) = 2.0 * label + gaussian(rng);
    }
    SplitMix64 shuffler(seed);
    shuffler.shuffle(std::span<int>(y));
    return make_dataset(std::move(X), std::move(y), 3);
}

/// The bundled English toy corpus with its synthetic embeddings, z-scored.
inline Dataset toy_dataset(FeatureMode mode = FeatureMode::combined)
{
    DatasetConfig config;
    config.name = "toy";
    config.corpus = data_dir() / "toy/manifest.csv";
    config.embeddings = data_dir() / "toy/embeddings.jsonl";
    config.lexicon = data_dir() / "lexicons/english.tsv";
    const auto prepared = prepare_dataset(config);
    auto data = build_dataset(prepared, default_registry(LanguageProfile::english), mode);
    data.X = fit_scaler(data.X).transform(data.X);
    return data;
}

} // namespace readlab::testing
