#include "readlab/error.hpp"
#include "readlab/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kDataError = 2, kInternalError = 3 };

struct ExperimentArgs {
    std::string config;
    std::string out;
    std::optional<std::int64_t> seed;
};

void add_experiment(CLI::App& app, const std::string& name, const std::string& description, ExperimentArgs& args)
{
    auto* sub = app.add_subcommand(name, description);
    sub->add_option("--config", args.config, "Experiment config (TOML)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", args.out, "Output directory (overrides the config)");
    sub->add_option("--seed", args.seed, "Seed (overrides the config)")->check(CLI::NonNegativeNumber);
}

int run_experiment(const std::string& name, const ExperimentArgs& args)
{
    auto config = readlab::load_config(args.config);
    if (args.seed) config.seed = static_cast<std::uint64_t>(*args.seed);
    if (!args.out.empty()) config.output = std::filesystem::absolute(args.out);

    readlab::ExperimentOutput output;
    if (name == "ablation") output = readlab::run_ablation(config);
    else if (name == "substitution") output = readlab::run_substitution(config);
    else output = readlab::run_pca_sweep(config);

    readlab::write_report(output, config.output);
    for (const auto& w : output.warnings) std::cerr << "warning: " << w << '\n';
    for (const auto& [file, contents] : output.files) std::cout << (config.output / file).string() << '\n';
    return kOk;
}

int run_stats(const std::string& manifest, const std::string& profile_name)
{
    const auto profile = readlab::parse_profile(profile_name);
    const auto corpus = readlab::load_manifest(manifest, profile);
    const auto stats = readlab::corpus_stats(corpus, profile);
    std::cout << "documents\t" << stats.documents << "\nsentences\t" << stats.sentences << "\nvocabulary\t" << stats.vocabulary
              << "\nclasses\t" << corpus.num_classes() << '\n';
    return kOk;
}

int run_features(const std::string& manifest, const std::string& profile_name, const std::string& lexicon_path,
                 const std::string& groups, const std::string& out)
{
    const auto profile = readlab::parse_profile(profile_name);
    const auto corpus = readlab::load_manifest(manifest, profile);
    readlab::TagLexicon lexicon;
    if (!lexicon_path.empty()) lexicon = readlab::TagLexicon::load(lexicon_path);

    auto registry = readlab::default_registry(profile);
    if (!groups.empty()) {
        std::set<readlab::FeatureGroup> removed;
        std::size_t start = 0;
        while (start <= groups.size()) {
            const auto end = std::min(groups.find(',', start), groups.size());
            removed.insert(readlab::parse_group(groups.substr(start, end - start)));
            start = end + 1;
        }
        registry = readlab::remove_groups(registry, removed);
    }

    std::vector<readlab::FeatureVector> vectors;
    for (const auto& doc : corpus.documents) {
        const auto seg = readlab::segment(doc, profile);
        vectors.push_back(readlab::extract(seg, registry, readlab::tag_pos(seg, lexicon), doc.id));
    }
    readlab::write_features_csv(out, registry, vectors);
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Readability assessment experiments: linguistic features, sentence embeddings, classical classifiers"};
    app.require_subcommand(1);

    ExperimentArgs ablation, substitution, sweep;
    add_experiment(app, "ablation", "Linguistic-only vs embedding-only vs combined features", ablation);
    add_experiment(app, "substitution", "Combined models with and without the removed feature groups", substitution);
    add_experiment(app, "pca-sweep", "Cross-validation with PCA at each variance percentage", sweep);

    std::string manifest, profile = "english", lexicon, remove, out;
    auto* stats = app.add_subcommand("stats", "Corpus statistics");
    stats->add_option("--manifest", manifest, "Corpus manifest (CSV)")->required()->check(CLI::ExistingFile);
    stats->add_option("--profile", profile, "english or filipino");
    auto* features = app.add_subcommand("features", "Write linguistic features as CSV");
    features->add_option("--manifest", manifest, "Corpus manifest (CSV)")->required()->check(CLI::ExistingFile);
    features->add_option("--profile", profile, "english or filipino");
    features->add_option("--lexicon", lexicon, "Tag lexicon (TSV)")->check(CLI::ExistingFile);
    features->add_option("--remove", remove, "Comma-separated feature groups to drop (e.g. SEM,SYN)");
    features->add_option("--out", out, "Output CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        for (const auto* sub : app.get_subcommands()) {
            const auto& name = sub->get_name();
            if (name == "ablation") return run_experiment(name, ablation);
            if (name == "substitution") return run_experiment(name, substitution);
            if (name == "pca-sweep") return run_experiment(name, sweep);
            if (name == "stats") return run_stats(manifest, profile);
            if (name == "features") return run_features(manifest, profile, lexicon, remove, out);
        }
    } catch (const readlab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const readlab::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const readlab::TrainingError& e) {
        std::cerr << "training error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternalError;
    }
    return kOk;
}
