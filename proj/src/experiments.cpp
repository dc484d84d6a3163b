#include "readlab/error.hpp"
#include "readlab/runner.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace readlab {

namespace fs = std::filesystem;

namespace {

std::string fixed(double x, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

std::string number(double x)
{
    if (x == std::floor(x) && std::abs(x) < 1e15) return std::to_string(static_cast<long long>(x));
    return fixed(x, 2);
}

std::string_view algorithm_title(Algorithm a)
{
    switch (a) {
    case Algorithm::logreg: return "Logistic Regression";
    case Algorithm::svm: return "Support Vector Machines";
    case Algorithm::rf: return "Random Forest";
    }
    return "?";
}

std::string_view mode_title(FeatureMode m)
{
    switch (m) {
    case FeatureMode::ling_only: return "Linguistic features";
    case FeatureMode::emb_only: return "Sentence embeddings";
    case FeatureMode::combined: return "Combined features (ling + emb)";
    }
    return "?";
}

std::string bold_if(const std::string& s, bool bold) { return bold ? "**" + s + "**" : s; }

/// Prepared inputs shared by every experiment.
struct Inputs {
    std::vector<PreparedDataset> datasets;
    std::vector<FoldPlan> plans;
    std::vector<std::string> warnings;
};

Inputs prepare(const ExperimentConfig& config)
{
    config.validate();
    Inputs in;
    for (const auto& d : config.datasets) {
        in.datasets.push_back(prepare_dataset(d));
        const auto& p = in.datasets.back();
        in.warnings.insert(in.warnings.end(), p.warnings.begin(), p.warnings.end());
        const auto labels = p.corpus.labels();
        try {
            in.plans.push_back(stratified_kfold(labels, config.k, config.seed));
        } catch (const std::invalid_argument& e) {
            throw DataError("dataset '" + d.name + "': " + e.what());
        }
        for (const auto& w : in.plans.back().warnings) in.warnings.push_back("dataset '" + d.name + "': " + w);
    }
    return in;
}

nlohmann::json dataset_summary(const PreparedDataset& d, const FeatureRegistry& registry)
{
    return {
        {"name", d.name},
        {"profile", to_string(d.profile)},
        {"documents", d.corpus.size()},
        {"classes", d.corpus.class_names},
        {"linguistic_dims", registry.size()},
        {"embedding_dims", d.embeddings.cols()},
        {"embedding_model", d.embedding_model},
    };
}

nlohmann::json base_report(const std::string& experiment, const ExperimentConfig& config)
{
    return {{"experiment", experiment}, {"config", to_json(config)}, {"seed", config.seed}};
}

struct Job {
    std::size_t dataset = 0;
    Algorithm algorithm = Algorithm::logreg;
    FeatureMode mode = FeatureMode::combined;
    std::optional<int> pct;
    std::string registry;
    const Dataset* data = nullptr;
};

std::vector<EvalReport> run_jobs(const std::vector<Job>& jobs, const ExperimentConfig& config, const Inputs& in)
{
    std::vector<EvalReport> reports(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t i) {
        const Job& job = jobs[i];
        EvalSetup setup{in.datasets[job.dataset].name, job.mode, job.algorithm, job.registry, job.pct};
        try {
            reports[i] = cross_validate(*job.data, config.model_spec(job.algorithm), in.plans[job.dataset], job.pct, setup);
        } catch (const TrainingError& e) {
            throw TrainingError("dataset '" + setup.dataset + "', " + std::string(to_string(job.algorithm)) + ", " +
                                std::string(to_string(job.mode)) + ": " + e.what());
        }
    });
    return reports;
}

void collect_warnings(ExperimentOutput& out, const Inputs& in, const std::vector<EvalReport>& reports)
{
    out.warnings = in.warnings;
    for (const auto& r : reports)
        for (const auto& w : r.warnings) {
            const std::string tagged = r.setup.dataset + "/" + std::string(to_string(r.setup.algorithm)) + "/" +
                                       std::string(to_string(r.setup.mode)) + ": " + w;
            if (std::find(out.warnings.begin(), out.warnings.end(), tagged) == out.warnings.end())
                out.warnings.push_back(tagged);
        }
}

std::string markdown_header(const std::string& title, const ExperimentConfig& config)
{
    std::ostringstream md;
    md << "# " << title << "\n\n";
    md << "Mean weighted F1 over " << config.k << "-fold stratified cross-validation, seed " << config.seed << ".\n\n";
    return md.str();
}

void append_warnings(std::ostringstream& md, const std::vector<std::string>& warnings)
{
    if (warnings.empty()) return;
    md << "\n## Warnings\n\n";
    for (const auto& w : warnings) md << "- " << w << "\n";
}

} // namespace

ExperimentOutput run_ablation(const ExperimentConfig& config)
{
    const Inputs in = prepare(config);
    const std::size_t D = in.datasets.size();

    std::vector<FeatureRegistry> registries;
    std::vector<std::vector<Dataset>> data(D);
    for (std::size_t d = 0; d < D; ++d) {
        registries.push_back(default_registry(in.datasets[d].profile));
        for (const auto mode : config.modes) data[d].push_back(build_dataset(in.datasets[d], registries[d], mode));
    }

    std::vector<Job> jobs;
    for (std::size_t d = 0; d < D; ++d)
        for (const auto a : config.algorithms)
            for (std::size_t m = 0; m < config.modes.size(); ++m)
                jobs.push_back({d, a, config.modes[m], std::nullopt, "full", &data[d][m]});
    const auto reports = run_jobs(jobs, config, in);

    // score[d][a][m]
    const std::size_t A = config.algorithms.size(), M = config.modes.size();
    auto score = [&](std::size_t d, std::size_t a, std::size_t m) { return reports[(d * A + a) * M + m].mean_f1; };

    ExperimentOutput out;
    out.experiment = "ablation";
    collect_warnings(out, in, reports);
    nlohmann::json j = base_report("ablation", config);
    for (std::size_t d = 0; d < D; ++d) {
        auto summary = dataset_summary(in.datasets[d], registries[d]);
        for (std::size_t m = 0; m < M; ++m) summary["dims"][std::string(to_string(config.modes[m]))] = data[d][m].cols();
        j["datasets"].push_back(std::move(summary));
    }
    for (const auto& r : reports) j["results"].push_back(to_json(r));

    std::ostringstream md;
    md << markdown_header("Feature-set ablation", config);
    for (std::size_t a = 0; a < A; ++a) {
        const std::string algo(to_string(config.algorithms[a]));
        std::vector<double> best(D, -1.0);
        for (std::size_t d = 0; d < D; ++d) {
            for (std::size_t m = 0; m < M; ++m) best[d] = std::max(best[d], score(d, a, m));
            std::vector<std::string> winners;
            for (std::size_t m = 0; m < M; ++m)
                if (score(d, a, m) == best[d]) winners.emplace_back(to_string(config.modes[m]));
            j["best_mode"][algo][in.datasets[d].name] = winners;
        }
        md << "## " << algorithm_title(config.algorithms[a]) << "\n\n| Method |";
        for (const auto& ds : in.datasets) md << ' ' << ds.name << " |";
        md << "\n|---|";
        for (std::size_t d = 0; d < D; ++d) md << "---:|";
        md << '\n';
        for (std::size_t m = 0; m < M; ++m) {
            md << "| " << mode_title(config.modes[m]) << " |";
            for (std::size_t d = 0; d < D; ++d) md << ' ' << bold_if(fixed(score(d, a, m), 3), score(d, a, m) == best[d]) << " |";
            md << '\n';
        }
        md << '\n';
    }

    const auto find_mode = [&](FeatureMode mode) -> std::optional<std::size_t> {
        for (std::size_t m = 0; m < M; ++m)
            if (config.modes[m] == mode) return m;
        return std::nullopt;
    };
    const auto combined = find_mode(FeatureMode::combined);
    if (combined) {
        const std::string label =
            "Gain of combined features over each single-block mode, in weighted F1 percentage points, averaged across algorithms";
        nlohmann::json agg = {{"label", label}};
        md << "## Combined-feature gain\n\n" << label << ".\n\n| Baseline |";
        for (const auto& ds : in.datasets) md << ' ' << ds.name << " |";
        md << "\n|---|";
        for (std::size_t d = 0; d < D; ++d) md << "---:|";
        md << '\n';
        for (const auto baseline : {FeatureMode::ling_only, FeatureMode::emb_only}) {
            const auto b = find_mode(baseline);
            if (!b) continue;
            const std::string key = "combined_minus_" + std::string(to_string(baseline));
            md << "| vs " << mode_title(baseline) << " |";
            for (std::size_t d = 0; d < D; ++d) {
                double sum = 0.0;
                for (std::size_t a = 0; a < A; ++a) sum += score(d, a, *combined) - score(d, a, *b);
                const double gain = 100.0 * sum / static_cast<double>(A);
                agg["datasets"][in.datasets[d].name][key] = gain;
                md << ' ' << fixed(gain, 2) << " |";
            }
            md << '\n';
        }
        j["aggregate"] = std::move(agg);
    }
    append_warnings(md, out.warnings);
    j["warnings"] = out.warnings;

    out.report = std::move(j);
    out.files["ablation.json"] = out.report.dump(2) + "\n";
    out.files["ablation.md"] = md.str();
    out.files["resolved_config.toml"] = to_toml(config);
    return out;
}

ExperimentOutput run_substitution(const ExperimentConfig& config)
{
    if (config.removed_groups.empty()) throw ConfigError("removed_groups must not be empty for substitution");
    const Inputs in = prepare(config);
    const std::size_t D = in.datasets.size(), A = config.algorithms.size();

    std::vector<FeatureRegistry> full_reg, reduced_reg;
    std::vector<std::array<Dataset, 2>> data(D);
    std::vector<std::vector<std::string>> removed(D);
    for (std::size_t d = 0; d < D; ++d) {
        const auto& ds = in.datasets[d];
        full_reg.push_back(default_registry(ds.profile));
        reduced_reg.push_back(remove_groups(full_reg[d], config.removed_groups));
        if (reduced_reg[d].size() == full_reg[d].size())
            throw ConfigError("dataset '" + ds.name + "': registry has no features in the removed groups");
        if (reduced_reg[d].empty()) throw ConfigError("dataset '" + ds.name + "': removing the groups leaves no linguistic features");
        for (const auto& f : full_reg[d].features)
            if (config.removed_groups.contains(f.group)) removed[d].push_back(f.id);
        data[d][0] = build_dataset(ds, full_reg[d], FeatureMode::combined);
        data[d][1] = build_dataset(ds, reduced_reg[d], FeatureMode::combined);
    }

    std::vector<Job> jobs;
    for (std::size_t d = 0; d < D; ++d)
        for (const auto a : config.algorithms) {
            jobs.push_back({d, a, FeatureMode::combined, std::nullopt, "full", &data[d][0]});
            jobs.push_back({d, a, FeatureMode::combined, std::nullopt, "reduced", &data[d][1]});
        }
    const auto reports = run_jobs(jobs, config, in);
    auto cell = [&](std::size_t d, std::size_t a, int arm) -> const EvalReport& { return reports[(d * A + a) * 2 + static_cast<std::size_t>(arm)]; };

    std::vector<double> full_scores, reduced_scores;
    for (std::size_t d = 0; d < D; ++d)
        for (std::size_t a = 0; a < A; ++a) {
            if (config.pairing == ScorePairing::per_fold) {
                const auto f = cell(d, a, 0).fold_scores(), r = cell(d, a, 1).fold_scores();
                full_scores.insert(full_scores.end(), f.begin(), f.end());
                reduced_scores.insert(reduced_scores.end(), r.begin(), r.end());
            } else {
                full_scores.push_back(cell(d, a, 0).mean_f1);
                reduced_scores.push_back(cell(d, a, 1).mean_f1);
            }
        }

    ExperimentOutput out;
    out.experiment = "substitution";
    collect_warnings(out, in, reports);
    nlohmann::json j = base_report("substitution", config);
    for (std::size_t d = 0; d < D; ++d) {
        auto summary = dataset_summary(in.datasets[d], full_reg[d]);
        summary["reduced_linguistic_dims"] = reduced_reg[d].size();
        summary["removed_features"] = removed[d];
        summary["dims"] = {{"full", data[d][0].cols()}, {"reduced", data[d][1].cols()}};
        j["datasets"].push_back(std::move(summary));
    }
    for (const auto& r : reports) j["results"].push_back(to_json(r));

    nlohmann::json tests = {{"pairing", to_string(config.pairing)},
                            {"samples", {{"full", full_scores}, {"reduced", reduced_scores}}}};
    std::optional<TestResult> mwu, levene;
    if (!full_scores.empty() && !reduced_scores.empty()) mwu = mann_whitney_u(full_scores, reduced_scores);
    if (full_scores.size() >= 2 && reduced_scores.size() >= 2) levene = variance_equality(full_scores, reduced_scores);
    tests["mann_whitney_u"] = mwu ? to_json(*mwu) : nlohmann::json(nullptr);
    tests["variance_equality"] = levene ? to_json(*levene) : nlohmann::json(nullptr);
    if (!levene) out.warnings.push_back("variance-equality test needs at least 2 scores per arm; not computed");
    j["tests"] = std::move(tests);

    std::ostringstream md;
    md << markdown_header("Feature substitution", config);
    md << "Removed groups:";
    for (const auto g : config.removed_groups) md << ' ' << to_string(g);
    md << ".\n\n| Model with removed features |";
    for (const auto& ds : in.datasets) md << ' ' << ds.name << " |";
    md << "\n|---|";
    for (std::size_t d = 0; d < D; ++d) md << "---:|";
    md << '\n';
    std::vector<double> best_full(D, -1.0), best(D, -1.0);
    for (std::size_t d = 0; d < D; ++d)
        for (std::size_t a = 0; a < A; ++a) {
            best_full[d] = std::max(best_full[d], cell(d, a, 0).mean_f1);
            best[d] = std::max({best[d], cell(d, a, 0).mean_f1, cell(d, a, 1).mean_f1});
        }
    for (std::size_t a = 0; a < A; ++a) {
        md << "| " << algorithm_title(config.algorithms[a]) << " |";
        for (std::size_t d = 0; d < D; ++d) {
            const double s = cell(d, a, 1).mean_f1;
            md << ' ' << bold_if(fixed(s, 3), s == best[d]) << " |";
        }
        md << '\n';
    }
    md << "| Full model (ling + emb), best algorithm |";
    for (std::size_t d = 0; d < D; ++d) md << ' ' << bold_if(fixed(best_full[d], 3), best_full[d] == best[d]) << " |";
    md << "\n\n## Significance\n\nScore samples: " << to_string(config.pairing) << " (" << full_scores.size()
       << " full vs " << reduced_scores.size() << " reduced).\n\n| Test | Statistic | p-value | Method |\n|---|---:|---:|---|\n";
    const auto row = [&](const char* name, const std::optional<TestResult>& t) {
        if (!t) {
            md << "| " << name << " | n/a | n/a | not computed |\n";
            return;
        }
        md << "| " << name << " | " << (std::isfinite(t->statistic) ? fixed(t->statistic, 4) : "inf") << " | "
           << fixed(t->p_value, 4) << " | " << to_string(t->method) << " |\n";
    };
    row("Mann-Whitney U (two-tailed)", mwu);
    row("Equal variances (median Levene)", levene);
    append_warnings(md, out.warnings);
    j["warnings"] = out.warnings;

    out.report = std::move(j);
    out.files["substitution.json"] = out.report.dump(2) + "\n";
    out.files["substitution.md"] = md.str();
    out.files["resolved_config.toml"] = to_toml(config);
    return out;
}

ExperimentOutput run_pca_sweep(const ExperimentConfig& config)
{
    const Inputs in = prepare(config);
    const std::size_t D = in.datasets.size(), A = config.algorithms.size(), P = config.pca_percentages.size();

    std::vector<FeatureRegistry> registries;
    std::vector<Dataset> data;
    for (std::size_t d = 0; d < D; ++d) {
        registries.push_back(default_registry(in.datasets[d].profile));
        data.push_back(build_dataset(in.datasets[d], registries[d], FeatureMode::combined));
    }

    std::vector<Job> jobs;
    for (std::size_t d = 0; d < D; ++d)
        for (const auto a : config.algorithms)
            for (const int pct : config.pca_percentages) jobs.push_back({d, a, FeatureMode::combined, pct, "full", &data[d]});
    const auto reports = run_jobs(jobs, config, in);
    auto cell = [&](std::size_t d, std::size_t a, std::size_t p) -> const EvalReport& { return reports[(d * A + a) * P + p]; };

    ExperimentOutput out;
    out.experiment = "pca-sweep";
    collect_warnings(out, in, reports);
    nlohmann::json j = base_report("pca-sweep", config);
    for (std::size_t d = 0; d < D; ++d) {
        auto summary = dataset_summary(in.datasets[d], registries[d]);
        summary["dims"] = {{"combined", data[d].cols()}};
        j["datasets"].push_back(std::move(summary));
    }
    for (const auto& r : reports) j["results"].push_back(to_json(r));

    std::ostringstream csv;
    csv << "dataset,algorithm,pct,mean_f1,retained_dims\n";
    std::ostringstream md;
    md << markdown_header("PCA variance sweep", config);
    md << "Combined features; PCA fitted on each training split. Cells: mean weighted F1 (mean retained dimensions).\n\n";
    for (std::size_t d = 0; d < D; ++d) {
        md << "## " << in.datasets[d].name << "\n\n| Variance % |";
        for (const auto a : config.algorithms) md << ' ' << algorithm_title(a) << " |";
        md << "\n|---:|";
        for (std::size_t a = 0; a < A; ++a) md << "---:|";
        md << '\n';
        for (std::size_t p = 0; p < P; ++p) {
            md << "| " << config.pca_percentages[p] << " |";
            for (std::size_t a = 0; a < A; ++a) {
                const auto& r = cell(d, a, p);
                md << ' ' << fixed(r.mean_f1, 3) << " (" << number(r.mean_retained_dims()) << ") |";
            }
            md << '\n';
        }
        md << '\n';
        for (std::size_t a = 0; a < A; ++a)
            for (std::size_t p = 0; p < P; ++p) {
                const auto& r = cell(d, a, p);
                csv << in.datasets[d].name << ',' << to_string(config.algorithms[a]) << ',' << config.pca_percentages[p] << ','
                    << fixed(r.mean_f1, 6) << ',' << number(r.mean_retained_dims()) << '\n';
            }
    }
    append_warnings(md, out.warnings);
    j["warnings"] = out.warnings;

    out.report = std::move(j);
    out.files["pca_sweep.json"] = out.report.dump(2) + "\n";
    out.files["pca_sweep.csv"] = csv.str();
    out.files["pca_sweep.md"] = md.str();
    out.files["resolved_config.toml"] = to_toml(config);
    return out;
}

void write_report(const ExperimentOutput& output, const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory " + dir.string() + ": " + ec.message());
    for (const auto& [name, contents] : output.files) {
        std::ofstream f(dir / name, std::ios::binary);
        f << contents;
        if (!f) throw DataError("cannot write " + (dir / name).string());
    }
}

} // namespace readlab
