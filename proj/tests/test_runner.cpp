#include "readlab/error.hpp"
#include "readlab/eval.hpp"
#include "readlab/runner.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <sstream>

using namespace readlab;
using readlab::testing::TempDir;
using readlab::testing::data_dir;
using readlab::testing::read_text;
using readlab::testing::write_file;

namespace {

std::string toy_config_text(const std::string& extra = {})
{
    const auto d = data_dir();
    return "corpus = \"" + (d / "toy/manifest.csv").string() + "\"\n" + "embeddings = \"" + (d / "toy/embeddings.jsonl").string() +
           "\"\n" + "lexicon = \"" + (d / "lexicons/english.tsv").string() + "\"\n" + "k = 3\nseed = 42\n" + extra;
}

ExperimentConfig toy_config(const std::string& extra = {})
{
    return parse_config(toy_config_text(extra + "[rf]\ntrees = 25\n"), data_dir() / "toy");
}

std::string config_error(const std::string& text)
{
    try {
        parse_config(text, data_dir()).validate();
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> fields;
        std::istringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        rows.push_back(fields);
    }
    return rows;
}

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(READLAB_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST(Config, ParsesSingleDatasetForm)
{
    const auto c = parse_config(R"(
corpus = "toy/manifest.csv"
embeddings = "toy/embeddings.jsonl"
lexicon = "lexicons/english.tsv"
k = 4
seed = 7
algorithms = ["svm", "rf"]
modes = ["combined"]
pca_percentages = [100, 25]
removed_groups = ["SEM"]
mwu_pairing = "per_cell"
output = "out"

[svm]
C = 2.5
)",
                                data_dir());
    ASSERT_EQ(c.datasets.size(), 1u);
    EXPECT_EQ(c.datasets[0].name, "toy");
    EXPECT_EQ(c.datasets[0].corpus, data_dir() / "toy/manifest.csv");
    EXPECT_EQ(c.k, 4);
    EXPECT_EQ(c.seed, 7u);
    EXPECT_EQ(c.algorithms, (std::vector<Algorithm>{Algorithm::svm, Algorithm::rf}));
    EXPECT_EQ(c.modes, (std::vector<FeatureMode>{FeatureMode::combined}));
    EXPECT_EQ(c.pca_percentages, (std::vector<int>{25, 100}));
    EXPECT_EQ(c.removed_groups, (std::set<FeatureGroup>{FeatureGroup::sem}));
    EXPECT_EQ(c.pairing, ScorePairing::per_cell);
    EXPECT_EQ(c.output, data_dir() / "out");
    EXPECT_DOUBLE_EQ(c.model_spec(Algorithm::svm).get("C"), 2.5);
    EXPECT_EQ(c.model_spec(Algorithm::svm).seed, 7u);
    EXPECT_NO_THROW(c.validate());
}

TEST(Config, Defaults)
{
    const auto c = parse_config(toy_config_text(), data_dir());
    const ExperimentConfig fresh;
    EXPECT_EQ(c.algorithms, fresh.algorithms);
    EXPECT_EQ(c.modes, fresh.modes);
    EXPECT_EQ(c.pca_percentages, (std::vector<int>{25, 50, 75, 95, 100}));
    EXPECT_EQ(c.removed_groups, (std::set<FeatureGroup>{FeatureGroup::sem, FeatureGroup::syn}));
    EXPECT_EQ(c.pairing, ScorePairing::per_fold);
    EXPECT_EQ(fresh.k, 5);
    EXPECT_EQ(c.datasets[0].profile, LanguageProfile::english);
    EXPECT_EQ(c.datasets[0].name, "toy");
}

TEST(Config, DatasetsArray)
{
    const auto c = load_config(data_dir() / "both.toml");
    ASSERT_EQ(c.datasets.size(), 2u);
    EXPECT_EQ(c.datasets[1].name, "toy-fil");
    EXPECT_EQ(c.datasets[1].profile, LanguageProfile::filipino);
    EXPECT_NO_THROW(c.validate());
}

TEST(Config, Errors)
{
    EXPECT_NE(config_error("k = 3\n"), "");
    EXPECT_NE(config_error(toy_config_text("colour = 1\n")).find("unknown key 'colour'"), std::string::npos);
    EXPECT_NE(config_error(toy_config_text("pca_percentages = [30]\n")).find("30"), std::string::npos);
    EXPECT_NE(config_error(toy_config_text("algorithms = [\"knn\"]\n")).find("knn"), std::string::npos);
    EXPECT_NE(config_error(toy_config_text("modes = [\"combined\", \"combined\"]\n")), "");
    EXPECT_NE(config_error(toy_config_text("removed_groups = [\"PARSE\"]\n")), "");
    EXPECT_NE(config_error(toy_config_text("mwu_pairing = \"paired\"\n")), "");
    EXPECT_NE(config_error(toy_config_text("seed = -1\n")), "");
    EXPECT_NE(config_error(toy_config_text("[svm]\nC = 0\n")), "");
    EXPECT_NE(config_error(toy_config_text("[rf]\ndepth = 3\n")).find("depth"), std::string::npos);
    EXPECT_NE(config_error("corpus = \"nope.csv\"\nembeddings = \"toy/embeddings.jsonl\"\n").find("corpus not found"), std::string::npos);
    EXPECT_NE(config_error("k = [1\n"), "");
    EXPECT_THROW(load_config(data_dir() / "absent.toml"), ConfigError);

    const auto line = config_error(toy_config_text("k = \"three\"\n"));
    EXPECT_NE(line.find("line "), std::string::npos) << line;
}

TEST(Config, TomlRoundTrip)
{
    for (const auto& c : {toy_config("algorithms = [\"rf\", \"logreg\"]\nmwu_pairing = \"per_cell\"\n"), load_config(data_dir() / "both.toml")}) {
        TempDir dir("cfg");
        const auto text = to_toml(c);
        const auto back = parse_config(text, dir.path());
        EXPECT_EQ(to_json(back).dump(), to_json(c).dump());
        EXPECT_EQ(to_toml(back), text);
    }
}

TEST(Pairing, Names)
{
    EXPECT_EQ(parse_pairing("per_fold"), ScorePairing::per_fold);
    EXPECT_EQ(to_string(ScorePairing::per_cell), "per_cell");
    EXPECT_THROW(parse_pairing("other"), std::invalid_argument);
}

TEST(Prepare, ToyDatasetShapes)
{
    const auto c = toy_config();
    const auto prepared = prepare_dataset(c.datasets[0]);
    EXPECT_EQ(prepared.corpus.size(), 9u);
    EXPECT_EQ(prepared.embeddings.rows(), 9);
    EXPECT_EQ(prepared.embeddings.cols(), 768);
    EXPECT_EQ(prepared.embedding_model, "synthetic-gaussian");

    const auto reg = default_registry(LanguageProfile::english);
    const auto combined = build_dataset(prepared, reg, FeatureMode::combined);
    const auto ling = build_dataset(prepared, reg, FeatureMode::ling_only);
    const auto emb = build_dataset(prepared, reg, FeatureMode::emb_only);
    EXPECT_EQ(combined.cols(), ling.cols() + emb.cols());
    EXPECT_EQ(ling.cols(), static_cast<Eigen::Index>(reg.size()));
    EXPECT_EQ(combined.block_boundary, ling.cols());
}

TEST(Prepare, MissingLexiconWarns)
{
    auto c = toy_config();
    c.datasets[0].lexicon.reset();
    const auto prepared = prepare_dataset(c.datasets[0]);
    EXPECT_FALSE(prepared.warnings.empty());
}

TEST(Prepare, MisalignedEmbeddingsNameDataset)
{
    TempDir dir("prep");
    write_file(dir / "e.jsonl", "{\"dim\": 2, \"granularity\": \"document\"}\n{\"id\": \"d1\", \"v\": [1, 2]}\n");
    auto c = toy_config();
    c.datasets[0].embeddings = dir / "e.jsonl";
    try {
        prepare_dataset(c.datasets[0]);
        FAIL() << "expected AlignmentError";
    } catch (const AlignmentError& e) {
        EXPECT_NE(std::string(e.what()).find("dataset 'toy'"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("d9"), std::string::npos);
    }
}

TEST(Ablation, NineCellsInRange)
{
    const auto out = run_ablation(toy_config());
    EXPECT_EQ(out.experiment, "ablation");
    const auto& results = out.report.at("results");
    ASSERT_EQ(results.size(), 9u);
    for (const auto& r : results) {
        const double f1 = r.at("mean_weighted_f1").get<double>();
        EXPECT_GE(f1, 0.0);
        EXPECT_LE(f1, 1.0);
    }
    const auto& ds = out.report.at("datasets")[0];
    EXPECT_EQ(ds.at("embedding_dims"), 768);
    EXPECT_EQ(ds.at("linguistic_dims").get<int>() + 768, ds.at("dims").at("combined").get<int>());
    EXPECT_EQ(out.report.at("seed"), 42);
    EXPECT_EQ(out.report.at("config").at("k"), 3);
    for (const char* file : {"ablation.json", "ablation.md", "resolved_config.toml"}) EXPECT_TRUE(out.files.contains(file)) << file;
    EXPECT_NE(out.files.at("ablation.md").find("## Logistic Regression"), std::string::npos);
}

TEST(Ablation, ByteIdenticalAcrossRunsAndThreadCounts)
{
    const auto c = toy_config();
    ::setenv("READABILITY_LAB_THREADS", "1", 1);
    const auto serial = run_ablation(c);
    ::setenv("READABILITY_LAB_THREADS", "6", 1);
    const auto parallel = run_ablation(c);
    const auto again = run_ablation(c);
    ::unsetenv("READABILITY_LAB_THREADS");
    EXPECT_EQ(serial.files.at("ablation.json"), parallel.files.at("ablation.json"));
    EXPECT_EQ(parallel.files.at("ablation.json"), again.files.at("ablation.json"));
    EXPECT_EQ(serial.files.at("ablation.md"), again.files.at("ablation.md"));
}

TEST(Ablation, ReproducibleFromResolvedConfig)
{
    TempDir dir("abl");
    auto c = toy_config("algorithms = [\"logreg\"]\n");
    c.output = dir.path();
    const auto first = run_ablation(c);
    write_report(first, dir.path());
    EXPECT_EQ(read_text(dir / "ablation.json"), first.files.at("ablation.json"));

    const auto replay = run_ablation(load_config(dir / "resolved_config.toml"));
    EXPECT_EQ(replay.files.at("ablation.json"), first.files.at("ablation.json"));
}

TEST(Substitution, ReducedDesignDropsRemovedColumns)
{
    const auto c = toy_config("removed_groups = [\"SEM\"]\n");
    const auto prepared = prepare_dataset(c.datasets[0]);
    const auto full_reg = default_registry(LanguageProfile::english);
    const auto reduced_reg = remove_groups(full_reg, {FeatureGroup::sem});
    const auto full = build_dataset(prepared, full_reg, FeatureMode::combined);
    const auto reduced = build_dataset(prepared, reduced_reg, FeatureMode::combined);
    const auto removed = static_cast<Eigen::Index>(full_reg.count(FeatureGroup::sem));
    EXPECT_GT(removed, 0);
    EXPECT_EQ(full.cols() - reduced.cols(), removed);
    EXPECT_EQ(full.block_boundary - reduced.block_boundary, removed);
    EXPECT_EQ(reduced.X.rightCols(768), full.X.rightCols(768));

    const auto out = run_substitution(c);
    const auto& ds = out.report.at("datasets")[0];
    EXPECT_EQ(ds.at("linguistic_dims").get<int>() - ds.at("reduced_linguistic_dims").get<int>(), removed);
    EXPECT_EQ(ds.at("removed_features").size(), static_cast<std::size_t>(removed));
}

TEST(Substitution, ReportsBothTests)
{
    const auto out = run_substitution(toy_config());
    const auto& tests = out.report.at("tests");
    EXPECT_EQ(tests.at("pairing"), "per_fold");
    const auto full = tests.at("samples").at("full").get<std::vector<double>>();
    const auto reduced = tests.at("samples").at("reduced").get<std::vector<double>>();
    EXPECT_EQ(full.size(), 9u);
    EXPECT_EQ(reduced.size(), 9u);

    const auto mwu = mann_whitney_u(full, reduced);
    EXPECT_DOUBLE_EQ(tests.at("mann_whitney_u").at("p_value").get<double>(), mwu.p_value);
    EXPECT_EQ(tests.at("mann_whitney_u").at("method"), std::string(to_string(mwu.method)));
    EXPECT_DOUBLE_EQ(tests.at("variance_equality").at("p_value").get<double>(), variance_equality(full, reduced).p_value);
    EXPECT_EQ(tests.at("variance_equality").at("method"), "f-distribution");

    const auto& md = out.files.at("substitution.md");
    EXPECT_NE(md.find("Mann-Whitney U"), std::string::npos);
    EXPECT_NE(md.find("Full model (ling + emb), best algorithm"), std::string::npos);
}

TEST(Substitution, IdenticalArmsGivePOne)
{
    const std::vector<double> scores = {0.71, 0.64, 0.80, 0.66, 0.59};
    EXPECT_DOUBLE_EQ(mann_whitney_u(scores, scores).p_value, 1.0);
    EXPECT_DOUBLE_EQ(variance_equality(scores, scores).p_value, 1.0);
}

TEST(Substitution, PerCellPairing)
{
    const auto out = run_substitution(toy_config("mwu_pairing = \"per_cell\"\n"));
    EXPECT_EQ(out.report.at("tests").at("pairing"), "per_cell");
    EXPECT_EQ(out.report.at("tests").at("samples").at("full").size(), 3u);
}

TEST(Substitution, AbsentGroupsAreConfigErrors)
{
    EXPECT_THROW(run_substitution(toy_config("removed_groups = [\"ORTHO\"]\n")), ConfigError);
    EXPECT_THROW(run_substitution(toy_config("removed_groups = []\n")), ConfigError);
    EXPECT_THROW(run_substitution(toy_config("removed_groups = [\"TRAD\", \"LEX\", \"SYN\", \"SEM\"]\n")), ConfigError);
}

TEST(PcaSweep, FifteenRowsWithMonotoneDims)
{
    const auto out = run_pca_sweep(toy_config());
    const auto rows = csv_rows(out.files.at("pca_sweep.csv"));
    ASSERT_EQ(rows.size(), 16u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"dataset", "algorithm", "pct", "mean_f1", "retained_dims"}));

    const auto combined = out.report.at("datasets")[0].at("dims").at("combined").get<double>();
    std::map<std::string, double> last;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        ASSERT_EQ(rows[i].size(), 5u);
        const double dims = std::stod(rows[i][4]);
        const double f1 = std::stod(rows[i][3]);
        EXPECT_GE(f1, 0.0);
        EXPECT_LE(f1, 1.0);
        if (last.contains(rows[i][1])) EXPECT_GE(dims, last[rows[i][1]]);
        last[rows[i][1]] = dims;
        if (rows[i][2] == "100") EXPECT_DOUBLE_EQ(dims, combined);
    }
    EXPECT_EQ(last.size(), 3u);
}

TEST(Workers, EnvironmentCapsCount)
{
    ::setenv("READABILITY_LAB_THREADS", "2", 1);
    EXPECT_EQ(worker_count(10), 2u);
    EXPECT_EQ(worker_count(1), 1u);
    ::setenv("READABILITY_LAB_THREADS", "junk", 1);
    EXPECT_GE(worker_count(10), 1u);
    ::unsetenv("READABILITY_LAB_THREADS");
    EXPECT_EQ(worker_count(0), 1u);
}

TEST(Workers, ParallelForRunsEveryIndexAndRethrows)
{
    std::vector<int> hits(50, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
    EXPECT_EQ(hits, std::vector<int>(50, 1));
    EXPECT_THROW(parallel_for(8, [](std::size_t i) {
                     if (i == 5) throw DataError("boom");
                 }),
                 DataError);
}

TEST(Cli, ExitCodes)
{
    TempDir dir("cli");
    const auto toy = data_dir() / "toy";
    EXPECT_EQ(run_cli("stats --manifest " + (toy / "manifest.csv").string()), 0);
    EXPECT_EQ(run_cli("ablation --config " + (dir / "absent.toml").string()), 1);
    EXPECT_EQ(run_cli("frobnicate"), 1);

    write_file(dir / "bad.toml", "corpus = \"" + (toy / "manifest.csv").string() + "\"\nembeddings = \"" +
                                     (toy / "embeddings.jsonl").string() + "\"\nk = 1\n");
    EXPECT_EQ(run_cli("ablation --config " + (dir / "bad.toml").string()), 1);

    write_file(dir / "broken.jsonl", "{\"dim\": 768}\n{\"id\": \"d1\", \"v\": [1, 2]}\n");
    write_file(dir / "data.toml", "corpus = \"" + (toy / "manifest.csv").string() + "\"\nembeddings = \"broken.jsonl\"\nk = 3\n");
    EXPECT_EQ(run_cli("ablation --config " + (dir / "data.toml").string() + " --out " + (dir / "o").string()), 2);

    write_file(dir / "ok.toml", toy_config_text("algorithms = [\"logreg\"]\nmodes = [\"ling_only\"]\n"));
    EXPECT_EQ(run_cli("ablation --config " + (dir / "ok.toml").string() + " --out " + (dir / "res").string() + " --seed 5"), 0);
    EXPECT_TRUE(std::filesystem::exists(dir / "res/ablation.json"));
    EXPECT_EQ(nlohmann::json::parse(read_text(dir / "res/ablation.json")).at("seed"), 5);

    EXPECT_EQ(run_cli("features --manifest " + (toy / "manifest.csv").string() + " --remove SEM,SYN --out " +
                      (dir / "f.csv").string()),
              0);
    EXPECT_EQ(read_text(dir / "f.csv").find("sem."), std::string::npos);
}
