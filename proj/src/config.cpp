#include "readlab/error.hpp"
#include "readlab/runner.hpp"

#define TOML_EXCEPTIONS 1
#include <tomlplusplus/toml.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace readlab {

namespace fs = std::filesystem;

namespace {

const std::set<std::string_view> kDatasetKeys = {"name", "corpus", "embeddings", "lexicon", "profile"};
const std::set<std::string_view> kRunKeys = {"datasets", "algorithms", "modes", "k", "seed", "pca_percentages",
                                             "removed_groups", "output", "mwu_pairing", "logreg", "svm", "rf"};

std::string where(const toml::node& node)
{
    const auto& src = node.source();
    return "line " + std::to_string(src.begin.line) + ": ";
}

[[noreturn]] void fail(const toml::node& node, const std::string& message) { throw ConfigError(where(node) + message); }

std::string get_string(const toml::node& node, std::string_view key)
{
    const auto* s = node.as_string();
    if (!s) fail(node, std::string(key) + " must be a string");
    return s->get();
}

std::int64_t get_int(const toml::node& node, std::string_view key)
{
    const auto* i = node.as_integer();
    if (!i) fail(node, std::string(key) + " must be an integer");
    return i->get();
}

double get_number(const toml::node& node, std::string_view key)
{
    if (const auto* i = node.as_integer()) return static_cast<double>(i->get());
    if (const auto* f = node.as_floating_point()) return f->get();
    fail(node, std::string(key) + " must be a number");
}

template <typename T, typename Parse>
std::vector<T> get_list(const toml::node& node, std::string_view key, Parse parse)
{
    const auto* arr = node.as_array();
    if (!arr) fail(node, std::string(key) + " must be an array");
    std::vector<T> out;
    for (const auto& item : *arr) {
        try {
            out.push_back(parse(item));
        } catch (const std::invalid_argument& e) {
            fail(item, std::string(key) + ": " + e.what());
        }
    }
    return out;
}

fs::path resolve(const fs::path& base, const std::string& p)
{
    const fs::path path(p);
    return (path.is_absolute() ? path : base / path).lexically_normal();
}

DatasetConfig parse_dataset(const toml::table& table, const fs::path& base, bool top_level)
{
    DatasetConfig d;
    for (const auto& [key, node] : table) {
        const std::string_view k = key.str();
        if (!kDatasetKeys.contains(k)) {
            if (top_level && kRunKeys.contains(k)) continue;
            fail(node, "unknown key '" + std::string(k) + "'");
        }
        if (k == "name") d.name = get_string(node, k);
        else if (k == "corpus") d.corpus = resolve(base, get_string(node, k));
        else if (k == "embeddings") d.embeddings = resolve(base, get_string(node, k));
        else if (k == "lexicon") d.lexicon = resolve(base, get_string(node, k));
        else if (k == "profile") {
            try {
                d.profile = parse_profile(get_string(node, k));
            } catch (const std::invalid_argument& e) {
                fail(node, e.what());
            }
        }
    }
    if (d.corpus.empty()) throw ConfigError("dataset is missing 'corpus'");
    if (d.embeddings.empty()) throw ConfigError("dataset is missing 'embeddings'");
    if (d.name.empty()) d.name = d.corpus.parent_path().filename().string();
    if (d.name.empty()) d.name = d.corpus.stem().string();
    return d;
}

void require_integer(Algorithm algorithm, const std::string& key, double value, double min)
{
    if (value != std::floor(value) || value < min)
        throw ConfigError(std::string(to_string(algorithm)) + "." + key + " must be an integer >= " +
                          std::to_string(static_cast<long long>(min)));
}

template <typename T>
bool has_duplicates(std::vector<T> v)
{
    std::sort(v.begin(), v.end());
    return std::adjacent_find(v.begin(), v.end()) != v.end();
}

} // namespace

ScorePairing parse_pairing(std::string_view name)
{
    if (name == "per_fold") return ScorePairing::per_fold;
    if (name == "per_cell") return ScorePairing::per_cell;
    throw std::invalid_argument("unknown pairing '" + std::string(name) + "' (expected per_fold or per_cell)");
}

std::string_view to_string(ScorePairing pairing)
{
    return pairing == ScorePairing::per_fold ? "per_fold" : "per_cell";
}

ModelSpec ExperimentConfig::model_spec(Algorithm algorithm) const
{
    ModelSpec spec = ModelSpec::defaults(algorithm, seed);
    if (const auto it = hyperparameters.find(algorithm); it != hyperparameters.end())
        for (const auto& [key, value] : it->second) spec.hyperparameters[key] = value;
    return spec;
}

void ExperimentConfig::validate() const
{
    if (datasets.empty()) throw ConfigError("no dataset configured");
    std::vector<std::string> names;
    for (const auto& d : datasets) {
        names.push_back(d.name);
        if (!fs::is_regular_file(d.corpus)) throw ConfigError("dataset '" + d.name + "': corpus not found: " + d.corpus.string());
        if (!fs::is_regular_file(d.embeddings))
            throw ConfigError("dataset '" + d.name + "': embeddings not found: " + d.embeddings.string());
        if (d.lexicon && !fs::is_regular_file(*d.lexicon))
            throw ConfigError("dataset '" + d.name + "': lexicon not found: " + d.lexicon->string());
    }
    if (has_duplicates(names)) throw ConfigError("dataset names must be unique");
    if (algorithms.empty()) throw ConfigError("algorithms must not be empty");
    if (has_duplicates(algorithms)) throw ConfigError("algorithms contain duplicates");
    if (modes.empty()) throw ConfigError("modes must not be empty");
    if (has_duplicates(modes)) throw ConfigError("modes contain duplicates");
    if (k < 2) throw ConfigError("k must be at least 2");
    if (pca_percentages.empty()) throw ConfigError("pca_percentages must not be empty");
    for (const int p : pca_percentages)
        if (!is_allowed_variance_pct(p))
            throw ConfigError("pca percentage " + std::to_string(p) + " is not one of 25, 50, 75, 95, 100");
    if (has_duplicates(pca_percentages)) throw ConfigError("pca_percentages contain duplicates");

    for (const auto& [algorithm, params] : hyperparameters) {
        const auto defaults = ModelSpec::defaults(algorithm).hyperparameters;
        for (const auto& [key, value] : params) {
            if (!defaults.contains(key))
                throw ConfigError("unknown " + std::string(to_string(algorithm)) + " hyperparameter '" + key + "'");
            if (!std::isfinite(value)) throw ConfigError(std::string(to_string(algorithm)) + "." + key + " must be finite");
        }
    }
    for (const Algorithm a : {Algorithm::logreg, Algorithm::svm, Algorithm::rf}) {
        const ModelSpec spec = model_spec(a);
        switch (a) {
        case Algorithm::logreg:
            if (spec.get("lambda") < 0) throw ConfigError("logreg.lambda must be >= 0");
            if (spec.get("tol") <= 0) throw ConfigError("logreg.tol must be > 0");
            require_integer(a, "max_iter", spec.get("max_iter"), 1);
            break;
        case Algorithm::svm:
            if (spec.get("C") <= 0) throw ConfigError("svm.C must be > 0");
            require_integer(a, "epochs", spec.get("epochs"), 1);
            break;
        case Algorithm::rf:
            require_integer(a, "trees", spec.get("trees"), 1);
            require_integer(a, "max_depth", spec.get("max_depth"), 0);
            require_integer(a, "max_features", spec.get("max_features"), 0);
            break;
        }
    }
}

ExperimentConfig parse_config(std::string_view toml_text, const fs::path& base_dir)
{
    toml::table root;
    try {
        root = toml::parse(toml_text);
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << "line " << e.source().begin.line << ": " << e.description();
        throw ConfigError(msg.str());
    }

    const fs::path base = fs::absolute(base_dir);
    ExperimentConfig c;

    for (const auto& [key, node] : root) {
        const std::string_view k = key.str();
        if (!kRunKeys.contains(k) && !kDatasetKeys.contains(k)) fail(node, "unknown key '" + std::string(k) + "'");
    }

    const bool top_level_dataset = root.contains("corpus") || root.contains("embeddings");
    if (top_level_dataset && root.contains("datasets"))
        throw ConfigError("use either top-level corpus/embeddings or [[datasets]], not both");
    if (top_level_dataset) {
        c.datasets.push_back(parse_dataset(root, base, true));
    } else if (const auto* arr = root["datasets"].as_array()) {
        for (const auto& item : *arr) {
            const auto* t = item.as_table();
            if (!t) fail(item, "datasets entries must be tables");
            c.datasets.push_back(parse_dataset(*t, base, false));
        }
    } else {
        for (const auto k : kDatasetKeys)
            if (root.contains(k)) fail(*root.get(k), "dataset key '" + std::string(k) + "' given without corpus/embeddings");
        throw ConfigError("config must name a corpus and embeddings");
    }

    try {
        if (const auto* n = root.get("algorithms"))
            c.algorithms = get_list<Algorithm>(*n, "algorithms", [](const toml::node& i) {
                return parse_algorithm(get_string(i, "algorithms"));
            });
        if (const auto* n = root.get("modes"))
            c.modes = get_list<FeatureMode>(*n, "modes", [](const toml::node& i) { return parse_mode(get_string(i, "modes")); });
        if (const auto* n = root.get("k")) {
            const auto v = get_int(*n, "k");
            if (v < 2 || v > 1000) fail(*n, "k must be between 2 and 1000");
            c.k = static_cast<int>(v);
        }
        if (const auto* n = root.get("seed")) {
            const auto v = get_int(*n, "seed");
            if (v < 0) fail(*n, "seed must be non-negative");
            c.seed = static_cast<std::uint64_t>(v);
        }
        if (const auto* n = root.get("pca_percentages")) {
            c.pca_percentages = get_list<int>(*n, "pca_percentages", [](const toml::node& i) {
                const auto v = get_int(i, "pca_percentages");
                if (!is_allowed_variance_pct(static_cast<int>(v)))
                    throw std::invalid_argument(std::to_string(v) + " is not one of 25, 50, 75, 95, 100");
                return static_cast<int>(v);
            });
            std::sort(c.pca_percentages.begin(), c.pca_percentages.end());
        }
        if (const auto* n = root.get("removed_groups")) {
            const auto groups = get_list<FeatureGroup>(*n, "removed_groups", [](const toml::node& i) {
                return parse_group(get_string(i, "removed_groups"));
            });
            c.removed_groups = {groups.begin(), groups.end()};
        }
        if (const auto* n = root.get("output")) c.output = resolve(base, get_string(*n, "output"));
        else c.output = resolve(base, c.output.string());
        if (const auto* n = root.get("mwu_pairing")) {
            try {
                c.pairing = parse_pairing(get_string(*n, "mwu_pairing"));
            } catch (const std::invalid_argument& e) {
                fail(*n, e.what());
            }
        }
        for (const Algorithm a : {Algorithm::logreg, Algorithm::svm, Algorithm::rf}) {
            const auto* n = root.get(to_string(a));
            if (!n) continue;
            const auto* t = n->as_table();
            if (!t) fail(*n, std::string(to_string(a)) + " must be a table");
            for (const auto& [key, value] : *t) c.hyperparameters[a][std::string(key.str())] = get_number(value, key.str());
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return c;
}

ExperimentConfig load_config(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config: " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), fs::absolute(path).parent_path());
}

namespace {

toml::array string_array(const auto& values)
{
    toml::array out;
    for (const auto& v : values) out.push_back(std::string(to_string(v)));
    return out;
}

} // namespace

std::string to_toml(const ExperimentConfig& config)
{
    toml::table root;
    toml::array datasets;
    for (const auto& d : config.datasets) {
        toml::table t;
        t.insert("name", d.name);
        t.insert("corpus", d.corpus.string());
        t.insert("embeddings", d.embeddings.string());
        if (d.lexicon) t.insert("lexicon", d.lexicon->string());
        t.insert("profile", std::string(to_string(d.profile)));
        datasets.push_back(std::move(t));
    }
    root.insert("datasets", std::move(datasets));
    root.insert("algorithms", string_array(config.algorithms));
    root.insert("modes", string_array(config.modes));
    root.insert("k", config.k);
    root.insert("seed", static_cast<std::int64_t>(config.seed));
    toml::array pcts;
    for (const int p : config.pca_percentages) pcts.push_back(p);
    root.insert("pca_percentages", std::move(pcts));
    root.insert("removed_groups", string_array(config.removed_groups));
    root.insert("mwu_pairing", std::string(to_string(config.pairing)));
    for (const Algorithm a : {Algorithm::logreg, Algorithm::svm, Algorithm::rf}) {
        toml::table t;
        for (const auto& [key, value] : config.model_spec(a).hyperparameters) {
            if (value == std::floor(value) && std::abs(value) < 9e15) t.insert(key, static_cast<std::int64_t>(value));
            else t.insert(key, value);
        }
        root.insert(to_string(a), std::move(t));
    }
    std::ostringstream out;
    out << root << '\n';
    return out.str();
}

nlohmann::json to_json(const ExperimentConfig& config)
{
    nlohmann::json j;
    auto datasets = nlohmann::json::array();
    for (const auto& d : config.datasets) {
        nlohmann::json dj = {
            {"name", d.name},
            {"corpus", d.corpus.string()},
            {"embeddings", d.embeddings.string()},
            {"profile", to_string(d.profile)},
        };
        dj["lexicon"] = d.lexicon ? nlohmann::json(d.lexicon->string()) : nlohmann::json(nullptr);
        datasets.push_back(std::move(dj));
    }
    j["datasets"] = std::move(datasets);
    for (const auto a : config.algorithms) j["algorithms"].push_back(to_string(a));
    for (const auto m : config.modes) j["modes"].push_back(to_string(m));
    j["k"] = config.k;
    j["seed"] = config.seed;
    j["pca_percentages"] = config.pca_percentages;
    j["removed_groups"] = nlohmann::json::array();
    for (const auto g : config.removed_groups) j["removed_groups"].push_back(to_string(g));
    j["mwu_pairing"] = to_string(config.pairing);
    for (const Algorithm a : {Algorithm::logreg, Algorithm::svm, Algorithm::rf})
        j["hyperparameters"][std::string(to_string(a))] = config.model_spec(a).hyperparameters;
    return j;
}

} // namespace readlab
