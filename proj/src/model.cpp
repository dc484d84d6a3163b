#include "readlab/error.hpp"
#include "readlab/models.hpp"

namespace readlab {

namespace {

constexpr int kModelFormatVersion = 1;

const std::map<std::string, double>& default_hyperparameters(Algorithm a)
{
    static const std::map<std::string, double> logreg = {{"lambda", 1e-4}, {"tol", 1e-6}, {"max_iter", 1000}};
    static const std::map<std::string, double> svm = {{"C", 1.0}, {"epochs", 100}};
    static const std::map<std::string, double> rf = {{"trees", 100}, {"max_depth", 0}, {"max_features", 0}};
    switch (a) {
    case Algorithm::logreg: return logreg;
    case Algorithm::svm: return svm;
    case Algorithm::rf: return rf;
    }
    return logreg;
}

nlohmann::json matrix_json(const Eigen::MatrixXd& m)
{
    auto out = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        std::vector<double> row(static_cast<std::size_t>(m.cols()));
        for (Eigen::Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
        out.push_back(row);
    }
    return out;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j)
{
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (static_cast<Eigen::Index>(j[static_cast<std::size_t>(i)].size()) != cols) throw DataError("ragged matrix in model");
        for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = j[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)].get<double>();
    }
    return m;
}

nlohmann::json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vector_from_json(const nlohmann::json& j)
{
    const auto values = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

} // namespace

Algorithm parse_algorithm(std::string_view name)
{
    if (name == "logreg") return Algorithm::logreg;
    if (name == "svm") return Algorithm::svm;
    if (name == "rf") return Algorithm::rf;
    throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

std::string_view to_string(Algorithm algorithm)
{
    switch (algorithm) {
    case Algorithm::logreg: return "logreg";
    case Algorithm::svm: return "svm";
    case Algorithm::rf: return "rf";
    }
    return "?";
}

ModelSpec ModelSpec::defaults(Algorithm algorithm, std::uint64_t seed)
{
    return ModelSpec{algorithm, default_hyperparameters(algorithm), seed};
}

double ModelSpec::get(const std::string& key) const
{
    if (const auto it = hyperparameters.find(key); it != hyperparameters.end()) return it->second;
    const auto& defaults = default_hyperparameters(algorithm);
    if (const auto it = defaults.find(key); it != defaults.end()) return it->second;
    throw ConfigError("unknown hyperparameter '" + key + "' for " + std::string(to_string(algorithm)));
}

std::vector<int> argmax_rows(const Eigen::MatrixXd& scores)
{
    std::vector<int> out(static_cast<std::size_t>(scores.rows()), 0);
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        int best = 0;
        for (Eigen::Index c = 1; c < scores.cols(); ++c)
            if (scores(i, c) > scores(i, best)) best = static_cast<int>(c);
        out[static_cast<std::size_t>(i)] = best;
    }
    return out;
}

Model train(const Dataset& data, const ModelSpec& spec)
{
    Model m{spec, LogRegModel{}, data.class_names, data.column_names};
    switch (spec.algorithm) {
    case Algorithm::logreg: m.parameters = train_logreg(data, spec); break;
    case Algorithm::svm: m.parameters = train_svm(data, spec); break;
    case Algorithm::rf: m.parameters = train_rf(data, spec); break;
    }
    return m;
}

Eigen::MatrixXd predict_scores(const Model& model, const Eigen::MatrixXd& X)
{
    return std::visit([&](const auto& p) { return predict_scores(p, X); }, model.parameters);
}

std::vector<int> predict(const Model& model, const Eigen::MatrixXd& X)
{
    return std::visit([&](const auto& p) { return predict(p, X); }, model.parameters);
}

nlohmann::json to_json(const Model& model)
{
    nlohmann::json doc;
    doc["format"] = "readability-lab/model";
    doc["version"] = kModelFormatVersion;
    doc["algorithm"] = to_string(model.spec.algorithm);
    doc["seed"] = model.spec.seed;
    doc["hyperparameters"] = model.spec.hyperparameters;
    doc["class_names"] = model.class_names;
    doc["column_names"] = model.column_names;

    nlohmann::json params;
    if (const auto* lr = std::get_if<LogRegModel>(&model.parameters)) {
        params["weights"] = matrix_json(lr->weights);
        params["bias"] = vector_json(lr->bias);
        params["iterations"] = lr->iterations;
        params["converged"] = lr->converged;
    } else if (const auto* svm = std::get_if<LinearSvmModel>(&model.parameters)) {
        params["weights"] = matrix_json(svm->weights);
        params["bias"] = vector_json(svm->bias);
    } else if (const auto* rf = std::get_if<RandomForestModel>(&model.parameters)) {
        params["classes"] = rf->classes;
        params["features"] = rf->features;
        auto trees = nlohmann::json::array();
        for (const auto& tree : rf->trees) {
            nlohmann::json t;
            std::vector<int> feature, left, right;
            std::vector<double> threshold;
            std::vector<std::vector<int>> counts;
            for (const auto& node : tree.nodes) {
                feature.push_back(node.feature);
                threshold.push_back(node.threshold);
                left.push_back(node.left);
                right.push_back(node.right);
                counts.push_back(node.counts);
            }
            t["feature"] = feature;
            t["threshold"] = threshold;
            t["left"] = left;
            t["right"] = right;
            t["counts"] = counts;
            trees.push_back(std::move(t));
        }
        params["trees"] = std::move(trees);
    }
    doc["parameters"] = std::move(params);
    return doc;
}

Model model_from_json(const nlohmann::json& doc)
{
    try {
        if (doc.at("format") != "readability-lab/model") throw DataError("not a readability-lab model document");
        if (doc.at("version").get<int>() != kModelFormatVersion) throw DataError("unsupported model format version");

        Model m;
        m.spec.algorithm = parse_algorithm(doc.at("algorithm").get<std::string>());
        m.spec.seed = doc.at("seed").get<std::uint64_t>();
        m.spec.hyperparameters = doc.at("hyperparameters").get<std::map<std::string, double>>();
        m.class_names = doc.at("class_names").get<std::vector<std::string>>();
        m.column_names = doc.at("column_names").get<std::vector<std::string>>();
        const auto& p = doc.at("parameters");

        switch (m.spec.algorithm) {
        case Algorithm::logreg: {
            LogRegModel lr;
            lr.weights = matrix_from_json(p.at("weights"));
            lr.bias = vector_from_json(p.at("bias"));
            lr.iterations = p.value("iterations", 0);
            lr.converged = p.value("converged", false);
            m.parameters = std::move(lr);
            break;
        }
        case Algorithm::svm: {
            LinearSvmModel svm;
            svm.weights = matrix_from_json(p.at("weights"));
            svm.bias = vector_from_json(p.at("bias"));
            m.parameters = std::move(svm);
            break;
        }
        case Algorithm::rf: {
            RandomForestModel rf;
            rf.classes = p.at("classes").get<int>();
            rf.features = p.at("features").get<Eigen::Index>();
            for (const auto& t : p.at("trees")) {
                DecisionTree tree;
                const auto feature = t.at("feature").get<std::vector<int>>();
                const auto threshold = t.at("threshold").get<std::vector<double>>();
                const auto left = t.at("left").get<std::vector<int>>();
                const auto right = t.at("right").get<std::vector<int>>();
                const auto counts = t.at("counts").get<std::vector<std::vector<int>>>();
                const auto n = feature.size();
                if (threshold.size() != n || left.size() != n || right.size() != n || counts.size() != n)
                    throw DataError("inconsistent tree arrays");
                for (std::size_t i = 0; i < n; ++i)
                    tree.nodes.push_back(DecisionTree::Node{feature[i], threshold[i], left[i], right[i], counts[i]});
                rf.trees.push_back(std::move(tree));
            }
            m.parameters = std::move(rf);
            break;
        }
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed model document: ") + e.what());
    }
}

} // namespace readlab
