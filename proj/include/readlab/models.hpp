#pragma once

#include "readlab/dataset.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace readlab {

enum class Algorithm { logreg, svm, rf };

Algorithm parse_algorithm(std::string_view name);
std::string_view to_string(Algorithm algorithm);

/// Algorithm, hyperparameters and seed of one training run. Missing
/// hyperparameters take the defaults below.
///
///   logreg: lambda = 1e-4, tol = 1e-6, max_iter = 1000
///   svm:    C = 1 (lambda = 1 / (n C)), epochs = 100
///   rf:     trees = 100, max_depth = 0 (unlimited), max_features = 0 (ceil(sqrt d))
struct ModelSpec {
    Algorithm algorithm = Algorithm::logreg;
    std::map<std::string, double> hyperparameters;
    std::uint64_t seed = 0;

    static ModelSpec defaults(Algorithm algorithm, std::uint64_t seed = 0);
    double get(const std::string& key) const;
};

/// Multinomial logistic regression: scores = X W^T + b, softmax probabilities.
struct LogRegModel {
    Eigen::MatrixXd weights; ///< classes x features
    Eigen::VectorXd bias;
    std::vector<double> loss_trace; ///< objective before the first step and after every accepted step
    int iterations = 0;
    bool converged = false;

    Eigen::Index num_features() const { return weights.cols(); }
    int num_classes() const { return static_cast<int>(weights.rows()); }
};

/// One-vs-rest linear SVM; the bias is the last weight on a constant input.
struct LinearSvmModel {
    Eigen::MatrixXd weights; ///< classes x features
    Eigen::VectorXd bias;
    /// Per class, primal objective of the retained epoch average after each epoch.
    std::vector<std::vector<double>> objective_trace;

    Eigen::Index num_features() const { return weights.cols(); }
    int num_classes() const { return static_cast<int>(weights.rows()); }
};

/// CART tree over axis-aligned splits `x[feature] <= threshold` (left).
struct DecisionTree {
    struct Node {
        int feature = -1; ///< -1 for leaves
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        std::vector<int> counts; ///< class histogram of the samples reaching the node
        bool is_leaf() const { return feature < 0; }
    };
    std::vector<Node> nodes; ///< nodes[0] is the root

    /// Class with most samples in the reached leaf, lowest index on ties.
    int predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
    int depth() const;
};

struct RandomForestModel {
    std::vector<DecisionTree> trees;
    int classes = 0;
    Eigen::Index features = 0;

    Eigen::Index num_features() const { return features; }
    int num_classes() const { return classes; }
};

using ModelParameters = std::variant<LogRegModel, LinearSvmModel, RandomForestModel>;

/// Trained model with its provenance.
struct Model {
    ModelSpec spec;
    ModelParameters parameters;
    std::vector<std::string> class_names;
    std::vector<std::string> column_names;
};

LogRegModel train_logreg(const Dataset& data, const ModelSpec& spec);
LinearSvmModel train_svm(const Dataset& data, const ModelSpec& spec);
RandomForestModel train_rf(const Dataset& data, const ModelSpec& spec);
Model train(const Dataset& data, const ModelSpec& spec);

/// logreg: class probabilities; svm: raw class scores; rf: vote shares.
/// Throws std::invalid_argument on a feature-count mismatch.
Eigen::MatrixXd predict_scores(const LogRegModel& model, const Eigen::MatrixXd& X);
Eigen::MatrixXd predict_scores(const LinearSvmModel& model, const Eigen::MatrixXd& X);
Eigen::MatrixXd predict_scores(const RandomForestModel& model, const Eigen::MatrixXd& X);
Eigen::MatrixXd predict_scores(const Model& model, const Eigen::MatrixXd& X);

std::vector<int> predict(const LogRegModel& model, const Eigen::MatrixXd& X);
std::vector<int> predict(const LinearSvmModel& model, const Eigen::MatrixXd& X);
std::vector<int> predict(const RandomForestModel& model, const Eigen::MatrixXd& X);
std::vector<int> predict(const Model& model, const Eigen::MatrixXd& X);

/// Row-wise argmax, lowest column on ties.
std::vector<int> argmax_rows(const Eigen::MatrixXd& scores);

/// Mean softmax cross-entropy plus lambda * ||W||_F^2 (bias unpenalized).
/// Fills the gradient when the output pointers are non-null.
double logreg_objective(const Eigen::MatrixXd& W, const Eigen::VectorXd& b, const Eigen::MatrixXd& X,
                        std::span<const int> y, double lambda, Eigen::MatrixXd* grad_W = nullptr,
                        Eigen::VectorXd* grad_b = nullptr);

/// lambda / 2 * ||w||^2 + mean hinge loss for one binary scorer; `w` holds
/// the feature weights followed by the bias, `y` entries are +1 / -1.
double svm_objective(const Eigen::VectorXd& w, const Eigen::MatrixXd& X, std::span<const int> y, double lambda);

/// Gini impurity 1 - sum p_c^2 of a class histogram.
double gini(std::span<const int> counts);

nlohmann::json to_json(const Model& model);
Model model_from_json(const nlohmann::json& doc);

} // namespace readlab
