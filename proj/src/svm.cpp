#include "readlab/error.hpp"
#include "readlab/models.hpp"
#include "readlab/random.hpp"

#include <limits>
#include <numeric>
#include <set>

namespace readlab {

double svm_objective(const Eigen::VectorXd& w, const Eigen::MatrixXd& X, std::span<const int> y, double lambda)
{
    const auto d = X.cols();
    const Eigen::VectorXd margins = (X * w.head(d)).array() + w(d);
    double hinge = 0.0;
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        hinge += std::max(0.0, 1.0 - y[static_cast<std::size_t>(i)] * margins(i));
    return 0.5 * lambda * w.squaredNorm() + hinge / static_cast<double>(X.rows());
}

// Pegasos-style subgradient descent per class with step 1 / (lambda t).
// Each epoch's iterates are averaged; the class keeps the epoch average with
// the lowest primal objective seen so far.
LinearSvmModel train_svm(const Dataset& data, const ModelSpec& spec)
{
    const std::set<int> present(data.y.begin(), data.y.end());
    if (present.size() < 2) throw TrainingError("training data contains fewer than 2 classes");

    const auto n = data.rows();
    const auto d = data.cols();
    const int K = data.num_classes();
    const double C = spec.get("C");
    const int epochs = std::max(1, static_cast<int>(spec.get("epochs")));
    const double lambda = 1.0 / (static_cast<double>(n) * C);

    Eigen::MatrixXd Xa(n, d + 1);
    Xa.leftCols(d) = data.X;
    Xa.col(d).setOnes();

    LinearSvmModel m;
    m.weights = Eigen::MatrixXd::Zero(K, d);
    m.bias = Eigen::VectorXd::Zero(K);
    m.objective_trace.resize(static_cast<std::size_t>(K));

    SplitMix64 rng(spec.seed);
    std::vector<int> order(static_cast<std::size_t>(n));

    for (int c = 0; c < K; ++c) {
        std::vector<int> yb(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) yb[static_cast<std::size_t>(i)] = data.y[static_cast<std::size_t>(i)] == c ? 1 : -1;

        Eigen::VectorXd w = Eigen::VectorXd::Zero(d + 1);
        Eigen::VectorXd best = w;
        double best_objective = std::numeric_limits<double>::infinity();
        long long t = 0;
        for (int e = 0; e < epochs; ++e) {
            std::iota(order.begin(), order.end(), 0);
            rng.shuffle(std::span<int>(order));
            Eigen::VectorXd sum = Eigen::VectorXd::Zero(d + 1);
            for (const int i : order) {
                ++t;
                const double eta = 1.0 / (lambda * static_cast<double>(t));
                const double yi = yb[static_cast<std::size_t>(i)];
                const double margin = yi * Xa.row(i).dot(w);
                w *= 1.0 - eta * lambda;
                if (margin < 1.0) w.noalias() += (eta * yi) * Xa.row(i).transpose();
                sum += w;
            }
            const Eigen::VectorXd epoch_avg = sum / static_cast<double>(n);
            const double objective = svm_objective(epoch_avg, data.X, yb, lambda);
            if (objective < best_objective) {
                best_objective = objective;
                best = epoch_avg;
            }
            m.objective_trace[static_cast<std::size_t>(c)].push_back(best_objective);
        }
        m.weights.row(c) = best.head(d).transpose();
        m.bias(c) = best(d);
    }
    if (!m.weights.allFinite() || !m.bias.allFinite()) throw TrainingError("SVM training diverged");
    return m;
}

Eigen::MatrixXd predict_scores(const LinearSvmModel& model, const Eigen::MatrixXd& X)
{
    if (X.cols() != model.num_features())
        throw std::invalid_argument("svm expects " + std::to_string(model.num_features()) + " features, got " +
                                    std::to_string(X.cols()));
    return (X * model.weights.transpose()).rowwise() + model.bias.transpose();
}

std::vector<int> predict(const LinearSvmModel& model, const Eigen::MatrixXd& X)
{
    return argmax_rows(predict_scores(model, X));
}

} // namespace readlab
