#include "readlab/error.hpp"
#include "readlab/models.hpp"

#include <cmath>
#include <set>

namespace readlab {

namespace {

void require_two_classes(const Dataset& data)
{
    const std::set<int> present(data.y.begin(), data.y.end());
    if (present.size() < 2) throw TrainingError("training data contains fewer than 2 classes");
}

/// Row-wise log-softmax of a score matrix.
Eigen::MatrixXd log_softmax(const Eigen::MatrixXd& scores)
{
    const Eigen::VectorXd row_max = scores.rowwise().maxCoeff();
    Eigen::MatrixXd shifted = scores.colwise() - row_max;
    const Eigen::VectorXd lse = shifted.array().exp().rowwise().sum().log().matrix();
    shifted.colwise() -= lse;
    return shifted;
}

} // namespace

double logreg_objective(const Eigen::MatrixXd& W, const Eigen::VectorXd& b, const Eigen::MatrixXd& X,
                        std::span<const int> y, double lambda, Eigen::MatrixXd* grad_W, Eigen::VectorXd* grad_b)
{
    const auto n = X.rows();
    const Eigen::MatrixXd scores = (X * W.transpose()).rowwise() + b.transpose();
    const Eigen::MatrixXd logp = log_softmax(scores);

    double nll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) nll -= logp(i, y[static_cast<std::size_t>(i)]);
    const double loss = nll / static_cast<double>(n) + lambda * W.squaredNorm();

    if (grad_W || grad_b) {
        Eigen::MatrixXd residual = logp.array().exp().matrix(); // P - Y
        for (Eigen::Index i = 0; i < n; ++i) residual(i, y[static_cast<std::size_t>(i)]) -= 1.0;
        residual /= static_cast<double>(n);
        if (grad_W) *grad_W = residual.transpose() * X + 2.0 * lambda * W;
        if (grad_b) *grad_b = residual.colwise().sum().transpose();
    }
    return loss;
}

LogRegModel train_logreg(const Dataset& data, const ModelSpec& spec)
{
    require_two_classes(data);
    const double lambda = spec.get("lambda");
    const double tol = spec.get("tol");
    const int max_iter = static_cast<int>(spec.get("max_iter"));
    const int K = data.num_classes();
    const auto d = data.cols();

    LogRegModel m;
    m.weights = Eigen::MatrixXd::Zero(K, d);
    m.bias = Eigen::VectorXd::Zero(K);

    Eigen::MatrixXd gW;
    Eigen::VectorXd gb;
    double f = logreg_objective(m.weights, m.bias, data.X, data.y, lambda, &gW, &gb);
    if (!std::isfinite(f)) throw TrainingError("logistic regression loss is not finite");
    m.loss_trace.push_back(f);

    // Armijo backtracking: accept step t once f(theta - t g) <= f - c t |g|^2.
    constexpr double armijo = 1e-4;
    constexpr double min_step = 1e-20;
    double step = 1.0;

    for (int iter = 0; iter < max_iter; ++iter) {
        const double gnorm2 = gW.squaredNorm() + gb.squaredNorm();
        if (std::sqrt(gnorm2) < tol) {
            m.converged = true;
            break;
        }
        step = std::min(step * 2.0, 1e6);
        Eigen::MatrixXd W_try;
        Eigen::VectorXd b_try;
        double f_try = 0.0;
        bool accepted = false;
        while (step >= min_step) {
            W_try = m.weights - step * gW;
            b_try = m.bias - step * gb;
            f_try = logreg_objective(W_try, b_try, data.X, data.y, lambda);
            if (std::isfinite(f_try) && f_try <= f - armijo * step * gnorm2) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break; // no representable descent step left

        m.weights = std::move(W_try);
        m.bias = std::move(b_try);
        f = logreg_objective(m.weights, m.bias, data.X, data.y, lambda, &gW, &gb);
        m.loss_trace.push_back(f);
        m.iterations = iter + 1;
    }
    if (!m.weights.allFinite() || !m.bias.allFinite()) throw TrainingError("logistic regression diverged");
    return m;
}

Eigen::MatrixXd predict_scores(const LogRegModel& model, const Eigen::MatrixXd& X)
{
    if (X.cols() != model.num_features())
        throw std::invalid_argument("logreg expects " + std::to_string(model.num_features()) + " features, got " +
                                    std::to_string(X.cols()));
    const Eigen::MatrixXd scores = (X * model.weights.transpose()).rowwise() + model.bias.transpose();
    return log_softmax(scores).array().exp().matrix();
}

std::vector<int> predict(const LogRegModel& model, const Eigen::MatrixXd& X) { return argmax_rows(predict_scores(model, X)); }

} // namespace readlab
