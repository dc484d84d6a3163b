#include "readlab/eval.hpp"

#include <algorithm>
#include <stdexcept>

namespace readlab {

Eigen::MatrixXi confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred, int num_classes)
{
    if (y_true.size() != y_pred.size()) throw std::invalid_argument("confusion_matrix: length mismatch");
    Eigen::MatrixXi cm = Eigen::MatrixXi::Zero(num_classes, num_classes);
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] < 0 || y_true[i] >= num_classes || y_pred[i] < 0 || y_pred[i] >= num_classes)
            throw std::invalid_argument("confusion_matrix: label out of range");
        ++cm(y_true[i], y_pred[i]);
    }
    return cm;
}

double weighted_f1(std::span<const int> y_true, std::span<const int> y_pred)
{
    if (y_true.size() != y_pred.size()) throw std::invalid_argument("weighted_f1: length mismatch");
    if (y_true.empty()) throw std::invalid_argument("weighted_f1: empty input");

    const int hi = std::max(*std::max_element(y_true.begin(), y_true.end()), *std::max_element(y_pred.begin(), y_pred.end()));
    const int lo = std::min(*std::min_element(y_true.begin(), y_true.end()), *std::min_element(y_pred.begin(), y_pred.end()));
    if (lo < 0) throw std::invalid_argument("weighted_f1: negative label");

    const auto K = static_cast<std::size_t>(hi + 1);
    std::vector<long long> tp(K, 0), fp(K, 0), fn(K, 0), support(K, 0);
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const auto t = static_cast<std::size_t>(y_true[i]);
        const auto p = static_cast<std::size_t>(y_pred[i]);
        ++support[t];
        if (t == p) {
            ++tp[t];
        } else {
            ++fp[p];
            ++fn[t];
        }
    }
    double total = 0.0;
    for (std::size_t c = 0; c < K; ++c) {
        if (support[c] == 0) continue;
        const long long denom = 2 * tp[c] + fp[c] + fn[c];
        const double f1 = denom > 0 ? 2.0 * static_cast<double>(tp[c]) / static_cast<double>(denom) : 0.0;
        total += static_cast<double>(support[c]) * f1;
    }
    return total / static_cast<double>(y_true.size());
}

} // namespace readlab
