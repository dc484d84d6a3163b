#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace readlab {

enum class FeatureMode { ling_only, emb_only, combined };

FeatureMode parse_mode(std::string_view name);
std::string_view to_string(FeatureMode mode);

/// Named feature columns, one row per document.
struct FeatureBlock {
    std::vector<std::string> column_names;
    Eigen::MatrixXd values;

    Eigen::Index cols() const { return values.cols(); }
};

/// Design matrix and labels. Linguistic columns come first; embedding
/// columns (`emb_0`, `emb_1`, ...) start at `block_boundary`.
struct Dataset {
    Eigen::MatrixXd X;
    std::vector<int> y;
    std::vector<std::string> column_names;
    Eigen::Index block_boundary = 0;
    std::vector<std::string> class_names;

    Eigen::Index rows() const { return X.rows(); }
    Eigen::Index cols() const { return X.cols(); }
    int num_classes() const { return static_cast<int>(class_names.size()); }

    /// Rows picked by index, in the given order.
    Dataset subset(std::span<const int> rows) const;
};

/// Throws std::invalid_argument on a row-count mismatch, an empty block the
/// mode needs, or labels outside `class_names`. Empty `class_names` become
/// "0", "1", ... up to the largest label.
Dataset assemble(const FeatureBlock& ling, const Eigen::MatrixXd& emb, std::vector<int> labels, FeatureMode mode,
                 std::vector<std::string> class_names = {});

/// CSV with header `column_names..., label`; a `# classes: a,b,...` line
/// precedes the header.
void write_dataset_csv(const std::filesystem::path& path, const Dataset& data);
Dataset read_dataset_csv(const std::filesystem::path& path);

// --------------------------------------------------------------------------
// Scaling

/// Columnwise z-scoring with statistics from the fit rows only. Uses the
/// population standard deviation; columns whose std is below 1e-12 map to 0.
template <typename Scalar>
class Scaler {
public:
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    static constexpr Scalar kDegenerateStd = Scalar(1e-12);

    Scaler() = default;
    Scaler(Vector mean, Vector std) : mean_(std::move(mean)), std_(std::move(std)) {}

    template <typename Derived>
    static Scaler fit(const Eigen::MatrixBase<Derived>& X)
    {
        if (X.rows() < 2) throw std::invalid_argument("Scaler::fit needs at least 2 rows");
        const Vector mean = X.colwise().mean().transpose();
        const Matrix centered = X.rowwise() - mean.transpose();
        const Vector var = centered.colwise().squaredNorm().transpose() / static_cast<Scalar>(X.rows());
        return Scaler(mean, var.cwiseSqrt());
    }

    template <typename Derived>
    Matrix transform(const Eigen::MatrixBase<Derived>& X) const
    {
        if (X.cols() != mean_.size()) throw std::invalid_argument("Scaler::transform: column count mismatch");
        Matrix out = X.rowwise() - mean_.transpose();
        for (Eigen::Index j = 0; j < out.cols(); ++j) {
            if (std_(j) < kDegenerateStd) out.col(j).setZero();
            else out.col(j) /= std_(j);
        }
        return out;
    }

    const Vector& mean() const { return mean_; }
    const Vector& stddev() const { return std_; }

private:
    Vector mean_;
    Vector std_;
};

template <typename Derived>
Scaler<typename Derived::Scalar> fit_scaler(const Eigen::MatrixBase<Derived>& X)
{
    return Scaler<typename Derived::Scalar>::fit(X);
}

template <typename Scalar, typename Derived>
auto apply_scaler(const Scaler<Scalar>& scaler, const Eigen::MatrixBase<Derived>& X)
{
    return scaler.transform(X);
}

// --------------------------------------------------------------------------
// PCA

inline constexpr std::array<int, 5> kVariancePercentages = {25, 50, 75, 95, 100};

inline bool is_allowed_variance_pct(int pct)
{
    return std::find(kVariancePercentages.begin(), kVariancePercentages.end(), pct) != kVariancePercentages.end();
}

/// Principal axes of a centered data matrix. `components` rows are
/// orthonormal, sorted by decreasing explained variance; each row's
/// largest-magnitude coordinate is positive.
template <typename Scalar>
struct PcaModel {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    Matrix components;          ///< k x d
    Vector explained_variance;  ///< sample variance (n - 1) along each component
    Vector explained_ratio;     ///< share of total variance per component
    Vector mean;                ///< d

    Eigen::Index num_components() const { return components.rows(); }

    template <typename Derived>
    Matrix transform(const Eigen::MatrixBase<Derived>& X) const
    {
        if (X.cols() != mean.size()) throw std::invalid_argument("PCA transform: column count mismatch");
        return (X.rowwise() - mean.transpose()) * components.transpose();
    }

    template <typename Derived>
    Matrix inverse_transform(const Eigen::MatrixBase<Derived>& Z) const
    {
        if (Z.cols() != components.rows()) throw std::invalid_argument("PCA inverse_transform: component count mismatch");
        return (Z * components).rowwise() + mean.transpose();
    }
};

/// Fits PCA through a thin SVD of the centered matrix and keeps the smallest
/// number of components whose cumulative explained-variance ratio reaches
/// `variance_pct` / 100. At 100 every component with nonzero variance is kept.
template <typename Derived>
PcaModel<typename Derived::Scalar> pca_fit(const Eigen::MatrixBase<Derived>& X, int variance_pct)
{
    using Scalar = typename Derived::Scalar;
    using Model = PcaModel<Scalar>;
    using Matrix = typename Model::Matrix;
    using Vector = typename Model::Vector;

    if (X.rows() < 2) throw std::invalid_argument("pca_fit needs at least 2 rows");
    if (!is_allowed_variance_pct(variance_pct))
        throw std::invalid_argument("variance percentage must be one of 25, 50, 75, 95, 100");

    Model model;
    model.mean = X.colwise().mean().transpose();
    const Matrix centered = X.rowwise() - model.mean.transpose();

    Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinV);
    const Vector& sv = svd.singularValues();
    const Scalar smax = sv.size() > 0 ? sv(0) : Scalar(0);
    const Scalar cutoff = smax * static_cast<Scalar>(std::max(X.rows(), X.cols())) * std::numeric_limits<Scalar>::epsilon();

    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > cutoff) ++rank;

    const Vector variance = sv.head(rank).array().square() / static_cast<Scalar>(X.rows() - 1);
    const Scalar total = variance.sum();

    Eigen::Index keep = rank;
    if (variance_pct < 100 && rank > 0) {
        const Scalar target = static_cast<Scalar>(variance_pct) / Scalar(100);
        Scalar cumulative = 0;
        for (Eigen::Index i = 0; i < rank; ++i) {
            cumulative += variance(i) / total;
            if (cumulative >= target - Scalar(1e-12)) {
                keep = i + 1;
                break;
            }
        }
    }

    model.components = svd.matrixV().leftCols(keep).transpose();
    for (Eigen::Index i = 0; i < keep; ++i) {
        Eigen::Index arg = 0;
        model.components.row(i).cwiseAbs().maxCoeff(&arg);
        if (model.components(i, arg) < 0) model.components.row(i) *= Scalar(-1);
    }
    model.explained_variance = variance.head(keep);
    model.explained_ratio = keep > 0 ? Vector(variance.head(keep) / total) : Vector();
    return model;
}

template <typename Scalar, typename Derived>
auto pca_transform(const PcaModel<Scalar>& model, const Eigen::MatrixBase<Derived>& X)
{
    return model.transform(X);
}

} // namespace readlab
