#pragma once

#include "readlab/dataset.hpp"
#include "readlab/models.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace readlab {

// --------------------------------------------------------------------------
// Folds

/// Fold index per document. Within each class (ascending class index) the
/// documents are shuffled with one SplitMix64 stream and dealt round-robin;
/// the deal continues across classes so fold sizes differ by at most one.
struct FoldPlan {
    int k = 0;
    std::uint64_t seed = 0;
    std::vector<int> assignments;
    std::vector<std::string> warnings;

    std::vector<int> train_rows(int fold) const;
    std::vector<int> test_rows(int fold) const;
};

/// Throws std::invalid_argument when k < 2 or k exceeds the number of documents.
/// Classes with fewer than k members produce a warning.
FoldPlan stratified_kfold(std::span<const int> y, int k, std::uint64_t seed);

// --------------------------------------------------------------------------
// Metrics

/// K x K counts, rows = true class, columns = predicted class.
Eigen::MatrixXi confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred, int num_classes);

/// Support-weighted mean of per-class F1 = 2TP / (2TP + FP + FN), with F1 = 0
/// when the denominator vanishes.
double weighted_f1(std::span<const int> y_true, std::span<const int> y_pred);

// --------------------------------------------------------------------------
// Cross-validation

struct FoldResult {
    int fold = 0;
    bool skipped = false;
    std::string notice;
    double weighted_f1 = 0.0;
    std::size_t train_size = 0;
    std::size_t test_size = 0;
    Eigen::Index input_dims = 0;    ///< columns before PCA
    Eigen::Index retained_dims = 0; ///< columns the classifier saw
    Eigen::VectorXd scaler_mean;    ///< fitted on training rows only
    Eigen::VectorXd scaler_std;
    std::vector<int> test_rows;
    std::vector<int> predictions;
};

struct EvalSetup {
    std::string dataset;
    FeatureMode mode = FeatureMode::combined;
    Algorithm algorithm = Algorithm::logreg;
    std::string registry;
    std::optional<int> pca_pct;
};

struct EvalReport {
    EvalSetup setup;
    std::vector<FoldResult> folds;
    double mean_f1 = 0.0;           ///< over folds that were not skipped
    Eigen::MatrixXi confusion;      ///< summed over evaluated folds
    std::vector<std::string> warnings;

    std::vector<double> fold_scores() const;
    double mean_retained_dims() const;
};

/// Scaler (and PCA when `pca_pct` < 100) fitted on `train_rows`, model
/// trained, `test_rows` predicted. A training split with a single class is
/// returned as skipped. `pca_pct` = 100 keeps every feature.
FoldResult evaluate_fold(const Dataset& data, const ModelSpec& spec, std::span<const int> train_rows,
                         std::span<const int> test_rows, std::optional<int> pca_pct = std::nullopt);

EvalReport cross_validate(const Dataset& data, const ModelSpec& spec, const FoldPlan& plan,
                          std::optional<int> pca_pct = std::nullopt, EvalSetup setup = {});

/// With `audit`, per-fold scaler statistics are included.
nlohmann::json to_json(const EvalReport& report, bool audit = true);

// --------------------------------------------------------------------------
// Significance tests

enum class TestMethod { exact, normal_approximation, f_distribution };

std::string_view to_string(TestMethod method);

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    TestMethod method = TestMethod::exact;
    std::size_t n_a = 0;
    std::size_t n_b = 0;
};

/// Largest combined sample size for the exact Mann-Whitney null distribution.
inline constexpr std::size_t kExactMannWhitneyLimit = 30;

/// U_a = R_a - n_a (n_a + 1) / 2 from midranks of the pooled sample.
double mann_whitney_u_a(std::span<const double> a, std::span<const double> b);

/// Two-tailed Mann-Whitney U test; statistic = min(U_a, U_b). Exact null
/// distribution (dynamic programming over rank sums) when n_a + n_b <= 30
/// and there are no ties, else the normal approximation with tie-corrected
/// variance and continuity correction. p is capped at 1. `method` forces
/// one of the two (exact is rejected for tied samples).
TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                          std::optional<TestMethod> method = std::nullopt);

/// Median-centered Levene test (absolute deviations from each group's
/// median, one-way ANOVA F with (1, n - 2) degrees of freedom).
TestResult variance_equality(std::span<const double> a, std::span<const double> b);

nlohmann::json to_json(const TestResult& result);

} // namespace readlab
