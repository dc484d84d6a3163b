// Acceptance gate: one [PASS]/[FAIL] line per criterion, nonzero exit on any failure.

#include "readlab/eval.hpp"
#include "readlab/models.hpp"
#include "readlab/random.hpp"
#include "readlab/runner.hpp"

#include "oracles.hpp"
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace readlab;
using readlab::testing::gaussian;
using readlab::testing::make_dataset;

namespace {

constexpr double kF1Tolerance = 1e-12;
constexpr double kF1Seconds = 1.0;
constexpr int kF1MaxLength = 6;

constexpr double kMwuTolerance = 1e-12;
constexpr double kMwuSeconds = 5.0;
constexpr int kMwuMaxSize = 5;

constexpr int kGradientPoints = 20;
constexpr double kGradientRelError = 1e-4;

constexpr double kOrthonormalTolerance = 1e-8;
constexpr double kReconstructionTolerance = 1e-6;

constexpr int kNullSeeds = 20;
constexpr double kNullCenter = 1.0 / 3.0;
constexpr double kNullHalfWidth = 0.15;

constexpr double kDirectionalMargin = 0.05;
constexpr double kDirectionalSeconds = 120.0;

constexpr double kHygieneAlpha = 0.05;

struct Outcome {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void report(const char* name, const std::function<Outcome()>& check)
{
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = check();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!out.pass) ++failures;
    std::printf("[%s] %s: %s (%.2f s)\n", out.pass ? "PASS" : "FAIL", name, out.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(const char* format, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double train_accuracy(const Dataset& data, const ModelSpec& spec)
{
    const auto scaled = fit_scaler(data.X).transform(data.X);
    Dataset d = data;
    d.X = scaled;
    const auto predicted = predict(train(d, spec), d.X);
    int hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == data.y[i];
    return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

const std::vector<Algorithm> kAlgorithms = {Algorithm::logreg, Algorithm::svm, Algorithm::rf};

// ---------------------------------------------------------------------------

Outcome weighted_f1_oracle()
{
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    long pairs = 0;
    for (int n = 1; n <= kF1MaxLength; ++n) {
        readlab::testing::for_each_labeling(n, 2, [&](const std::vector<int>& truth) {
            readlab::testing::for_each_labeling(n, 2, [&](const std::vector<int>& pred) {
                worst = std::max(worst, std::abs(weighted_f1(truth, pred) - readlab::testing::oracle_weighted_f1(truth, pred)));
                ++pairs;
            });
        });
    }
    const double secs = seconds_since(start);
    return {worst <= kF1Tolerance && secs < kF1Seconds,
            fmt("%ld label pairs, max |diff| %.3g (tol %.0e), %.3f s (limit %.0f s)", pairs, worst, kF1Tolerance, secs, kF1Seconds)};
}

Outcome mann_whitney_oracle()
{
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    long cases = 0;
    bool methods_ok = true;
    for (int na = 1; na <= kMwuMaxSize; ++na) {
        for (int nb = 1; nb <= kMwuMaxSize; ++nb) {
            const int n = na + nb;
            // Every assignment of the pooled ranks 1..n to the two samples.
            for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
                if (__builtin_popcount(mask) != na) continue;
                std::vector<double> a, b;
                for (int r = 0; r < n; ++r) ((mask >> r) & 1u ? a : b).push_back(r + 1.0);
                const auto result = mann_whitney_u(a, b);
                methods_ok = methods_ok && result.method == TestMethod::exact;
                worst = std::max(worst, std::abs(result.p_value - readlab::testing::oracle_mwu_exact_p(a, b)));
                ++cases;
            }
        }
    }
    const double small = mann_whitney_u(std::vector<double>{1, 2}, std::vector<double>{3, 4}).p_value;
    const double secs = seconds_since(start);
    const bool pass = worst <= kMwuTolerance && std::abs(small - 1.0 / 3.0) <= kMwuTolerance && methods_ok && secs < kMwuSeconds;
    return {pass, fmt("%ld rank arrangements, max |diff| %.3g (tol %.0e); p([1,2],[3,4]) = %.15f; %.3f s (limit %.0f s)", cases, worst,
                      kMwuTolerance, small, secs, kMwuSeconds)};
}

Outcome logreg_numerics()
{
    SplitMix64 rng(2024);
    double worst = 0.0;
    for (int point = 0; point < kGradientPoints; ++point) {
        const int n = 12, d = 5, k = 3;
        Eigen::MatrixXd X(n, d), W(k, d);
        Eigen::VectorXd b(k);
        std::vector<int> y(n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < d; ++j) X(i, j) = gaussian(rng);
            y[static_cast<std::size_t>(i)] = static_cast<int>(rng.uniform_index(k));
        }
        for (int c = 0; c < k; ++c) {
            b(c) = gaussian(rng);
            for (int j = 0; j < d; ++j) W(c, j) = gaussian(rng);
        }
        const double lambda = 1e-2;
        Eigen::MatrixXd gW;
        Eigen::VectorXd gb;
        logreg_objective(W, b, X, y, lambda, &gW, &gb);

        const double h = 1e-5;
        Eigen::MatrixXd fdW(k, d);
        Eigen::VectorXd fdb(k);
        for (int c = 0; c < k; ++c) {
            for (int j = 0; j < d; ++j) {
                Eigen::MatrixXd Wp = W, Wm = W;
                Wp(c, j) += h;
                Wm(c, j) -= h;
                fdW(c, j) = (logreg_objective(Wp, b, X, y, lambda) - logreg_objective(Wm, b, X, y, lambda)) / (2 * h);
            }
            Eigen::VectorXd bp = b, bm = b;
            bp(c) += h;
            bm(c) -= h;
            fdb(c) = (logreg_objective(W, bp, X, y, lambda) - logreg_objective(W, bm, X, y, lambda)) / (2 * h);
        }
        const double diff = std::sqrt((gW - fdW).squaredNorm() + (gb - fdb).squaredNorm());
        const double scale = std::max(std::sqrt(fdW.squaredNorm() + fdb.squaredNorm()), 1e-12);
        worst = std::max(worst, diff / scale);
    }

    const auto toy = readlab::testing::toy_dataset();
    const auto model = train_logreg(toy, ModelSpec::defaults(Algorithm::logreg, 42));
    bool monotone = model.loss_trace.size() >= 2;
    for (std::size_t i = 1; i < model.loss_trace.size(); ++i) monotone = monotone && model.loss_trace[i] <= model.loss_trace[i - 1];

    return {worst < kGradientRelError && monotone,
            fmt("%d points, max relative gradient error %.3g (limit %.0e); toy loss trace %s over %zu steps (%.4f -> %.4f)",
                kGradientPoints, worst, kGradientRelError, monotone ? "non-increasing" : "INCREASES", model.loss_trace.size(),
                model.loss_trace.front(), model.loss_trace.back())};
}

Outcome pca_properties()
{
    double ortho = 0.0, recon = 0.0;
    SplitMix64 rng(77);
    std::vector<Eigen::MatrixXd> inputs;
    for (int t = 0; t < 10; ++t) {
        const auto rows = 4 + static_cast<Eigen::Index>(rng.uniform_index(30));
        const auto cols = 2 + static_cast<Eigen::Index>(rng.uniform_index(40));
        Eigen::MatrixXd X(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j) X(i, j) = (1.0 + static_cast<double>(j % 5)) * gaussian(rng);
        inputs.push_back(X);
    }
    inputs.push_back(readlab::testing::toy_dataset().X);

    for (const auto& X : inputs) {
        for (const int pct : kVariancePercentages) {
            const auto model = pca_fit(X, pct);
            const auto k = model.num_components();
            ortho = std::max(ortho, (model.components * model.components.transpose() - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff());
        }
        const auto full = pca_fit(X, 100);
        recon = std::max(recon, (full.inverse_transform(full.transform(X)) - X).cwiseAbs().maxCoeff());
    }

    const auto rank1 = pca_fit(Eigen::MatrixXd{{1, 1}, {2, 2}, {3, 3}, {4, 4}}, 25);
    const bool rank1_ok = rank1.num_components() == 1 && std::abs(rank1.explained_ratio(0) - 1.0) < 1e-12;

    return {ortho <= kOrthonormalTolerance && recon < kReconstructionTolerance && rank1_ok,
            fmt("orthonormality error %.3g (tol %.0e), pct-100 reconstruction error %.3g (tol %.0e), rank-1 fixture k=%ld ratio %.12f",
                ortho, kOrthonormalTolerance, recon, kReconstructionTolerance, static_cast<long>(rank1.num_components()),
                rank1.explained_ratio(0))};
}

Outcome classifier_sanity()
{
    const auto separable = readlab::testing::separable_fixture(40, 5, 31);
    const auto plan = stratified_kfold(separable.y, 5, 31);
    bool pass = true;
    std::string detail = "separable 40 docs:";
    for (const auto a : kAlgorithms) {
        const auto spec = ModelSpec::defaults(a, 31);
        const double acc = train_accuracy(separable, spec);
        const double f1 = cross_validate(separable, spec, plan).mean_f1;
        pass = pass && acc == 1.0 && f1 == 1.0;
        detail += fmt(" %s train acc %.3f cv F1 %.3f;", std::string(to_string(a)).c_str(), acc, f1);
    }
    detail += fmt(" permutation null over %d seeds:", kNullSeeds);
    for (const auto a : kAlgorithms) {
        double sum = 0.0;
        for (int s = 0; s < kNullSeeds; ++s) {
            const auto data = readlab::testing::permutation_null_fixture(20, 5, static_cast<std::uint64_t>(s));
            sum += cross_validate(data, ModelSpec::defaults(a, static_cast<std::uint64_t>(s)), stratified_kfold(data.y, 5, static_cast<std::uint64_t>(s))).mean_f1;
        }
        const double mean = sum / kNullSeeds;
        pass = pass && std::abs(mean - kNullCenter) <= kNullHalfWidth;
        detail += fmt(" %s %.3f", std::string(to_string(a)).c_str(), mean);
    }
    detail += fmt(" (target %.3f +/- %.2f)", kNullCenter, kNullHalfWidth);
    return {pass, detail};
}

/// Two feature blocks with independent partial signal. Latent u in
/// {-3,-1,1,3} lives in the linguistic block, v in {-2,2} in the embedding
/// block, and the label is [u + v > 0]: either block alone caps accuracy at
/// 0.75, both together separate the classes with margin 1.
struct DirectionalFixture {
    FeatureBlock ling;
    Eigen::MatrixXd emb;
    std::vector<int> y;
};

DirectionalFixture directional_fixture(int per_cell, std::uint64_t seed)
{
    const int ling_cols = 12, emb_cols = 48;
    const std::vector<double> us = {-3, -1, 1, 3}, vs = {-2, 2};
    const int n = per_cell * 8;
    SplitMix64 rng(seed);

    Eigen::VectorXd direction(emb_cols);
    for (int j = 0; j < emb_cols; ++j) direction(j) = gaussian(rng);
    direction.normalize();

    DirectionalFixture f;
    f.ling.values.resize(n, ling_cols);
    for (int j = 0; j < ling_cols; ++j) f.ling.column_names.push_back("ling_" + std::to_string(j));
    f.emb.resize(n, emb_cols);
    int row = 0;
    for (const double u : us) {
        for (const double v : vs) {
            for (int r = 0; r < per_cell; ++r, ++row) {
                for (int j = 0; j < ling_cols; ++j) f.ling.values(row, j) = gaussian(rng);
                f.ling.values(row, 0) = u + 0.1 * gaussian(rng);
                for (int j = 0; j < emb_cols; ++j) f.emb(row, j) = 0.3 * gaussian(rng);
                f.emb.row(row) += (v + 0.1 * gaussian(rng)) * direction.transpose();
                f.y.push_back(u + v > 0 ? 1 : 0);
            }
        }
    }
    return f;
}

Outcome directional_ablation()
{
    const auto start = std::chrono::steady_clock::now();
    const auto f = directional_fixture(25, 2022);
    const auto plan = stratified_kfold(f.y, 5, 42);
    bool pass = true;
    std::string detail;
    for (const auto a : kAlgorithms) {
        double scores[3];
        int m = 0;
        for (const auto mode : {FeatureMode::ling_only, FeatureMode::emb_only, FeatureMode::combined}) {
            const auto data = assemble(f.ling, f.emb, f.y, mode, {"easy", "hard"});
            scores[m++] = cross_validate(data, ModelSpec::defaults(a, 42), plan).mean_f1;
        }
        const double gain = scores[2] - std::max(scores[0], scores[1]);
        if (a != Algorithm::rf) pass = pass && gain >= kDirectionalMargin;
        detail += fmt("%s ling %.3f emb %.3f combined %.3f (gain %+.3f%s); ", std::string(to_string(a)).c_str(), scores[0], scores[1],
                      scores[2], gain, a == Algorithm::rf ? ", informational" : "");
    }
    const double secs = seconds_since(start);
    pass = pass && secs < kDirectionalSeconds;
    detail += fmt("required gain >= %.2f for logreg and svm, %.1f s (limit %.0f s)", kDirectionalMargin, secs, kDirectionalSeconds);
    return {pass, detail};
}

Outcome ablation_determinism()
{
    const auto config = load_config(readlab::testing::data_dir() / "toy/config.toml");
    const auto first = run_ablation(config);
    const auto second = run_ablation(config);
    const auto& a = first.files.at("ablation.json");
    const auto& b = second.files.at("ablation.json");
    return {a == b, fmt("two runs with seed %llu: %zu and %zu bytes, %s", static_cast<unsigned long long>(config.seed), a.size(), b.size(),
                        a == b ? "identical" : "DIFFERENT")};
}

/// Mean CV F1 on the permutation-null fixture with one extra canary column.
/// `test_only` fills the canary with the label on each fold's test rows and
/// with random labels on its training rows.
double canary_run(std::uint64_t seed, bool with_canary, bool test_only, std::optional<int> pca_pct)
{
    const auto base = readlab::testing::permutation_null_fixture(20, 5, seed);
    const auto plan = stratified_kfold(base.y, 5, seed);
    Eigen::MatrixXd X(base.rows(), base.cols() + (with_canary ? 1 : 0));
    X.leftCols(base.cols()) = base.X;
    const auto spec = ModelSpec::defaults(Algorithm::logreg, seed);

    double sum = 0.0;
    SplitMix64 noise(seed + 5000);
    for (int fold = 0; fold < plan.k; ++fold) {
        const auto train_rows = plan.train_rows(fold), test_rows = plan.test_rows(fold);
        if (with_canary) {
            for (Eigen::Index i = 0; i < X.rows(); ++i) X(i, base.cols()) = base.y[static_cast<std::size_t>(i)];
            if (test_only)
                for (const int r : train_rows) X(r, base.cols()) = static_cast<double>(noise.uniform_index(3));
        }
        auto data = make_dataset(X, base.y, 3);
        sum += evaluate_fold(data, spec, train_rows, test_rows, pca_pct).weighted_f1;
    }
    return sum / plan.k;
}

Outcome fold_hygiene()
{
    bool pass = true;
    std::string detail;
    for (const std::optional<int> pca : {std::optional<int>{}, std::optional<int>{95}}) {
        double full_min = 1.0;
        std::vector<double> null_scores, test_only_scores;
        for (int s = 0; s < kNullSeeds; ++s) {
            const auto seed = static_cast<std::uint64_t>(s);
            full_min = std::min(full_min, canary_run(seed, true, false, pca));
            null_scores.push_back(canary_run(seed, false, false, pca));
            test_only_scores.push_back(canary_run(seed, true, true, pca));
        }
        const auto test = mann_whitney_u(test_only_scores, null_scores);
        double null_mean = 0.0, canary_mean = 0.0;
        for (int s = 0; s < kNullSeeds; ++s) {
            null_mean += null_scores[static_cast<std::size_t>(s)] / kNullSeeds;
            canary_mean += test_only_scores[static_cast<std::size_t>(s)] / kNullSeeds;
        }
        pass = pass && full_min == 1.0 && test.p_value > kHygieneAlpha;
        detail += fmt("%s: full canary min F1 %.3f; test-only canary mean %.3f vs null %.3f, MWU p %.3f (%s); ",
                      pca ? "scaler+PCA 95" : "scaler", full_min, canary_mean, null_mean, test.p_value,
                      std::string(to_string(test.method)).c_str());
    }
    detail += fmt("requires p > %.2f", kHygieneAlpha);
    return {pass, detail};
}

} // namespace

int main()
{
    report("weighted F1 matches confusion-matrix oracle", weighted_f1_oracle);
    report("Mann-Whitney exact p matches enumeration", mann_whitney_oracle);
    report("logistic regression gradient and loss trace", logreg_numerics);
    report("PCA properties", pca_properties);
    report("classifier sanity (separable and permutation null)", classifier_sanity);
    report("combined features beat single blocks on synthetic data", directional_ablation);
    report("ablation report is deterministic", ablation_determinism);
    report("fold hygiene canaries", fold_hygiene);
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
