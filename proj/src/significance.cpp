#include "readlab/eval.hpp"

#include <boost/math/distributions/fisher_f.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace readlab {

namespace {

struct Ranked {
    std::vector<double> ranks; // midranks, pooled order a then b
    double tie_term = 0.0;     // sum of t^3 - t over tie groups
    bool has_ties = false;
};

Ranked midranks(std::span<const double> a, std::span<const double> b)
{
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::vector<std::size_t> order(pooled.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return pooled[x] < pooled[y]; });

    Ranked out;
    out.ranks.resize(pooled.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && pooled[order[j + 1]] == pooled[order[i]]) ++j;
        const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) out.ranks[order[k]] = rank;
        const double t = static_cast<double>(j - i + 1);
        if (t > 1) {
            out.has_ties = true;
            out.tie_term += t * t * t - t;
        }
        i = j + 1;
    }
    return out;
}

/// counts[u] = number of ways to interleave m a's with n b's so that exactly
/// u (a, b) pairs have a above b.
std::vector<double> u_distribution(std::size_t m, std::size_t n)
{
    // table[i][j] holds the distribution for i a's and j b's.
    std::vector<std::vector<std::vector<double>>> table(m + 1, std::vector<std::vector<double>>(n + 1));
    for (std::size_t i = 0; i <= m; ++i) {
        for (std::size_t j = 0; j <= n; ++j) {
            auto& cur = table[i][j];
            cur.assign(i * j + 1, 0.0);
            if (i == 0 || j == 0) {
                cur[0] = 1.0;
                continue;
            }
            // Largest element is an a (beating all j b's) or a b.
            const auto& with_a = table[i - 1][j];
            for (std::size_t u = 0; u < with_a.size(); ++u) cur[u + j] += with_a[u];
            const auto& with_b = table[i][j - 1];
            for (std::size_t u = 0; u < with_b.size(); ++u) cur[u] += with_b[u];
        }
    }
    return table[m][n];
}

double std_normal_two_tailed(double z) { return std::erfc(z / std::sqrt(2.0)); }

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

} // namespace

std::string_view to_string(TestMethod method)
{
    switch (method) {
    case TestMethod::exact: return "exact";
    case TestMethod::normal_approximation: return "normal-approximation";
    case TestMethod::f_distribution: return "f-distribution";
    }
    return "?";
}

double mann_whitney_u_a(std::span<const double> a, std::span<const double> b)
{
    if (a.empty() || b.empty()) throw std::invalid_argument("mann_whitney_u: empty sample");
    const auto ranked = midranks(a, b);
    const double rank_sum_a = std::accumulate(ranked.ranks.begin(), ranked.ranks.begin() + static_cast<std::ptrdiff_t>(a.size()), 0.0);
    const double na = static_cast<double>(a.size());
    return rank_sum_a - na * (na + 1.0) / 2.0;
}

TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b, std::optional<TestMethod> method)
{
    if (method == TestMethod::f_distribution) throw std::invalid_argument("mann_whitney_u: method must be exact or normal");
    if (a.empty() || b.empty()) throw std::invalid_argument("mann_whitney_u: empty sample");
    for (const double x : a)
        if (!std::isfinite(x)) throw std::invalid_argument("mann_whitney_u: non-finite value");
    for (const double x : b)
        if (!std::isfinite(x)) throw std::invalid_argument("mann_whitney_u: non-finite value");

    const auto ranked = midranks(a, b);
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double rank_sum_a = std::accumulate(ranked.ranks.begin(), ranked.ranks.begin() + static_cast<std::ptrdiff_t>(a.size()), 0.0);
    const double u_a = rank_sum_a - na * (na + 1.0) / 2.0;
    const double u_b = na * nb - u_a;
    const double u = std::min(u_a, u_b);

    TestResult r;
    r.statistic = u;
    r.n_a = a.size();
    r.n_b = b.size();

    if (method == TestMethod::exact && ranked.has_ties) throw std::invalid_argument("mann_whitney_u: exact method needs tie-free samples");
    const bool exact = method ? *method == TestMethod::exact : a.size() + b.size() <= kExactMannWhitneyLimit && !ranked.has_ties;
    if (exact) {
        const auto counts = u_distribution(a.size(), b.size());
        const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
        double tail = 0.0;
        const auto u_int = static_cast<std::size_t>(std::llround(u));
        for (std::size_t k = 0; k <= u_int && k < counts.size(); ++k) tail += counts[k];
        r.method = TestMethod::exact;
        r.p_value = std::min(1.0, 2.0 * tail / total);
        return r;
    }

    const double N = na + nb;
    const double mean = na * nb / 2.0;
    const double var = na * nb / 12.0 * ((N + 1.0) - ranked.tie_term / (N * (N - 1.0)));
    r.method = TestMethod::normal_approximation;
    if (var <= 0.0) {
        r.p_value = 1.0;
        return r;
    }
    const double z = std::max(0.0, std::abs(u_a - mean) - 0.5) / std::sqrt(var);
    r.p_value = std::min(1.0, std_normal_two_tailed(z));
    return r;
}

TestResult variance_equality(std::span<const double> a, std::span<const double> b)
{
    if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("variance_equality: each sample needs at least 2 values");

    const double med_a = median({a.begin(), a.end()});
    const double med_b = median({b.begin(), b.end()});
    std::vector<double> za, zb;
    for (const double x : a) za.push_back(std::abs(x - med_a));
    for (const double x : b) zb.push_back(std::abs(x - med_b));

    const double na = static_cast<double>(za.size());
    const double nb = static_cast<double>(zb.size());
    const double N = na + nb;
    const double mean_a = std::accumulate(za.begin(), za.end(), 0.0) / na;
    const double mean_b = std::accumulate(zb.begin(), zb.end(), 0.0) / nb;
    const double grand = (mean_a * na + mean_b * nb) / N;

    const double between = na * (mean_a - grand) * (mean_a - grand) + nb * (mean_b - grand) * (mean_b - grand);
    double within = 0.0;
    for (const double z : za) within += (z - mean_a) * (z - mean_a);
    for (const double z : zb) within += (z - mean_b) * (z - mean_b);

    TestResult r;
    r.method = TestMethod::f_distribution;
    r.n_a = a.size();
    r.n_b = b.size();

    const double df2 = N - 2.0;
    constexpr double eps = 1e-300;
    if (between <= eps * std::max(1.0, within)) {
        r.statistic = 0.0;
        r.p_value = 1.0;
        return r;
    }
    if (within <= 0.0) {
        // Deviations are constant within each group but differ between them.
        r.statistic = std::numeric_limits<double>::infinity();
        r.p_value = std::numeric_limits<double>::min();
        return r;
    }
    r.statistic = df2 * between / within;
    const boost::math::fisher_f dist(1.0, df2);
    r.p_value = std::clamp(boost::math::cdf(boost::math::complement(dist, r.statistic)), std::numeric_limits<double>::min(), 1.0);
    return r;
}

nlohmann::json to_json(const TestResult& result)
{
    return {
        {"statistic", std::isfinite(result.statistic) ? nlohmann::json(result.statistic) : nlohmann::json("inf")},
        {"p_value", result.p_value},
        {"method", to_string(result.method)},
        {"n_a", result.n_a},
        {"n_b", result.n_b},
    };
}

} // namespace readlab
