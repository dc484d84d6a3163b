#include "readlab/error.hpp"
#include "readlab/models.hpp"
#include "readlab/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace readlab {

namespace {

constexpr double kMinGain = 1e-12;

int argmax_counts(std::span<const int> counts)
{
    int best = 0;
    for (int c = 1; c < static_cast<int>(counts.size()); ++c)
        if (counts[static_cast<std::size_t>(c)] > counts[static_cast<std::size_t>(best)]) best = c;
    return best;
}

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

class TreeBuilder {
public:
    TreeBuilder(const Dataset& data, int max_depth, int max_features, SplitMix64& rng)
        : data_(data), classes_(data.num_classes()), max_depth_(max_depth), max_features_(max_features), rng_(rng),
          features_(static_cast<std::size_t>(data.cols()))
    {
        std::iota(features_.begin(), features_.end(), 0);
    }

    DecisionTree build(std::vector<int> samples)
    {
        tree_ = DecisionTree{};
        grow(std::move(samples), 0);
        return std::move(tree_);
    }

private:
    std::vector<int> histogram(std::span<const int> samples) const
    {
        std::vector<int> counts(static_cast<std::size_t>(classes_), 0);
        for (const int i : samples) ++counts[static_cast<std::size_t>(data_.y[static_cast<std::size_t>(i)])];
        return counts;
    }

    /// Partial Fisher-Yates draw of `max_features_` distinct features, returned ascending.
    std::vector<int> draw_features()
    {
        const auto d = features_.size();
        const auto m = std::min<std::size_t>(static_cast<std::size_t>(max_features_), d);
        for (std::size_t i = 0; i < m; ++i) {
            const auto j = i + static_cast<std::size_t>(rng_.uniform_index(d - i));
            std::swap(features_[i], features_[j]);
        }
        std::vector<int> drawn(features_.begin(), features_.begin() + static_cast<std::ptrdiff_t>(m));
        std::sort(drawn.begin(), drawn.end());
        return drawn;
    }

    Split best_split(std::vector<int>& samples, const std::vector<int>& parent_counts)
    {
        const double n = static_cast<double>(samples.size());
        const double parent_gini = gini(parent_counts);
        Split best;

        for (const int f : draw_features()) {
            std::sort(samples.begin(), samples.end(), [&](int a, int b) {
                const double va = data_.X(a, f);
                const double vb = data_.X(b, f);
                return va < vb || (va == vb && a < b);
            });
            std::vector<int> left(static_cast<std::size_t>(classes_), 0);
            std::vector<int> right = parent_counts;
            for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
                const int label = data_.y[static_cast<std::size_t>(samples[k])];
                ++left[static_cast<std::size_t>(label)];
                --right[static_cast<std::size_t>(label)];
                const double lo = data_.X(samples[k], f);
                const double hi = data_.X(samples[k + 1], f);
                if (!(lo < hi)) continue;

                const double nl = static_cast<double>(k + 1);
                const double nr = n - nl;
                double sl = 0.0;
                double sr = 0.0;
                for (int c = 0; c < classes_; ++c) {
                    sl += static_cast<double>(left[static_cast<std::size_t>(c)]) * left[static_cast<std::size_t>(c)];
                    sr += static_cast<double>(right[static_cast<std::size_t>(c)]) * right[static_cast<std::size_t>(c)];
                }
                const double child_gini = (n - sl / nl - sr / nr) / n;
                const double gain = parent_gini - child_gini;
                if (gain > best.gain + kMinGain) {
                    double threshold = lo + (hi - lo) / 2.0;
                    if (!(threshold < hi)) threshold = lo;
                    best = Split{f, threshold, gain};
                }
            }
        }
        return best;
    }

    int grow(std::vector<int> samples, int depth)
    {
        const int index = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();
        auto counts = histogram(samples);
        const bool pure = std::count_if(counts.begin(), counts.end(), [](int c) { return c > 0; }) <= 1;
        const bool depth_reached = max_depth_ > 0 && depth >= max_depth_;

        Split split;
        if (!pure && !depth_reached && samples.size() >= 2) split = best_split(samples, counts);

        tree_.nodes[static_cast<std::size_t>(index)].counts = std::move(counts);
        if (split.feature < 0) return index;

        std::vector<int> left;
        std::vector<int> right;
        for (const int i : samples) (data_.X(i, split.feature) <= split.threshold ? left : right).push_back(i);
        samples.clear();
        samples.shrink_to_fit();

        const int l = grow(std::move(left), depth + 1);
        const int r = grow(std::move(right), depth + 1);
        auto& node = tree_.nodes[static_cast<std::size_t>(index)];
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.left = l;
        node.right = r;
        return index;
    }

    const Dataset& data_;
    int classes_;
    int max_depth_;
    int max_features_;
    SplitMix64& rng_;
    std::vector<int> features_;
    DecisionTree tree_;
};

} // namespace

double gini(std::span<const int> counts)
{
    double total = 0.0;
    for (const int c : counts) total += c;
    if (total <= 0) return 0.0;
    double sum_sq = 0.0;
    for (const int c : counts) sum_sq += (c / total) * (c / total);
    return 1.0 - sum_sq;
}

int DecisionTree::predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const
{
    int at = 0;
    while (!nodes[static_cast<std::size_t>(at)].is_leaf()) {
        const auto& node = nodes[static_cast<std::size_t>(at)];
        at = x(node.feature) <= node.threshold ? node.left : node.right;
    }
    return argmax_counts(nodes[static_cast<std::size_t>(at)].counts);
}

int DecisionTree::depth() const
{
    if (nodes.empty()) return 0;
    std::vector<std::pair<int, int>> stack{{0, 0}};
    int deepest = 0;
    while (!stack.empty()) {
        const auto [at, level] = stack.back();
        stack.pop_back();
        deepest = std::max(deepest, level);
        const auto& node = nodes[static_cast<std::size_t>(at)];
        if (!node.is_leaf()) {
            stack.emplace_back(node.left, level + 1);
            stack.emplace_back(node.right, level + 1);
        }
    }
    return deepest;
}

RandomForestModel train_rf(const Dataset& data, const ModelSpec& spec)
{
    if (data.rows() == 0) throw TrainingError("random forest needs a non-empty dataset");
    const int n_trees = static_cast<int>(spec.get("trees"));
    if (n_trees < 1) throw TrainingError("random forest needs at least one tree");
    const int max_depth = static_cast<int>(spec.get("max_depth"));
    int max_features = static_cast<int>(spec.get("max_features"));
    if (max_features <= 0) max_features = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(data.cols()))));

    RandomForestModel forest;
    forest.classes = data.num_classes();
    forest.features = data.cols();

    SplitMix64 rng(spec.seed);
    TreeBuilder builder(data, max_depth, max_features, rng);
    const auto n = static_cast<std::uint64_t>(data.rows());
    for (int t = 0; t < n_trees; ++t) {
        std::vector<int> bootstrap(static_cast<std::size_t>(n));
        for (auto& i : bootstrap) i = static_cast<int>(rng.uniform_index(n));
        forest.trees.push_back(builder.build(std::move(bootstrap)));
    }
    return forest;
}

Eigen::MatrixXd predict_scores(const RandomForestModel& model, const Eigen::MatrixXd& X)
{
    if (X.cols() != model.num_features())
        throw std::invalid_argument("random forest expects " + std::to_string(model.num_features()) +
                                    " features, got " + std::to_string(X.cols()));
    Eigen::MatrixXd votes = Eigen::MatrixXd::Zero(X.rows(), model.classes);
    for (const auto& tree : model.trees)
        for (Eigen::Index i = 0; i < X.rows(); ++i) votes(i, tree.predict(X.row(i))) += 1.0;
    if (!model.trees.empty()) votes /= static_cast<double>(model.trees.size());
    return votes;
}

std::vector<int> predict(const RandomForestModel& model, const Eigen::MatrixXd& X)
{
    return argmax_rows(predict_scores(model, X));
}

} // namespace readlab
