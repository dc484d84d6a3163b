#include "readlab/eval.hpp"
#include "readlab/random.hpp"

#include <map>
#include <stdexcept>

namespace readlab {

FoldPlan stratified_kfold(std::span<const int> y, int k, std::uint64_t seed)
{
    if (k < 2) throw std::invalid_argument("stratified_kfold: k must be at least 2");
    if (static_cast<std::size_t>(k) > y.size())
        throw std::invalid_argument("stratified_kfold: k exceeds the number of documents");

    std::map<int, std::vector<int>> by_class;
    for (std::size_t i = 0; i < y.size(); ++i) by_class[y[i]].push_back(static_cast<int>(i));

    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.assignments.assign(y.size(), -1);

    SplitMix64 rng(seed);
    int next_fold = 0;
    for (auto& [label, members] : by_class) {
        if (members.size() < static_cast<std::size_t>(k))
            plan.warnings.push_back("class " + std::to_string(label) + " has " + std::to_string(members.size()) +
                                    " documents, fewer than k = " + std::to_string(k) + "; some folds lack it");
        rng.shuffle(std::span<int>(members));
        for (const int doc : members) {
            plan.assignments[static_cast<std::size_t>(doc)] = next_fold;
            next_fold = (next_fold + 1) % k;
        }
    }
    return plan;
}

std::vector<int> FoldPlan::train_rows(int fold) const
{
    std::vector<int> rows;
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] != fold) rows.push_back(static_cast<int>(i));
    return rows;
}

std::vector<int> FoldPlan::test_rows(int fold) const
{
    std::vector<int> rows;
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] == fold) rows.push_back(static_cast<int>(i));
    return rows;
}

} // namespace readlab
