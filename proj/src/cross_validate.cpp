#include "readlab/eval.hpp"

#include <set>

namespace readlab {

namespace {

nlohmann::json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

} // namespace

std::vector<double> EvalReport::fold_scores() const
{
    std::vector<double> out;
    for (const auto& f : folds)
        if (!f.skipped) out.push_back(f.weighted_f1);
    return out;
}

double EvalReport::mean_retained_dims() const
{
    double sum = 0.0;
    int n = 0;
    for (const auto& f : folds) {
        if (f.skipped) continue;
        sum += static_cast<double>(f.retained_dims);
        ++n;
    }
    return n > 0 ? sum / n : 0.0;
}

FoldResult evaluate_fold(const Dataset& data, const ModelSpec& spec, std::span<const int> train_rows,
                         std::span<const int> test_rows, std::optional<int> pca_pct)
{
    if (pca_pct && !is_allowed_variance_pct(*pca_pct))
        throw std::invalid_argument("variance percentage must be one of 25, 50, 75, 95, 100");

    FoldResult r;
    r.train_size = train_rows.size();
    r.test_size = test_rows.size();
    r.test_rows.assign(test_rows.begin(), test_rows.end());
    r.input_dims = data.cols();

    Dataset train_set = data.subset(train_rows);
    Dataset test_set = data.subset(test_rows);

    const std::set<int> present(train_set.y.begin(), train_set.y.end());
    if (present.size() < 2) {
        r.skipped = true;
        r.notice = "training split has a single class";
        return r;
    }

    const auto scaler = fit_scaler(train_set.X);
    r.scaler_mean = scaler.mean();
    r.scaler_std = scaler.stddev();
    train_set.X = scaler.transform(train_set.X);
    test_set.X = scaler.transform(test_set.X);

    if (pca_pct && *pca_pct < 100) {
        const auto pca = pca_fit(train_set.X, *pca_pct);
        train_set.X = pca.transform(train_set.X);
        test_set.X = pca.transform(test_set.X);
        train_set.column_names.clear();
        for (Eigen::Index j = 0; j < train_set.X.cols(); ++j) train_set.column_names.push_back("pc_" + std::to_string(j));
        test_set.column_names = train_set.column_names;
        train_set.block_boundary = test_set.block_boundary = 0;
    }
    r.retained_dims = train_set.X.cols();

    const Model model = train(train_set, spec);
    r.predictions = predict(model, test_set.X);
    r.weighted_f1 = test_set.y.empty() ? 0.0 : weighted_f1(test_set.y, r.predictions);
    return r;
}

EvalReport cross_validate(const Dataset& data, const ModelSpec& spec, const FoldPlan& plan, std::optional<int> pca_pct,
                          EvalSetup setup)
{
    if (static_cast<Eigen::Index>(plan.assignments.size()) != data.rows())
        throw std::invalid_argument("fold plan covers " + std::to_string(plan.assignments.size()) + " rows, dataset has " +
                                    std::to_string(data.rows()));

    EvalReport report;
    setup.algorithm = spec.algorithm;
    setup.pca_pct = pca_pct;
    report.setup = std::move(setup);
    report.warnings = plan.warnings;
    report.confusion = Eigen::MatrixXi::Zero(data.num_classes(), data.num_classes());

    double sum = 0.0;
    int evaluated = 0;
    for (int f = 0; f < plan.k; ++f) {
        const auto train_rows = plan.train_rows(f);
        const auto test_rows = plan.test_rows(f);
        FoldResult r = evaluate_fold(data, spec, train_rows, test_rows, pca_pct);
        r.fold = f;
        if (r.skipped) {
            report.warnings.push_back("fold " + std::to_string(f) + " skipped: " + r.notice);
        } else {
            std::vector<int> truth;
            truth.reserve(r.test_rows.size());
            for (const int i : r.test_rows) truth.push_back(data.y[static_cast<std::size_t>(i)]);
            report.confusion += confusion_matrix(truth, r.predictions, data.num_classes());
            sum += r.weighted_f1;
            ++evaluated;
        }
        report.folds.push_back(std::move(r));
    }
    report.mean_f1 = evaluated > 0 ? sum / evaluated : 0.0;
    if (evaluated == 0) report.warnings.push_back("every fold was skipped");
    return report;
}

nlohmann::json to_json(const EvalReport& report, bool audit)
{
    nlohmann::json j;
    j["setup"] = {
        {"dataset", report.setup.dataset},
        {"mode", to_string(report.setup.mode)},
        {"algorithm", to_string(report.setup.algorithm)},
        {"registry", report.setup.registry},
        {"pca_pct", report.setup.pca_pct ? nlohmann::json(*report.setup.pca_pct) : nlohmann::json(nullptr)},
    };
    j["mean_weighted_f1"] = report.mean_f1;
    j["mean_retained_dims"] = report.mean_retained_dims();

    auto folds = nlohmann::json::array();
    for (const auto& f : report.folds) {
        nlohmann::json fj = {
            {"fold", f.fold},
            {"skipped", f.skipped},
            {"weighted_f1", f.skipped ? nlohmann::json(nullptr) : nlohmann::json(f.weighted_f1)},
            {"train_size", f.train_size},
            {"test_size", f.test_size},
            {"input_dims", f.input_dims},
            {"retained_dims", f.retained_dims},
        };
        if (f.skipped) fj["notice"] = f.notice;
        if (audit && !f.skipped) {
            fj["scaler_mean"] = vec_json(f.scaler_mean);
            fj["scaler_std"] = vec_json(f.scaler_std);
        }
        folds.push_back(std::move(fj));
    }
    j["folds"] = std::move(folds);

    auto cm = nlohmann::json::array();
    for (Eigen::Index r = 0; r < report.confusion.rows(); ++r) {
        std::vector<int> row(static_cast<std::size_t>(report.confusion.cols()));
        for (Eigen::Index c = 0; c < report.confusion.cols(); ++c) row[static_cast<std::size_t>(c)] = report.confusion(r, c);
        cm.push_back(row);
    }
    j["confusion_matrix"] = std::move(cm);
    j["warnings"] = report.warnings;
    return j;
}

} // namespace readlab
