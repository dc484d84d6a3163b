#include "readlab/dataset.hpp"

#include "csv.hpp"
#include "readlab/error.hpp"
#include "readlab/text.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>

namespace readlab {

FeatureMode parse_mode(std::string_view name)
{
    if (name == "ling_only") return FeatureMode::ling_only;
    if (name == "emb_only") return FeatureMode::emb_only;
    if (name == "combined") return FeatureMode::combined;
    throw ConfigError("unknown feature mode '" + std::string(name) + "'");
}

std::string_view to_string(FeatureMode mode)
{
    switch (mode) {
    case FeatureMode::ling_only: return "ling_only";
    case FeatureMode::emb_only: return "emb_only";
    case FeatureMode::combined: return "combined";
    }
    return "?";
}

Dataset Dataset::subset(std::span<const int> rows) const
{
    Dataset out;
    out.X.resize(static_cast<Eigen::Index>(rows.size()), X.cols());
    out.y.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.X.row(static_cast<Eigen::Index>(i)) = X.row(rows[i]);
        out.y.push_back(y[static_cast<std::size_t>(rows[i])]);
    }
    out.column_names = column_names;
    out.block_boundary = block_boundary;
    out.class_names = class_names;
    return out;
}

Dataset assemble(const FeatureBlock& ling, const Eigen::MatrixXd& emb, std::vector<int> labels, FeatureMode mode,
                 std::vector<std::string> class_names)
{
    const bool want_ling = mode != FeatureMode::emb_only;
    const bool want_emb = mode != FeatureMode::ling_only;
    const auto n = static_cast<Eigen::Index>(labels.size());

    if (want_ling && ling.cols() == 0) throw std::invalid_argument("assemble: linguistic block is empty");
    if (want_emb && emb.cols() == 0) throw std::invalid_argument("assemble: embedding block is empty");
    if (want_ling && ling.values.rows() != n)
        throw std::invalid_argument("assemble: linguistic block has " + std::to_string(ling.values.rows()) +
                                    " rows, expected " + std::to_string(n));
    if (want_emb && emb.rows() != n)
        throw std::invalid_argument("assemble: embedding block has " + std::to_string(emb.rows()) + " rows, expected " +
                                    std::to_string(n));
    if (want_ling && static_cast<Eigen::Index>(ling.column_names.size()) != ling.cols())
        throw std::invalid_argument("assemble: linguistic column names do not match block width");

    if (class_names.empty()) {
        const int max_label = labels.empty() ? -1 : *std::max_element(labels.begin(), labels.end());
        for (int c = 0; c <= max_label; ++c) class_names.push_back(std::to_string(c));
    }
    for (const int label : labels)
        if (label < 0 || label >= static_cast<int>(class_names.size()))
            throw std::invalid_argument("assemble: label " + std::to_string(label) + " out of range");

    Dataset out;
    out.y = std::move(labels);
    out.class_names = std::move(class_names);
    const Eigen::Index ling_cols = want_ling ? ling.cols() : 0;
    const Eigen::Index emb_cols = want_emb ? emb.cols() : 0;
    out.X.resize(n, ling_cols + emb_cols);
    if (want_ling) {
        out.X.leftCols(ling_cols) = ling.values;
        out.column_names = ling.column_names;
    }
    if (want_emb) {
        out.X.rightCols(emb_cols) = emb;
        for (Eigen::Index j = 0; j < emb_cols; ++j) out.column_names.push_back("emb_" + std::to_string(j));
    }
    out.block_boundary = ling_cols;
    if (!out.X.allFinite()) throw std::invalid_argument("assemble: non-finite entries");
    return out;
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << "# classes: ";
    for (std::size_t c = 0; c < data.class_names.size(); ++c) out << (c ? "," : "") << data.class_names[c];
    out << '\n';
    for (const auto& name : data.column_names) out << detail::csv_escape(name) << ',';
    out << "label\n" << std::setprecision(17);
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        for (Eigen::Index j = 0; j < data.cols(); ++j) out << data.X(i, j) << ',';
        out << data.y[static_cast<std::size_t>(i)] << '\n';
    }
}

Dataset read_dataset_csv(const std::filesystem::path& path)
{
    const auto records = detail::read_csv(detail::read_file(path.string()));
    Dataset data;
    bool have_header = false;
    std::vector<std::vector<double>> rows;

    for (const auto& rec : records) {
        if (rec.comment) {
            std::string_view raw = text::trim(std::string_view(rec.fields.front()).substr(1));
            if (raw.starts_with("classes:")) {
                raw.remove_prefix(8);
                std::size_t start = 0;
                while (start <= raw.size()) {
                    auto comma = raw.find(',', start);
                    if (comma == std::string_view::npos) comma = raw.size();
                    const auto name = text::trim(raw.substr(start, comma - start));
                    if (!name.empty()) data.class_names.emplace_back(name);
                    start = comma + 1;
                }
            }
            continue;
        }
        if (!have_header) {
            if (rec.fields.empty() || rec.fields.back() != "label")
                throw DataError(path.string() + ": last header column must be 'label'");
            data.column_names.assign(rec.fields.begin(), rec.fields.end() - 1);
            have_header = true;
            continue;
        }
        if (rec.fields.size() != data.column_names.size() + 1)
            throw DataError(path.string() + ": line " + std::to_string(rec.line) + ": wrong field count");
        std::vector<double> values;
        for (std::size_t j = 0; j < data.column_names.size(); ++j) {
            try {
                std::size_t used = 0;
                values.push_back(std::stod(rec.fields[j], &used));
                if (used != rec.fields[j].size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw DataError(path.string() + ": line " + std::to_string(rec.line) + ": bad number");
            }
        }
        int label = 0;
        const auto& lf = rec.fields.back();
        if (std::from_chars(lf.data(), lf.data() + lf.size(), label).ec != std::errc{})
            throw DataError(path.string() + ": line " + std::to_string(rec.line) + ": bad label");
        data.y.push_back(label);
        rows.push_back(std::move(values));
    }
    if (!have_header) throw DataError(path.string() + ": missing header");

    data.X.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(data.column_names.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            data.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];

    data.block_boundary = static_cast<Eigen::Index>(data.column_names.size());
    for (std::size_t j = 0; j < data.column_names.size(); ++j) {
        if (data.column_names[j].starts_with("emb_")) {
            data.block_boundary = static_cast<Eigen::Index>(j);
            break;
        }
    }
    if (data.class_names.empty()) {
        const int max_label = data.y.empty() ? -1 : *std::max_element(data.y.begin(), data.y.end());
        for (int c = 0; c <= max_label; ++c) data.class_names.push_back(std::to_string(c));
    }
    for (const int label : data.y)
        if (label < 0 || label >= data.num_classes()) throw DataError(path.string() + ": label out of range");
    return data;
}

} // namespace readlab
