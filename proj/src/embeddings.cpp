#include "readlab/embeddings.hpp"

#include "readlab/error.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <optional>

namespace readlab {

namespace {

using nlohmann::json;

[[noreturn]] void fail(std::size_t line, const std::string& what)
{
    throw LoadError("line " + std::to_string(line) + ": " + what);
}

bool is_nonfinite_marker(const json& v)
{
    if (!v.is_string()) return false;
    std::string s = v.get<std::string>();
    for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return s == "nan" || s == "inf" || s == "-inf" || s == "+inf" || s == "infinity" || s == "-infinity";
}

} // namespace

std::string_view to_string(Granularity g) { return g == Granularity::document ? "document" : "sentence"; }

EmbeddingTable::EmbeddingTable(int dim, Granularity granularity, std::string model)
    : dim_(dim), granularity_(granularity), model_(std::move(model))
{
    if (dim <= 0) throw std::invalid_argument("embedding dim must be positive");
}

void EmbeddingTable::add(const std::string& id, int sentence, Eigen::VectorXd v)
{
    if (id.empty()) throw DataError("empty document id");
    if (v.size() != dim_) throw DataError("dim mismatch");
    if (!v.allFinite()) throw DataError("non-finite value");
    if (granularity_ == Granularity::document) sentence = 0;
    auto [it, fresh] = vectors_.try_emplace(id);
    if (fresh) order_.push_back(id);
    if (!it->second.emplace(sentence, std::move(v)).second) {
        throw DataError(granularity_ == Granularity::document
                            ? "duplicate id '" + id + "'"
                            : "duplicate id '" + id + "' sentence " + std::to_string(sentence));
    }
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open embeddings file " + path.string());

    std::string line;
    std::size_t lineno = 0;
    std::optional<EmbeddingTable> table;

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;

        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::out_of_range&) {
            fail(lineno, "non-finite value");
        } catch (const json::exception&) {
            fail(lineno, "malformed JSON");
        }
        if (!obj.is_object()) fail(lineno, "expected a JSON object");

        if (!table) {
            if (!obj.contains("dim") || !obj["dim"].is_number_integer() || obj["dim"].get<long long>() <= 0)
                fail(lineno, "header needs a positive integer \"dim\"");
            Granularity g = Granularity::document;
            if (obj.contains("granularity")) {
                const auto& gv = obj["granularity"];
                if (gv == "document") g = Granularity::document;
                else if (gv == "sentence") g = Granularity::sentence;
                else fail(lineno, "granularity must be \"document\" or \"sentence\"");
            }
            std::string model;
            if (obj.contains("model") && obj["model"].is_string()) model = obj["model"].get<std::string>();
            table.emplace(static_cast<int>(obj["dim"].get<long long>()), g, std::move(model));
            continue;
        }

        if (!obj.contains("id") || !obj["id"].is_string()) fail(lineno, "missing string \"id\"");
        if (!obj.contains("v") || !obj["v"].is_array()) fail(lineno, "missing array \"v\"");
        int sentence = 0;
        if (table->granularity() == Granularity::sentence) {
            if (!obj.contains("s") || !obj["s"].is_number_integer() || obj["s"].get<long long>() < 0)
                fail(lineno, "sentence granularity needs a non-negative integer \"s\"");
            sentence = static_cast<int>(obj["s"].get<long long>());
        }
        const auto& arr = obj["v"];
        if (static_cast<long long>(arr.size()) != table->dim()) fail(lineno, "dim mismatch");
        Eigen::VectorXd v(table->dim());
        for (std::size_t i = 0; i < arr.size(); ++i) {
            if (is_nonfinite_marker(arr[i])) fail(lineno, "non-finite value");
            if (!arr[i].is_number()) fail(lineno, "non-numeric value at index " + std::to_string(i));
            v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
            if (!std::isfinite(v(static_cast<Eigen::Index>(i)))) fail(lineno, "non-finite value");
        }
        try {
            table->add(obj["id"].get<std::string>(), sentence, std::move(v));
        } catch (const DataError& e) {
            fail(lineno, e.what());
        }
    }
    if (!table) throw LoadError(path.string() + ": missing header line");
    return std::move(*table);
}

Eigen::VectorXd EmbeddingTable::document_vector(const std::string& id) const
{
    const auto& sentences = sentence_vectors(id);
    if (granularity_ == Granularity::document) return sentences.begin()->second;
    std::vector<Eigen::VectorXd> vs;
    vs.reserve(sentences.size());
    for (const auto& [_, v] : sentences) vs.push_back(v);
    return mean_pool<double>(vs);
}

const std::map<int, Eigen::VectorXd>& EmbeddingTable::sentence_vectors(const std::string& id) const
{
    const auto it = vectors_.find(id);
    if (it == vectors_.end()) throw AlignmentError("no embedding for document '" + id + "'");
    return it->second;
}

EmbeddingTable EmbeddingTable::pooled() const
{
    EmbeddingTable out(dim_, Granularity::document, model_);
    for (const auto& id : order_) out.add(id, 0, document_vector(id));
    return out;
}

Eigen::MatrixXd align(const EmbeddingTable& table, std::span<const std::string> ids)
{
    std::string missing;
    for (const auto& id : ids)
        if (!table.contains(id)) missing += (missing.empty() ? "" : ", ") + id;
    if (!missing.empty()) throw AlignmentError("missing embeddings for: " + missing);

    Eigen::MatrixXd rows(static_cast<Eigen::Index>(ids.size()), table.dim());
    for (std::size_t i = 0; i < ids.size(); ++i) rows.row(static_cast<Eigen::Index>(i)) = table.document_vector(ids[i]);
    return rows;
}

Eigen::MatrixXd align(const EmbeddingTable& table, const LabeledCorpus& corpus)
{
    const auto ids = corpus.ids();
    return align(table, std::span<const std::string>(ids));
}

void export_embeddings(const std::filesystem::path& path, std::span<const std::string> ids, const Eigen::MatrixXd& rows,
                       const std::string& model)
{
    if (static_cast<Eigen::Index>(ids.size()) != rows.rows()) throw std::invalid_argument("ids/rows size mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << json{{"dim", rows.cols()}, {"granularity", "document"}, {"model", model}}.dump() << '\n';
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        std::vector<double> v(rows.cols());
        for (Eigen::Index j = 0; j < rows.cols(); ++j) v[static_cast<std::size_t>(j)] = rows(r, j);
        out << json{{"id", ids[i]}, {"v", v}}.dump() << '\n';
    }
}

} // namespace readlab
