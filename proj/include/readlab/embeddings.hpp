#pragma once

#include "readlab/corpus.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace readlab {

/// Hidden size of base-sized BERT encoders; other sizes load with a warning.
inline constexpr int kExpectedEmbeddingDim = 768;

enum class Granularity { document, sentence };

std::string_view to_string(Granularity g);

/// Elementwise mean of equally sized vectors.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> mean_pool(std::span<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> vectors)
{
    if (vectors.empty()) throw std::invalid_argument("mean_pool: no vectors");
    const auto dim = vectors.front().size();
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> sum = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(dim);
    for (const auto& v : vectors) {
        if (v.size() != dim) throw std::invalid_argument("mean_pool: ragged vector lengths");
        sum += v;
    }
    return sum / static_cast<Scalar>(vectors.size());
}

/// Precomputed embeddings keyed by document id (and sentence index for
/// sentence granularity). Immutable after load.
class EmbeddingTable {
public:
    EmbeddingTable(int dim, Granularity granularity, std::string model = {});

    static EmbeddingTable load(const std::filesystem::path& path);

    /// Throws on dim mismatch, non-finite values or a duplicate (id, sentence) key.
    void add(const std::string& id, int sentence, Eigen::VectorXd v);

    int dim() const { return dim_; }
    Granularity granularity() const { return granularity_; }
    const std::string& model() const { return model_; }
    /// Ids in first-appearance order.
    const std::vector<std::string>& ids() const { return order_; }
    bool contains(const std::string& id) const { return vectors_.contains(id); }

    /// The document vector; sentence tables are mean-pooled on the fly.
    Eigen::VectorXd document_vector(const std::string& id) const;
    const std::map<int, Eigen::VectorXd>& sentence_vectors(const std::string& id) const;

    /// Document-granularity table with every sentence table pooled.
    EmbeddingTable pooled() const;

private:
    int dim_;
    Granularity granularity_;
    std::string model_;
    std::vector<std::string> order_;
    std::unordered_map<std::string, std::map<int, Eigen::VectorXd>> vectors_;
};

inline EmbeddingTable load_embeddings(const std::filesystem::path& path) { return EmbeddingTable::load(path); }

/// Rows follow corpus order. Throws AlignmentError naming every missing id.
Eigen::MatrixXd align(const EmbeddingTable& table, const LabeledCorpus& corpus);
Eigen::MatrixXd align(const EmbeddingTable& table, std::span<const std::string> ids);

/// Writes a document-granularity JSONL file readable by EmbeddingTable::load.
void export_embeddings(const std::filesystem::path& path, std::span<const std::string> ids,
                       const Eigen::MatrixXd& rows, const std::string& model = "exported");

} // namespace readlab
