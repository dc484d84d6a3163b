#include "readlab/error.hpp"
#include "readlab/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace readlab {

namespace {

template <typename F>
auto with_context(const std::string& context, F&& f) -> decltype(f())
{
    try {
        return f();
    } catch (const AlignmentError& e) {
        throw AlignmentError(context + e.what());
    } catch (const LoadError& e) {
        throw LoadError(context + e.what());
    } catch (const DataError& e) {
        throw DataError(context + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(context + e.what());
    } catch (const std::invalid_argument& e) {
        throw DataError(context + e.what());
    }
}

} // namespace

PreparedDataset prepare_dataset(const DatasetConfig& config)
{
    const std::string ctx = "dataset '" + config.name + "': ";
    PreparedDataset out;
    out.name = config.name;
    out.profile = config.profile;
    out.corpus = with_context(ctx, [&] { return load_manifest(config.corpus, config.profile); });

    TagLexicon lexicon;
    if (config.lexicon) lexicon = with_context(ctx, [&] { return TagLexicon::load(*config.lexicon); });
    else out.warnings.push_back(ctx + "no lexicon configured; part-of-speech features are zero");

    out.segmented.reserve(out.corpus.size());
    out.annotations.reserve(out.corpus.size());
    for (const auto& doc : out.corpus.documents) {
        out.segmented.push_back(segment(doc, config.profile));
        out.annotations.push_back(tag_pos(out.segmented.back(), lexicon));
    }

    const auto table = with_context(ctx, [&] { return load_embeddings(config.embeddings); });
    if (table.dim() != kExpectedEmbeddingDim)
        out.warnings.push_back(ctx + "embedding dimension " + std::to_string(table.dim()) + " differs from the expected " +
                               std::to_string(kExpectedEmbeddingDim));
    out.embedding_model = table.model();
    out.embeddings = with_context(ctx, [&] { return align(table, out.corpus); });
    return out;
}

FeatureBlock linguistic_block(const PreparedDataset& data, const FeatureRegistry& registry)
{
    FeatureBlock block;
    block.column_names = registry.ids();
    block.values.resize(static_cast<Eigen::Index>(data.corpus.size()), static_cast<Eigen::Index>(registry.size()));
    for (std::size_t i = 0; i < data.corpus.size(); ++i) {
        const auto fv = extract(data.segmented[i], registry, data.annotations[i], data.corpus.documents[i].id);
        for (std::size_t j = 0; j < fv.values.size(); ++j)
            block.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = fv.values[j];
    }
    return block;
}

Dataset build_dataset(const PreparedDataset& data, const FeatureRegistry& registry, FeatureMode mode)
{
    FeatureBlock ling;
    if (mode != FeatureMode::emb_only) ling = linguistic_block(data, registry);
    else ling.values.resize(static_cast<Eigen::Index>(data.corpus.size()), 0);
    return assemble(ling, data.embeddings, data.corpus.labels(), mode, data.corpus.class_names);
}

unsigned worker_count(std::size_t jobs)
{
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("READABILITY_LAB_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) n = static_cast<unsigned>(std::min<long>(v, 1024));
    }
    return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(n, jobs)));
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& job)
{
    if (n == 0) return;
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                job(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned workers = worker_count(n);
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace readlab
