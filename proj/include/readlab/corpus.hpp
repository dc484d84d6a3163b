#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace readlab {

enum class LanguageProfile { english, filipino };

LanguageProfile parse_profile(std::string_view name);
std::string_view to_string(LanguageProfile profile);

struct Document {
    std::string id;
    std::string text;
    int label = 0;
};

/// Documents in manifest order plus level names indexed by label.
struct LabeledCorpus {
    std::vector<Document> documents;
    std::vector<std::string> class_names;

    std::size_t size() const { return documents.size(); }
    std::size_t num_classes() const { return class_names.size(); }
    std::vector<int> labels() const;
    std::vector<std::string> ids() const;
};

/// Sentence/token view of one document. `tokens` keep the original surface
/// form, `lower_tokens` the NFC-normalized lowercase form used for counting.
struct SegmentedDocument {
    std::vector<std::string> sentences;
    std::vector<std::vector<std::string>> tokens;
    std::vector<std::vector<std::string>> lower_tokens;

    std::size_t sentence_count() const { return sentences.size(); }
    std::size_t token_count() const;
    /// All lowercased tokens in document order.
    std::vector<std::string> flat_lower_tokens() const;
};

struct CorpusStats {
    std::size_t documents = 0;
    std::size_t sentences = 0;
    std::size_t vocabulary = 0;
};

/// Abbreviations (lowercase, without the final period) that never end a sentence.
std::span<const std::string_view> abbreviations(LanguageProfile profile);

/// Reads a CSV manifest with header `id,label,path` or `id,label,text`.
/// Lines starting with `#` are comments; `# classes: a,b,c` before the
/// header fixes the label order. Errors name the 1-based data row.
LabeledCorpus load_manifest(const std::filesystem::path& path,
                            LanguageProfile profile = LanguageProfile::english);

/// Rule-based segmentation: sentences end at `.`, `!` or `?` (optionally
/// followed by closing quotes/brackets) unless the word is a listed
/// abbreviation; tokens are maximal runs of letters/digits with internal
/// apostrophes or hyphens. Punctuation is not tokenized.
SegmentedDocument segment(std::string_view text, LanguageProfile profile = LanguageProfile::english);
SegmentedDocument segment(const Document& doc, LanguageProfile profile = LanguageProfile::english);

CorpusStats corpus_stats(const LabeledCorpus& corpus, LanguageProfile profile = LanguageProfile::english);

} // namespace readlab
