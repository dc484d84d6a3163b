#pragma once

#include "readlab/corpus.hpp"

#include <filesystem>
#include <functional>
#include <initializer_list>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace readlab {

/// Feature families. SYN also hosts parse-tree features; none are registered
/// because no parser ships with the toolkit.
enum class FeatureGroup { trad, lex, syn, sem, morph, ortho };

FeatureGroup parse_group(std::string_view name);
std::string_view to_string(FeatureGroup group);

/// Coarse tagset produced by the lexicon tagger.
enum class PosTag { noun, verb, adj, adv, func, other };

PosTag parse_tag(std::string_view name);
std::string_view to_string(PosTag tag);

/// Value range a feature is guaranteed to respect.
enum class FeatureKind {
    count,    ///< non-negative integer-valued
    density,  ///< in [0, 1]
    positive, ///< non-negative real
};

/// Per-token annotations aligned to SegmentedDocument::tokens.
struct AnnotationSet {
    std::vector<std::vector<PosTag>> tags;
    /// Empty when the lexicon carries no lemmas.
    std::vector<std::vector<std::string>> lemmas;
};

struct FeatureContext;

struct FeatureSpec {
    std::string id;
    std::string description;
    FeatureGroup group;
    std::vector<LanguageProfile> profiles;
    FeatureKind kind;
    std::function<double(const FeatureContext&)> compute;
};

struct FeatureRegistry {
    LanguageProfile profile = LanguageProfile::english;
    std::vector<FeatureSpec> features;

    std::size_t size() const { return features.size(); }
    bool empty() const { return features.empty(); }
    std::vector<std::string> ids() const;
    std::size_t count(FeatureGroup group) const;
};

struct FeatureVector {
    std::string doc_id;
    std::vector<double> values;
};

/// Lowercased word -> tag (and optional lemma), read from `word<TAB>TAG[<TAB>lemma]`.
class TagLexicon {
public:
    TagLexicon() = default;

    static TagLexicon load(const std::filesystem::path& path);

    void add(std::string_view word, PosTag tag, std::string lemma = {});
    /// `other` for unknown words.
    PosTag lookup(std::string_view lower_word) const;
    /// Empty when unknown or no lemma was given.
    std::string_view lemma(std::string_view lower_word) const;
    bool has_lemmas() const { return has_lemmas_; }
    std::size_t size() const { return entries_.size(); }

private:
    struct Entry {
        PosTag tag;
        std::string lemma;
    };
    std::unordered_map<std::string, Entry> entries_;
    bool has_lemmas_ = false;
};

/// Fixed, documented registry for a language profile: TRAD, LEX, SYN and SEM
/// for both profiles, plus ORTHO (syllable patterns) and MORPH (verb
/// inflection) for Filipino.
FeatureRegistry default_registry(LanguageProfile profile);

/// Drops every feature whose group is listed; order of the rest is kept.
FeatureRegistry remove_groups(const FeatureRegistry& registry, const std::set<FeatureGroup>& groups);

AnnotationSet tag_pos(const SegmentedDocument& doc, const TagLexicon& lexicon);

/// Throws AlignmentError when annotation shapes differ from the token lists,
/// std::invalid_argument for an empty registry.
FeatureVector extract(const SegmentedDocument& doc, const FeatureRegistry& registry,
                      const AnnotationSet& annotations, std::string doc_id = {});

/// English: vowel groups (aeiouy) minus a terminal silent "e" when more than
/// one group, at least 1. Filipino: one syllable per vowel letter, at least 1.
/// Throws std::invalid_argument when the word has no letters or digits.
int count_syllables(std::string_view word, LanguageProfile profile);

/// Filipino CV shapes of a word ("CV", "CVC", "CCV", ...). "ng" counts as one
/// consonant; two intervocalic consonants split 1|1, longer clusters put the
/// last consonant in the next onset.
std::vector<std::string> syllable_patterns(std::string_view word);

/// Writes `doc_id,<feature ids...>` then one row per vector.
void write_features_csv(const std::filesystem::path& path, const FeatureRegistry& registry,
                        const std::vector<FeatureVector>& vectors);

} // namespace readlab
