#include "readlab/lingfeats.hpp"

#include "csv.hpp"
#include "readlab/error.hpp"
#include "readlab/text.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace readlab {

// Flattened views shared by all feature functions for one document.
struct FeatureContext {
    LanguageProfile profile;
    std::size_t sentences = 0;
    std::vector<std::string> tokens;  // lowercased
    std::vector<std::string> lemmas;  // lemma or lowercased token
    std::vector<PosTag> tags;
    std::vector<int> syllables;
    std::vector<std::size_t> lengths; // code points
};

namespace {

using Profiles = std::vector<LanguageProfile>;
const Profiles kBoth = {LanguageProfile::english, LanguageProfile::filipino};
const Profiles kFilipino = {LanguageProfile::filipino};

double ratio(double num, double den) { return den > 0 ? num / den : 0.0; }

double token_count(const FeatureContext& c) { return static_cast<double>(c.tokens.size()); }

std::size_t distinct(const std::vector<std::string>& items)
{
    return std::unordered_set<std::string>(items.begin(), items.end()).size();
}

double tag_density(const FeatureContext& c, PosTag tag)
{
    const auto n = std::count(c.tags.begin(), c.tags.end(), tag);
    return ratio(static_cast<double>(n), token_count(c));
}

double variation(const FeatureContext& c, std::initializer_list<PosTag> wanted)
{
    std::vector<std::string> picked;
    for (std::size_t i = 0; i < c.tags.size(); ++i)
        if (std::find(wanted.begin(), wanted.end(), c.tags[i]) != wanted.end()) picked.push_back(c.lemmas[i]);
    return ratio(static_cast<double>(distinct(picked)), static_cast<double>(picked.size()));
}

bool is_filipino_vowel(char ch) { return ch == 'a' || ch == 'e' || ch == 'i' || ch == 'o' || ch == 'u'; }

/// Lowercase ASCII letters after diacritic folding; other code points become separators.
std::string folded_letters(std::string_view word)
{
    std::string out;
    for (const char ch : text::fold_diacritics(word)) {
        if (ch >= 'a' && ch <= 'z') out.push_back(ch);
        else out.push_back(' ');
    }
    return out;
}

/// Grapheme classes for Filipino: 'V' vowel, 'C' consonant ("ng" collapsed).
std::vector<std::string> cv_parts(std::string_view word)
{
    std::vector<std::string> parts;
    std::string current;
    const std::string letters = folded_letters(word);
    for (std::size_t i = 0; i < letters.size(); ++i) {
        const char ch = letters[i];
        if (ch == ' ') {
            if (!current.empty()) parts.push_back(std::move(current));
            current.clear();
            continue;
        }
        if (ch == 'n' && i + 1 < letters.size() && letters[i + 1] == 'g') {
            current.push_back('C');
            ++i;
            continue;
        }
        current.push_back(is_filipino_vowel(ch) ? 'V' : 'C');
    }
    if (!current.empty()) parts.push_back(std::move(current));
    return parts;
}

std::vector<std::string> syllabify_cv(const std::string& cv)
{
    std::vector<std::size_t> nuclei;
    for (std::size_t i = 0; i < cv.size(); ++i)
        if (cv[i] == 'V') nuclei.push_back(i);
    if (nuclei.empty()) return {};

    std::vector<std::size_t> onset(nuclei.size(), 0);
    std::vector<std::size_t> coda(nuclei.size(), 0);
    onset.front() = nuclei.front();
    coda.back() = cv.size() - nuclei.back() - 1;
    for (std::size_t s = 0; s + 1 < nuclei.size(); ++s) {
        const std::size_t cluster = nuclei[s + 1] - nuclei[s] - 1;
        if (cluster == 0) continue;
        if (cluster == 1) {
            onset[s + 1] = 1;
        } else if (cluster == 2) {
            coda[s] = 1;
            onset[s + 1] = 1;
        } else {
            coda[s] = cluster - 1;
            onset[s + 1] = 1;
        }
    }
    std::vector<std::string> out;
    out.reserve(nuclei.size());
    for (std::size_t s = 0; s < nuclei.size(); ++s)
        out.push_back(std::string(onset[s], 'C') + "V" + std::string(coda[s], 'C'));
    return out;
}

struct PatternCounts {
    std::vector<std::string> patterns;
    std::size_t cluster_words = 0;
};

PatternCounts pattern_counts(const FeatureContext& c)
{
    PatternCounts out;
    for (const auto& tok : c.tokens) {
        bool cluster = false;
        for (const auto& part : cv_parts(tok)) {
            if (part.find("CC") != std::string::npos) cluster = true;
            auto p = syllabify_cv(part);
            out.patterns.insert(out.patterns.end(), p.begin(), p.end());
        }
        if (cluster) ++out.cluster_words;
    }
    return out;
}

double pattern_density(const FeatureContext& c, std::string_view shape)
{
    const auto pc = pattern_counts(c);
    const auto n = std::count(pc.patterns.begin(), pc.patterns.end(), shape);
    return ratio(static_cast<double>(n), static_cast<double>(pc.patterns.size()));
}

bool has_prefix(std::string_view w, std::string_view p) { return w.size() >= p.size() + 2 && w.starts_with(p); }

bool has_suffix(std::string_view w, std::string_view s) { return w.size() >= s.size() + 3 && w.ends_with(s); }

/// Focus/aspect affixation on a Filipino verb.
bool is_inflected_filipino_verb(std::string_view word)
{
    const std::string w = folded_letters(word);
    static constexpr std::string_view prefixes[] = {"nakapag", "makapag", "ipag", "maka", "naka", "mang", "nang",
                                                    "pang",    "mag",     "nag",  "pag",  "ipa",  "ika",  "ma",
                                                    "na",      "i"};
    for (const auto p : prefixes)
        if (has_prefix(w, p)) return true;
    if (w.size() >= 4) {
        if (w.starts_with("um") || w.starts_with("in")) return true;
        if (!is_filipino_vowel(w[0]) && (w.substr(1, 2) == "um" || w.substr(1, 2) == "in")) return true;
    }
    static constexpr std::string_view suffixes[] = {"hin", "han", "in", "an"};
    for (const auto s : suffixes)
        if (has_suffix(w, s)) return true;
    return false;
}

/// Leading CV reduplication as in "kakain", "tatakbo".
bool is_reduplicated(std::string_view word)
{
    const std::string w = folded_letters(word);
    return w.size() >= 5 && !is_filipino_vowel(w[0]) && is_filipino_vowel(w[1]) && w[0] == w[2] && w[1] == w[3];
}

double verb_share(const FeatureContext& c, bool (*pred)(std::string_view))
{
    std::size_t n = 0;
    for (std::size_t i = 0; i < c.tokens.size(); ++i)
        if (c.tags[i] == PosTag::verb && pred(c.tokens[i])) ++n;
    return ratio(static_cast<double>(n), token_count(c));
}

FeatureContext make_context(const SegmentedDocument& doc, const AnnotationSet& ann, LanguageProfile profile)
{
    if (ann.tags.size() != doc.lower_tokens.size())
        throw AlignmentError("annotation covers " + std::to_string(ann.tags.size()) + " sentences, document has " +
                             std::to_string(doc.lower_tokens.size()));
    const bool with_lemmas = !ann.lemmas.empty();
    if (with_lemmas && ann.lemmas.size() != doc.lower_tokens.size())
        throw AlignmentError("lemma annotation sentence count does not match document");

    FeatureContext c;
    c.profile = profile;
    c.sentences = doc.sentence_count();
    for (std::size_t s = 0; s < doc.lower_tokens.size(); ++s) {
        const auto& toks = doc.lower_tokens[s];
        if (ann.tags[s].size() != toks.size())
            throw AlignmentError("sentence " + std::to_string(s) + ": " + std::to_string(ann.tags[s].size()) +
                                 " tags for " + std::to_string(toks.size()) + " tokens");
        if (with_lemmas && ann.lemmas[s].size() != toks.size())
            throw AlignmentError("sentence " + std::to_string(s) + ": lemma count does not match tokens");
        for (std::size_t i = 0; i < toks.size(); ++i) {
            c.tokens.push_back(toks[i]);
            c.tags.push_back(ann.tags[s][i]);
            const bool lemma_known = with_lemmas && !ann.lemmas[s][i].empty();
            c.lemmas.push_back(lemma_known ? ann.lemmas[s][i] : toks[i]);
            c.syllables.push_back(count_syllables(toks[i], profile));
            c.lengths.push_back(text::code_point_count(toks[i]));
        }
    }
    return c;
}

FeatureSpec spec(std::string id, std::string description, FeatureGroup group, const Profiles& profiles,
                 FeatureKind kind, std::function<double(const FeatureContext&)> fn)
{
    return FeatureSpec{std::move(id), std::move(description), group, profiles, kind, std::move(fn)};
}

std::vector<FeatureSpec> all_features()
{
    using G = FeatureGroup;
    using K = FeatureKind;
    std::vector<FeatureSpec> f;

    f.push_back(spec("trad.word_count", "number of word tokens", G::trad, kBoth, K::count,
                     [](const FeatureContext& c) { return token_count(c); }));
    f.push_back(spec("trad.sentence_count", "number of sentences", G::trad, kBoth, K::count,
                     [](const FeatureContext& c) { return static_cast<double>(c.sentences); }));
    f.push_back(spec("trad.avg_sentence_length", "word tokens per sentence", G::trad, kBoth, K::positive,
                     [](const FeatureContext& c) { return ratio(token_count(c), static_cast<double>(c.sentences)); }));
    f.push_back(spec("trad.avg_word_length", "code points per word token", G::trad, kBoth, K::positive,
                     [](const FeatureContext& c) {
                         double sum = 0;
                         for (auto n : c.lengths) sum += static_cast<double>(n);
                         return ratio(sum, token_count(c));
                     }));
    f.push_back(spec("trad.avg_syllables_per_word", "syllables per word token", G::trad, kBoth, K::positive,
                     [](const FeatureContext& c) {
                         double sum = 0;
                         for (auto n : c.syllables) sum += n;
                         return ratio(sum, token_count(c));
                     }));
    f.push_back(spec("trad.polysyllable_ratio", "share of words with 3+ syllables", G::trad, kBoth, K::density,
                     [](const FeatureContext& c) {
                         const auto n = std::count_if(c.syllables.begin(), c.syllables.end(), [](int s) { return s >= 3; });
                         return ratio(static_cast<double>(n), token_count(c));
                     }));
    f.push_back(spec("trad.long_word_ratio", "share of words with 7+ code points", G::trad, kBoth, K::density,
                     [](const FeatureContext& c) {
                         const auto n = std::count_if(c.lengths.begin(), c.lengths.end(), [](auto l) { return l >= 7; });
                         return ratio(static_cast<double>(n), token_count(c));
                     }));

    f.push_back(spec("lex.ttr", "distinct tokens / tokens", G::lex, kBoth, K::density, [](const FeatureContext& c) {
        return ratio(static_cast<double>(distinct(c.tokens)), token_count(c));
    }));
    f.push_back(spec("lex.root_ttr", "distinct tokens / sqrt(tokens)", G::lex, kBoth, K::positive,
                     [](const FeatureContext& c) {
                         return ratio(static_cast<double>(distinct(c.tokens)), std::sqrt(token_count(c)));
                     }));
    f.push_back(spec("lex.corrected_ttr", "distinct tokens / sqrt(2 * tokens)", G::lex, kBoth, K::positive,
                     [](const FeatureContext& c) {
                         return ratio(static_cast<double>(distinct(c.tokens)), std::sqrt(2.0 * token_count(c)));
                     }));
    f.push_back(spec("lex.hapax_ratio", "types occurring once / tokens", G::lex, kBoth, K::density,
                     [](const FeatureContext& c) {
                         std::unordered_map<std::string, int> freq;
                         for (const auto& t : c.tokens) ++freq[t];
                         const auto n = std::count_if(freq.begin(), freq.end(), [](const auto& kv) { return kv.second == 1; });
                         return ratio(static_cast<double>(n), token_count(c));
                     }));

    f.push_back(spec("syn.noun_density", "NOUN tags / tokens", G::syn, kBoth, K::density,
                     [](const FeatureContext& c) { return tag_density(c, PosTag::noun); }));
    f.push_back(spec("syn.verb_density", "VERB tags / tokens", G::syn, kBoth, K::density,
                     [](const FeatureContext& c) { return tag_density(c, PosTag::verb); }));
    f.push_back(spec("syn.adj_density", "ADJ tags / tokens", G::syn, kBoth, K::density,
                     [](const FeatureContext& c) { return tag_density(c, PosTag::adj); }));
    f.push_back(spec("syn.adv_density", "ADV tags / tokens", G::syn, kBoth, K::density,
                     [](const FeatureContext& c) { return tag_density(c, PosTag::adv); }));
    f.push_back(spec("syn.function_word_density", "FUNC tags / tokens", G::syn, kBoth, K::density,
                     [](const FeatureContext& c) { return tag_density(c, PosTag::func); }));

    f.push_back(spec("sem.lexical_density", "content words (NOUN, VERB, ADJ, ADV) / tokens", G::sem, kBoth,
                     K::density, [](const FeatureContext& c) {
                         const auto n = std::count_if(c.tags.begin(), c.tags.end(), [](PosTag t) {
                             return t == PosTag::noun || t == PosTag::verb || t == PosTag::adj || t == PosTag::adv;
                         });
                         return ratio(static_cast<double>(n), token_count(c));
                     }));
    f.push_back(spec("sem.noun_variation", "distinct noun lemmas / nouns", G::sem, kBoth, K::density,
                     [](const FeatureContext& c) { return variation(c, {PosTag::noun}); }));
    f.push_back(spec("sem.verb_variation", "distinct verb lemmas / verbs", G::sem, kBoth, K::density,
                     [](const FeatureContext& c) { return variation(c, {PosTag::verb}); }));
    f.push_back(spec("sem.modifier_variation", "distinct ADJ/ADV lemmas / modifiers", G::sem, kBoth, K::density,
                     [](const FeatureContext& c) { return variation(c, {PosTag::adj, PosTag::adv}); }));

    f.push_back(spec("ortho.v_density", "V syllables / syllables", G::ortho, kFilipino, K::density,
                     [](const FeatureContext& c) { return pattern_density(c, "V"); }));
    f.push_back(spec("ortho.cv_density", "CV syllables / syllables", G::ortho, kFilipino, K::density,
                     [](const FeatureContext& c) { return pattern_density(c, "CV"); }));
    f.push_back(spec("ortho.vc_density", "VC syllables / syllables", G::ortho, kFilipino, K::density,
                     [](const FeatureContext& c) { return pattern_density(c, "VC"); }));
    f.push_back(spec("ortho.cvc_density", "CVC syllables / syllables", G::ortho, kFilipino, K::density,
                     [](const FeatureContext& c) { return pattern_density(c, "CVC"); }));
    f.push_back(spec("ortho.complex_syllable_density", "syllables with a 2+ consonant onset or coda / syllables",
                     G::ortho, kFilipino, K::density, [](const FeatureContext& c) {
                         const auto pc = pattern_counts(c);
                         const auto n = std::count_if(pc.patterns.begin(), pc.patterns.end(), [](const std::string& p) {
                             return p.starts_with("CC") || p.ends_with("CC");
                         });
                         return ratio(static_cast<double>(n), static_cast<double>(pc.patterns.size()));
                     }));
    f.push_back(spec("ortho.consonant_cluster_ratio", "words containing adjacent consonants / words", G::ortho,
                     kFilipino, K::density, [](const FeatureContext& c) {
                         return ratio(static_cast<double>(pattern_counts(c).cluster_words), token_count(c));
                     }));

    f.push_back(spec("morph.verb_inflection_density", "affixed (focus/aspect) verbs / tokens", G::morph, kFilipino,
                     K::density, [](const FeatureContext& c) { return verb_share(c, is_inflected_filipino_verb); }));
    f.push_back(spec("morph.verb_reduplication_density", "CV-reduplicated verbs / tokens", G::morph, kFilipino,
                     K::density, [](const FeatureContext& c) { return verb_share(c, is_reduplicated); }));
    return f;
}

} // namespace

FeatureGroup parse_group(std::string_view name)
{
    std::string up(name);
    std::transform(up.begin(), up.end(), up.begin(), [](unsigned char ch) { return std::toupper(ch); });
    if (up == "TRAD") return FeatureGroup::trad;
    if (up == "LEX") return FeatureGroup::lex;
    if (up == "SYN") return FeatureGroup::syn;
    if (up == "SEM") return FeatureGroup::sem;
    if (up == "MORPH") return FeatureGroup::morph;
    if (up == "ORTHO") return FeatureGroup::ortho;
    throw ConfigError("unknown feature group '" + std::string(name) + "'");
}

std::string_view to_string(FeatureGroup group)
{
    switch (group) {
    case FeatureGroup::trad: return "TRAD";
    case FeatureGroup::lex: return "LEX";
    case FeatureGroup::syn: return "SYN";
    case FeatureGroup::sem: return "SEM";
    case FeatureGroup::morph: return "MORPH";
    case FeatureGroup::ortho: return "ORTHO";
    }
    return "?";
}

PosTag parse_tag(std::string_view name)
{
    if (name == "NOUN") return PosTag::noun;
    if (name == "VERB") return PosTag::verb;
    if (name == "ADJ") return PosTag::adj;
    if (name == "ADV") return PosTag::adv;
    if (name == "FUNC") return PosTag::func;
    if (name == "OTHER") return PosTag::other;
    throw DataError("unknown POS tag '" + std::string(name) + "'");
}

std::string_view to_string(PosTag tag)
{
    switch (tag) {
    case PosTag::noun: return "NOUN";
    case PosTag::verb: return "VERB";
    case PosTag::adj: return "ADJ";
    case PosTag::adv: return "ADV";
    case PosTag::func: return "FUNC";
    case PosTag::other: return "OTHER";
    }
    return "?";
}

std::vector<std::string> FeatureRegistry::ids() const
{
    std::vector<std::string> out;
    out.reserve(features.size());
    for (const auto& f : features) out.push_back(f.id);
    return out;
}

std::size_t FeatureRegistry::count(FeatureGroup group) const
{
    return static_cast<std::size_t>(
        std::count_if(features.begin(), features.end(), [group](const FeatureSpec& f) { return f.group == group; }));
}

TagLexicon TagLexicon::load(const std::filesystem::path& path)
{
    if (!std::filesystem::exists(path)) throw LoadError("lexicon not found: " + path.string());
    const std::string content = detail::read_file(path.string());
    if (!text::is_valid_utf8(content)) throw LoadError(path.string() + ": lexicon is not valid UTF-8");

    TagLexicon lex;
    std::istringstream in(content);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(line).empty() || line.front() == '#') continue;
        std::vector<std::string> cols;
        std::size_t start = 0;
        while (true) {
            const auto tab = line.find('\t', start);
            cols.emplace_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
        if (cols.size() < 2 || cols.size() > 3)
            throw LoadError(path.string() + ": line " + std::to_string(lineno) + ": expected word<TAB>TAG[<TAB>lemma]");
        try {
            lex.add(text::trim(cols[0]), parse_tag(text::trim(cols[1])),
                    cols.size() == 3 ? text::normalize_lower(text::trim(cols[2])) : std::string{});
        } catch (const DataError& e) {
            throw LoadError(path.string() + ": line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return lex;
}

void TagLexicon::add(std::string_view word, PosTag tag, std::string lemma)
{
    if (!lemma.empty()) has_lemmas_ = true;
    entries_[text::normalize_lower(word)] = Entry{tag, std::move(lemma)};
}

PosTag TagLexicon::lookup(std::string_view lower_word) const
{
    const auto it = entries_.find(std::string(lower_word));
    return it == entries_.end() ? PosTag::other : it->second.tag;
}

std::string_view TagLexicon::lemma(std::string_view lower_word) const
{
    const auto it = entries_.find(std::string(lower_word));
    return it == entries_.end() ? std::string_view{} : std::string_view(it->second.lemma);
}

FeatureRegistry default_registry(LanguageProfile profile)
{
    FeatureRegistry reg;
    reg.profile = profile;
    for (auto& f : all_features())
        if (std::find(f.profiles.begin(), f.profiles.end(), profile) != f.profiles.end())
            reg.features.push_back(std::move(f));
    return reg;
}

FeatureRegistry remove_groups(const FeatureRegistry& registry, const std::set<FeatureGroup>& groups)
{
    FeatureRegistry out;
    out.profile = registry.profile;
    for (const auto& f : registry.features)
        if (!groups.contains(f.group)) out.features.push_back(f);
    return out;
}

AnnotationSet tag_pos(const SegmentedDocument& doc, const TagLexicon& lexicon)
{
    AnnotationSet ann;
    ann.tags.reserve(doc.lower_tokens.size());
    for (const auto& sentence : doc.lower_tokens) {
        std::vector<PosTag> tags;
        std::vector<std::string> lemmas;
        for (const auto& tok : sentence) {
            tags.push_back(lexicon.lookup(tok));
            if (lexicon.has_lemmas()) lemmas.emplace_back(lexicon.lemma(tok));
        }
        ann.tags.push_back(std::move(tags));
        if (lexicon.has_lemmas()) ann.lemmas.push_back(std::move(lemmas));
    }
    return ann;
}

FeatureVector extract(const SegmentedDocument& doc, const FeatureRegistry& registry, const AnnotationSet& annotations,
                      std::string doc_id)
{
    if (registry.empty()) throw std::invalid_argument("feature registry is empty");
    const FeatureContext ctx = make_context(doc, annotations, registry.profile);
    FeatureVector out{std::move(doc_id), {}};
    out.values.reserve(registry.size());
    for (const auto& f : registry.features) {
        const double v = f.compute(ctx);
        if (!std::isfinite(v)) throw DataError("feature " + f.id + " is not finite");
        out.values.push_back(v);
    }
    return out;
}

int count_syllables(std::string_view word, LanguageProfile profile)
{
    bool any = false;
    for (const auto& cp : text::code_points(word))
        if (text::is_alnum(cp)) any = true;
    if (!any) throw std::invalid_argument("count_syllables: '" + std::string(word) + "' has no letters or digits");

    const std::string letters = folded_letters(word);
    int count = 0;
    if (profile == LanguageProfile::filipino) {
        for (const char ch : letters)
            if (is_filipino_vowel(ch)) ++count;
        return std::max(count, 1);
    }

    auto vowel = [](char ch) { return is_filipino_vowel(ch) || ch == 'y'; };
    bool in_group = false;
    std::size_t last_group_len = 0;
    for (const char ch : letters) {
        if (vowel(ch)) {
            if (!in_group) {
                ++count;
                last_group_len = 0;
            }
            ++last_group_len;
            in_group = true;
        } else {
            in_group = false;
        }
    }
    const auto end = letters.find_last_not_of(' ');
    const bool silent_e = end != std::string::npos && letters[end] == 'e' && in_group && last_group_len == 1;
    if (silent_e && count > 1) --count;
    return std::max(count, 1);
}

std::vector<std::string> syllable_patterns(std::string_view word)
{
    std::vector<std::string> out;
    for (const auto& part : cv_parts(word)) {
        auto p = syllabify_cv(part);
        out.insert(out.end(), p.begin(), p.end());
    }
    return out;
}

void write_features_csv(const std::filesystem::path& path, const FeatureRegistry& registry,
                        const std::vector<FeatureVector>& vectors)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << "doc_id";
    for (const auto& id : registry.ids()) out << ',' << id;
    out << '\n' << std::setprecision(17);
    for (const auto& v : vectors) {
        if (v.values.size() != registry.size()) throw DataError("feature vector for " + v.doc_id + " has wrong length");
        out << detail::csv_escape(v.doc_id);
        for (const double x : v.values) out << ',' << x;
        out << '\n';
    }
}

} // namespace readlab
