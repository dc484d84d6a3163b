#include "readlab/corpus.hpp"

#include "csv.hpp"
#include "readlab/error.hpp"
#include "readlab/text.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <unordered_set>

namespace readlab {

namespace {

constexpr std::array<std::string_view, 34> kEnglishAbbreviations = {
    "mr",  "mrs", "ms",   "dr",  "prof", "sr",  "jr",   "st",  "mt",  "vs",  "e.g", "i.e",
    "inc", "ltd", "corp", "fig", "gen",  "gov", "sen",  "rep", "capt", "lt",  "col", "sgt",
    "jan", "feb", "apr",  "aug", "sept", "oct", "nov",  "dec", "approx", "dept",
};

// G. (Ginoo), Gng. (Ginang), Bb. (Binibini), Sto./Sta. (Santo/Santa),
// Gob. (Gobernador), Kgg. (Kagalang-galang), Pang. (Pangulo), Blg. (bilang),
// Hal. (halimbawa).
constexpr std::array<std::string_view, 14> kFilipinoAbbreviations = {
    "g", "gng", "bb", "dr", "dra", "sto", "sta", "gob", "kgg", "pang", "blg", "hal", "engr", "atty",
};

bool is_closer(std::string_view cp)
{
    static const std::set<std::string_view> closers = {"\"", "'", ")", "]", "}", "”", "’", "»"};
    return closers.contains(cp);
}

bool is_opener(std::string_view cp)
{
    static const std::set<std::string_view> openers = {"\"", "'", "(", "[", "{", "“", "‘", "«"};
    return openers.contains(cp);
}

bool is_terminal(std::string_view cp) { return cp == "." || cp == "!" || cp == "?"; }

bool is_joiner(std::string_view cp) { return cp == "'" || cp == "’" || cp == "-"; }

struct Chunk {
    std::size_t begin = 0; // byte offsets into the source text
    std::size_t end = 0;
    std::vector<std::string> cps;
};

std::vector<Chunk> whitespace_chunks(std::string_view text)
{
    std::vector<Chunk> chunks;
    Chunk current;
    bool open = false;
    std::size_t offset = 0;
    for (auto& cp : text::code_points(text)) {
        const std::size_t len = cp.size();
        if (text::is_space(cp)) {
            if (open) {
                chunks.push_back(std::move(current));
                current = Chunk{};
                open = false;
            }
        } else {
            if (!open) {
                current.begin = offset;
                open = true;
            }
            current.end = offset + len;
            current.cps.push_back(std::move(cp));
        }
        offset += len;
    }
    if (open) chunks.push_back(std::move(current));
    return chunks;
}

/// Word tokens inside one whitespace chunk.
std::vector<std::string> chunk_tokens(const Chunk& chunk)
{
    std::vector<std::string> tokens;
    std::string current;
    const auto& cps = chunk.cps;
    for (std::size_t i = 0; i < cps.size(); ++i) {
        if (text::is_alnum(cps[i])) {
            current += cps[i];
        } else if (!current.empty() && is_joiner(cps[i]) && i + 1 < cps.size() && text::is_alnum(cps[i + 1])) {
            current += cps[i];
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

bool ends_sentence(const Chunk& chunk, LanguageProfile profile)
{
    const auto& cps = chunk.cps;
    std::size_t last = cps.size();
    while (last > 0 && is_closer(cps[last - 1])) --last;
    if (last == 0 || !is_terminal(cps[last - 1])) return false;
    if (cps[last - 1] != ".") return true;

    // A single trailing period after a known abbreviation does not end the sentence.
    if (last >= 2 && cps[last - 2] == ".") return true;
    std::size_t first = 0;
    while (first < last && is_opener(cps[first])) ++first;
    std::string core;
    for (std::size_t i = first; i + 1 < last; ++i) core += cps[i];
    if (core.empty()) return true;
    const std::string lowered = text::normalize_lower(core);
    const auto list = abbreviations(profile);
    return std::find(list.begin(), list.end(), lowered) == list.end();
}

} // namespace

LanguageProfile parse_profile(std::string_view name)
{
    if (name == "english") return LanguageProfile::english;
    if (name == "filipino") return LanguageProfile::filipino;
    throw ConfigError("unknown language profile '" + std::string(name) + "'");
}

std::string_view to_string(LanguageProfile profile)
{
    return profile == LanguageProfile::english ? "english" : "filipino";
}

std::vector<int> LabeledCorpus::labels() const
{
    std::vector<int> out;
    out.reserve(documents.size());
    for (const auto& d : documents) out.push_back(d.label);
    return out;
}

std::vector<std::string> LabeledCorpus::ids() const
{
    std::vector<std::string> out;
    out.reserve(documents.size());
    for (const auto& d : documents) out.push_back(d.id);
    return out;
}

std::size_t SegmentedDocument::token_count() const
{
    std::size_t n = 0;
    for (const auto& s : tokens) n += s.size();
    return n;
}

std::vector<std::string> SegmentedDocument::flat_lower_tokens() const
{
    std::vector<std::string> out;
    for (const auto& s : lower_tokens) out.insert(out.end(), s.begin(), s.end());
    return out;
}

std::span<const std::string_view> abbreviations(LanguageProfile profile)
{
    if (profile == LanguageProfile::english) return kEnglishAbbreviations;
    return kFilipinoAbbreviations;
}

SegmentedDocument segment(std::string_view text, LanguageProfile profile)
{
    SegmentedDocument out;
    const auto chunks = whitespace_chunks(text);

    std::size_t sentence_begin = 0;
    std::size_t sentence_end = 0;
    std::vector<std::string> sentence_tokens;
    bool open = false;

    auto flush = [&] {
        if (!open) return;
        if (!sentence_tokens.empty()) {
            out.sentences.emplace_back(text.substr(sentence_begin, sentence_end - sentence_begin));
            std::vector<std::string> lower;
            lower.reserve(sentence_tokens.size());
            for (const auto& t : sentence_tokens) lower.push_back(text::normalize_lower(t));
            out.tokens.push_back(std::move(sentence_tokens));
            out.lower_tokens.push_back(std::move(lower));
        }
        sentence_tokens.clear();
        open = false;
    };

    for (const auto& chunk : chunks) {
        if (!open) {
            sentence_begin = chunk.begin;
            open = true;
        }
        sentence_end = chunk.end;
        for (auto& t : chunk_tokens(chunk)) sentence_tokens.push_back(std::move(t));
        if (ends_sentence(chunk, profile)) flush();
    }
    flush();

    if (out.sentences.empty()) {
        // No word tokens at all: one sentence holding the trimmed text.
        out.sentences.emplace_back(text::trim(text));
        out.tokens.emplace_back();
        out.lower_tokens.emplace_back();
    }
    return out;
}

SegmentedDocument segment(const Document& doc, LanguageProfile profile) { return segment(doc.text, profile); }

LabeledCorpus load_manifest(const std::filesystem::path& path, LanguageProfile profile)
{
    if (!std::filesystem::exists(path)) throw LoadError("manifest not found: " + path.string());
    const std::string content = detail::read_file(path.string());
    if (!text::is_valid_utf8(content)) throw LoadError(path.string() + ": manifest is not valid UTF-8");

    std::vector<detail::CsvRecord> records;
    try {
        records = detail::read_csv(content);
    } catch (const DataError& e) {
        throw LoadError(path.string() + ": " + e.what());
    }

    LabeledCorpus corpus;
    bool declared = false;
    bool inline_text = false;
    bool have_header = false;
    std::map<std::string, int> label_index;
    std::unordered_set<std::string> seen_ids;
    const auto base = path.parent_path();
    std::size_t row = 0;

    for (const auto& rec : records) {
        if (rec.comment) {
            std::string_view raw = rec.fields.front();
            raw.remove_prefix(1);
            raw = text::trim(raw);
            constexpr std::string_view key = "classes:";
            if (!have_header && raw.starts_with(key)) {
                raw.remove_prefix(key.size());
                std::size_t start = 0;
                while (start <= raw.size()) {
                    auto comma = raw.find(',', start);
                    if (comma == std::string_view::npos) comma = raw.size();
                    const auto name = std::string(text::trim(raw.substr(start, comma - start)));
                    if (!name.empty()) {
                        if (label_index.contains(name))
                            throw LoadError(path.string() + ": class '" + name + "' declared twice");
                        label_index[name] = static_cast<int>(corpus.class_names.size());
                        corpus.class_names.push_back(name);
                    }
                    start = comma + 1;
                }
                declared = true;
            }
            continue;
        }

        if (!have_header) {
            std::vector<std::string> h;
            for (const auto& f : rec.fields) h.emplace_back(text::trim(f));
            if (h == std::vector<std::string>{"id", "label", "path"}) {
                inline_text = false;
            } else if (h == std::vector<std::string>{"id", "label", "text"}) {
                inline_text = true;
            } else {
                throw LoadError(path.string() + ": header must be 'id,label,path' or 'id,label,text'");
            }
            have_header = true;
            continue;
        }

        ++row;
        const std::string where = "row " + std::to_string(row);
        if (rec.fields.size() != 3)
            throw LoadError(where + ": expected 3 fields, found " + std::to_string(rec.fields.size()));

        Document doc;
        doc.id = std::string(text::trim(rec.fields[0]));
        if (doc.id.empty()) throw LoadError(where + ": empty id");
        if (!seen_ids.insert(doc.id).second) throw LoadError(where + ": duplicate id '" + doc.id + "'");

        const std::string label(text::trim(rec.fields[1]));
        if (auto it = label_index.find(label); it != label_index.end()) {
            doc.label = it->second;
        } else if (declared || label.empty()) {
            throw LoadError(where + ": unknown label '" + label + "'");
        } else {
            doc.label = static_cast<int>(corpus.class_names.size());
            label_index[label] = doc.label;
            corpus.class_names.push_back(label);
        }

        if (inline_text) {
            doc.text = rec.fields[2];
        } else {
            const auto file = base / std::string(text::trim(rec.fields[2]));
            if (!std::filesystem::is_regular_file(file)) throw LoadError(where + ": file not found");
            doc.text = detail::read_file(file.string());
            if (!text::is_valid_utf8(doc.text)) throw LoadError(where + ": text is not valid UTF-8");
        }
        if (segment(doc.text, profile).token_count() == 0) throw LoadError(where + ": empty text");

        corpus.documents.push_back(std::move(doc));
    }

    if (!have_header) throw LoadError(path.string() + ": missing header");
    std::set<int> present;
    for (const auto& d : corpus.documents) present.insert(d.label);
    if (present.size() < 2) throw LoadError(path.string() + ": corpus needs at least 2 distinct classes");
    return corpus;
}

CorpusStats corpus_stats(const LabeledCorpus& corpus, LanguageProfile profile)
{
    CorpusStats stats;
    std::unordered_set<std::string> vocab;
    for (const auto& doc : corpus.documents) {
        const auto seg = segment(doc, profile);
        ++stats.documents;
        stats.sentences += seg.sentence_count();
        for (const auto& sentence : seg.lower_tokens) vocab.insert(sentence.begin(), sentence.end());
    }
    stats.vocabulary = vocab.size();
    return stats;
}

} // namespace readlab
