#include "csv.hpp"

#include "readlab/error.hpp"

#include <fstream>
#include <sstream>

namespace readlab::detail {

std::vector<CsvRecord> read_csv(std::string_view content)
{
    std::vector<CsvRecord> records;
    std::size_t pos = 0;
    std::size_t line = 1;
    const std::size_t n = content.size();

    while (pos < n) {
        // Skip blank lines.
        if (content[pos] == '\n') {
            ++pos;
            ++line;
            continue;
        }
        if (content[pos] == '\r' && pos + 1 < n && content[pos + 1] == '\n') {
            pos += 2;
            ++line;
            continue;
        }

        CsvRecord rec;
        rec.line = line;

        if (content[pos] == '#') {
            auto end = content.find('\n', pos);
            if (end == std::string_view::npos) end = n;
            std::string_view raw = content.substr(pos, end - pos);
            if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
            rec.comment = true;
            rec.fields.emplace_back(raw);
            records.push_back(std::move(rec));
            pos = end + 1;
            ++line;
            continue;
        }

        std::string field;
        bool in_quotes = false;
        bool done = false;
        while (pos < n && !done) {
            const char c = content[pos];
            if (in_quotes) {
                if (c == '"') {
                    if (pos + 1 < n && content[pos + 1] == '"') {
                        field.push_back('"');
                        pos += 2;
                        continue;
                    }
                    in_quotes = false;
                } else {
                    if (c == '\n') ++line;
                    field.push_back(c);
                }
                ++pos;
                continue;
            }
            switch (c) {
            case '"':
                in_quotes = true;
                ++pos;
                break;
            case ',':
                rec.fields.push_back(std::move(field));
                field.clear();
                ++pos;
                break;
            case '\r':
                ++pos;
                break;
            case '\n':
                ++pos;
                ++line;
                done = true;
                break;
            default:
                field.push_back(c);
                ++pos;
            }
        }
        if (in_quotes) throw DataError("line " + std::to_string(rec.line) + ": unterminated quoted field");
        rec.fields.push_back(std::move(field));
        records.push_back(std::move(rec));
    }
    return records;
}

std::string csv_escape(std::string_view field)
{
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (const char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace readlab::detail
