#pragma once

// Minimal RFC 4180 reader shared by the manifest and dataset loaders.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace readlab::detail {

struct CsvRecord {
    std::size_t line = 0; // 1-based line where the record starts
    bool comment = false; // starts with '#'; `fields` holds the raw line
    std::vector<std::string> fields;
};

/// Parses quoted fields (with "" escapes and embedded newlines). Blank lines are skipped.
std::vector<CsvRecord> read_csv(std::string_view content);

/// Quotes a field when it contains a comma, quote or newline.
std::string csv_escape(std::string_view field);

std::string read_file(const std::string& path);

} // namespace readlab::detail
