#pragma once

// UTF-8 helpers backed by ICU.

#include <string>
#include <string_view>
#include <vector>

namespace readlab::text {

bool is_valid_utf8(std::string_view s);

/// NFC-normalized, lowercased copy (root locale rules).
std::string normalize_lower(std::string_view s);

/// Splits into Unicode code points, each returned as its UTF-8 encoding.
std::vector<std::string> code_points(std::string_view s);

std::size_t code_point_count(std::string_view s);

/// True when the code point starting at the front of `cp` is a letter or digit.
bool is_alnum(std::string_view cp);

bool is_space(std::string_view cp);

/// Base letter with combining marks stripped (NFD then drop Mn), lowercased.
/// Used to classify accented Filipino vowels such as "á" or "ò".
std::string fold_diacritics(std::string_view s);

std::string_view trim(std::string_view s);

} // namespace readlab::text
