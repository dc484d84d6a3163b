#include "readlab/text.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <stdexcept>

namespace readlab::text {

namespace {

UChar32 first_code_point(std::string_view cp)
{
    if (cp.empty()) return U_SENTINEL;
    int32_t i = 0;
    UChar32 c;
    U8_NEXT(reinterpret_cast<const uint8_t*>(cp.data()), i, static_cast<int32_t>(cp.size()), c);
    return c;
}

const icu::Normalizer2& nfc()
{
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) throw std::runtime_error("ICU NFC normalizer unavailable");
    return *n;
}

const icu::Normalizer2& nfd()
{
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* n = icu::Normalizer2::getNFDInstance(status);
    if (U_FAILURE(status)) throw std::runtime_error("ICU NFD normalizer unavailable");
    return *n;
}

} // namespace

bool is_valid_utf8(std::string_view s)
{
    const auto* p = reinterpret_cast<const uint8_t*>(s.data());
    const auto n = static_cast<int32_t>(s.size());
    int32_t i = 0;
    while (i < n) {
        UChar32 c;
        U8_NEXT(p, i, n, c);
        if (c < 0) return false;
    }
    return true;
}

std::string normalize_lower(std::string_view s)
{
    UErrorCode status = U_ZERO_ERROR;
    icu::UnicodeString u = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
    icu::UnicodeString normalized = nfc().normalize(u, status);
    if (U_FAILURE(status)) throw std::runtime_error("NFC normalization failed");
    normalized.toLower(icu::Locale::getRoot());
    // Lowercasing can denormalize in rare cases.
    normalized = nfc().normalize(normalized, status);
    std::string out;
    normalized.toUTF8String(out);
    return out;
}

std::vector<std::string> code_points(std::string_view s)
{
    std::vector<std::string> out;
    const auto* p = reinterpret_cast<const uint8_t*>(s.data());
    const auto n = static_cast<int32_t>(s.size());
    int32_t i = 0;
    while (i < n) {
        const int32_t start = i;
        UChar32 c;
        U8_NEXT(p, i, n, c);
        out.emplace_back(s.substr(static_cast<std::size_t>(start), static_cast<std::size_t>(i - start)));
    }
    return out;
}

std::size_t code_point_count(std::string_view s)
{
    const auto* p = reinterpret_cast<const uint8_t*>(s.data());
    const auto n = static_cast<int32_t>(s.size());
    int32_t i = 0;
    std::size_t count = 0;
    while (i < n) {
        UChar32 c;
        U8_NEXT(p, i, n, c);
        ++count;
    }
    return count;
}

bool is_alnum(std::string_view cp)
{
    const UChar32 c = first_code_point(cp);
    if (c < 0) return false;
    // Combining marks attach to the preceding letter (decomposed diacritics).
    return u_isalnum(c) || u_charType(c) == U_NON_SPACING_MARK;
}

bool is_space(std::string_view cp)
{
    const UChar32 c = first_code_point(cp);
    return c >= 0 && u_isUWhiteSpace(c);
}

std::string fold_diacritics(std::string_view s)
{
    UErrorCode status = U_ZERO_ERROR;
    icu::UnicodeString u = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
    icu::UnicodeString decomposed = nfd().normalize(u, status);
    if (U_FAILURE(status)) throw std::runtime_error("NFD normalization failed");
    icu::UnicodeString stripped;
    for (int32_t i = 0; i < decomposed.length();) {
        const UChar32 c = decomposed.char32At(i);
        if (u_charType(c) != U_NON_SPACING_MARK) stripped.append(c);
        i += U16_LENGTH(c);
    }
    stripped.toLower(icu::Locale::getRoot());
    std::string out;
    stripped.toUTF8String(out);
    return out;
}

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

} // namespace readlab::text
