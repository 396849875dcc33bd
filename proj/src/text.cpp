#include "opinion/text.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <cstdint>

namespace opinion {

namespace {

bool is_token_char(UChar32 c) { return u_isalpha(c) || u_isdigit(c); }

void append_utf8(std::string& out, UChar32 c) {
    char buf[U8_MAX_LENGTH];
    int32_t len = 0;
    UBool error = false;
    U8_APPEND(reinterpret_cast<uint8_t*>(buf), len, U8_MAX_LENGTH, c, error);
    if (!error) out.append(buf, static_cast<std::size_t>(len));
}

// Calls fn(code_point) for each decoded code point; malformed sequences are
// reported as negative values.
template <typename Fn>
void for_each_code_point(std::string_view text, Fn&& fn) {
    const auto* s = reinterpret_cast<const uint8_t*>(text.data());
    const auto length = static_cast<int32_t>(text.size());
    int32_t i = 0;
    while (i < length) {
        UChar32 c;
        U8_NEXT(s, i, length, c);
        fn(c);
    }
}

} // namespace

TokenSeq tokenize(std::string_view text) {
    TokenSeq tokens;
    std::string current;
    for_each_code_point(text, [&](UChar32 c) {
        if (c >= 0 && is_token_char(c)) {
            append_utf8(current, u_foldCase(c, U_FOLD_CASE_DEFAULT));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    });
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::string case_fold(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for_each_code_point(text, [&](UChar32 c) {
        if (c >= 0) append_utf8(out, u_foldCase(c, U_FOLD_CASE_DEFAULT));
    });
    return out;
}

bool is_blank(std::string_view text) {
    bool blank = true;
    for_each_code_point(text, [&](UChar32 c) {
        if (c < 0 || !u_isUWhiteSpace(c)) blank = false;
    });
    return blank;
}

bool is_valid_utf8(std::string_view text) {
    bool valid = true;
    for_each_code_point(text, [&](UChar32 c) {
        if (c < 0) valid = false;
    });
    return valid;
}

std::u32string to_code_points(std::string_view utf8) {
    std::u32string out;
    for_each_code_point(utf8, [&](UChar32 c) {
        if (c >= 0) out.push_back(static_cast<char32_t>(c));
    });
    return out;
}

std::string to_utf8(std::u32string_view code_points) {
    std::string out;
    for (char32_t c : code_points) append_utf8(out, static_cast<UChar32>(c));
    return out;
}

std::string join(const TokenSeq& tokens, std::string_view separator) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += separator;
        out += tokens[i];
    }
    return out;
}

} // namespace opinion
