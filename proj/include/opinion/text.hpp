#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace opinion {

using TokenSeq = std::vector<std::string>;

// Maximal runs of Unicode letters (general category L*) and decimal digits,
// case folded with Unicode simple case folding. Everything else separates
// tokens; malformed UTF-8 bytes are treated as separators.
TokenSeq tokenize(std::string_view text);

std::string case_fold(std::string_view text);

// True when the text is empty or consists solely of Unicode white space.
bool is_blank(std::string_view text);

bool is_valid_utf8(std::string_view text);

std::u32string to_code_points(std::string_view utf8);
std::string to_utf8(std::u32string_view code_points);

std::string join(const TokenSeq& tokens, std::string_view separator = " ");

} // namespace opinion
