#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace tiltkit::util {

// UTF-8 <-> UTF-32. decode_utf8 throws ValidationError on malformed input.
std::u32string decode_utf8(std::string_view text);
std::string encode_utf8(std::u32string_view text);
// Number of code points.
std::size_t utf8_length(std::string_view text);

bool is_space(char32_t c);
bool is_upper(char32_t c);
// Letters (ASCII and Latin) and digits.
bool is_word_char(char32_t c);
// Lowercases ASCII and the Latin-1 supplement; other code points unchanged.
char32_t fold_case(char32_t c);
std::u32string fold_case(std::u32string_view text);

std::string trim(std::string_view text);
// Collapses runs of whitespace into one space and trims.
std::string collapse_whitespace(std::string_view text);
std::string to_lower_ascii(std::string_view text);

// Parses JSON text strictly (no comments, no trailing content). Throws
// SyntaxError carrying the 1-based line and column of the offending byte.
nlohmann::json parse_json(std::string_view text);

}  // namespace tiltkit::util
