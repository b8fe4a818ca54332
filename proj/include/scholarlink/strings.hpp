#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace scholarlink::strings {

std::string trim(std::string_view s);

// Collapses internal whitespace runs to single spaces and trims the ends.
std::string normalize_ws(std::string_view s);

// ASCII case folding; non-ASCII bytes pass through untouched.
std::string to_lower(std::string_view s);

std::string title_case_word(std::string_view word);

// Case-insensitive (ASCII) equality on whitespace-normalized text.
bool iequals(std::string_view a, std::string_view b);

// Case-insensitive (ASCII) substring test on whitespace-normalized text.
bool icontains(std::string_view haystack, std::string_view needle);

std::vector<std::string> split(std::string_view s, char sep);

// Splits on whitespace after replacing ASCII punctuation with spaces and
// case-folding. CJK runs survive as single tokens.
std::vector<std::string> tokens(std::string_view s);

bool starts_with(std::string_view s, std::string_view prefix);

// Decodes one UTF-8 codepoint starting at byte i; advances i past it.
// Malformed bytes decode as U+FFFD one byte at a time.
char32_t decode_utf8(std::string_view s, size_t& i);

// Splits a UTF-8 string into individual codepoint strings.
std::vector<std::string> utf8_chars(std::string_view s);

bool is_latin_letter(char32_t cp);
bool is_cjk(char32_t cp);
bool contains_cjk(std::string_view s);

// FNV-1a, used for cache keys and config fingerprints.
std::uint64_t fnv1a(std::string_view s);
std::string hex64(std::uint64_t v);

// Cuts s to at most max_bytes without splitting a UTF-8 sequence.
std::string truncate_utf8(std::string_view s, size_t max_bytes);

}  // namespace scholarlink::strings
