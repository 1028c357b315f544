#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace mekb::text {

// NFKC, lowercase, whitespace runs collapsed to one ASCII space, trimmed.
// Invalid UTF-8 sequences are replaced with U+FFFD.
std::string normalize(std::string_view raw);

// Decodes UTF-8 into code points. Malformed bytes decode to U+FFFD.
std::vector<char32_t> decode_utf8(std::string_view s);
std::string encode_utf8(char32_t cp);
std::string encode_utf8(const std::vector<char32_t>& cps);

// Byte offsets of every code point start, plus s.size() as a sentinel.
std::vector<std::size_t> codepoint_offsets(std::string_view s);

std::size_t codepoint_count(std::string_view s);

bool is_space(char32_t cp);

// Letter or digit in a script that separates words with whitespace.
// Han, kana, Thai and similar scripts return false.
bool is_spaced_word_char(char32_t cp);

// Splits on ASCII space (input is expected to be normalized).
std::vector<std::string_view> split_words(std::string_view normalized);

}  // namespace mekb::text
