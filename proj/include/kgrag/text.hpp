#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace kgrag {

/// Trim surrounding whitespace and collapse internal whitespace runs to one
/// space. Two texts are the same entity iff their canonical forms are equal.
std::string canonical_text(std::string_view s);

std::string trim(std::string_view s);
std::string to_lower_ascii(std::string_view s);

/// ASCII letters and digits, plus every byte >= 0x80 so UTF-8 sequences stay
/// inside words.
bool is_word_byte(unsigned char c);

/// Lowercased runs of word bytes.
std::vector<std::string> word_tokens(std::string_view s);

bool contains_case_insensitive(std::string_view haystack, std::string_view needle);

}  // namespace kgrag
