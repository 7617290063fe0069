#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace senti {

// Lowercased whitespace tokenization with ASCII punctuation detached as
// single-character tokens. Bytes >= 0x80 (multi-byte UTF-8) are kept as word
// characters untouched, so the function is safe on arbitrary UTF-8 input.
// Deterministic; empty input yields an empty sequence.
std::vector<std::string> tokenize(std::string_view text);

// Number of non-overlapping occurrences of `needle` in `haystack`.
// Empty needle counts as zero.
size_t count_occurrences(std::string_view haystack, std::string_view needle);

}  // namespace senti
