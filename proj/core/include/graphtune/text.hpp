#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace graphtune {

/// FNV-1a 64-bit hash; fixed constants, stable on every platform.
std::uint64_t fnv1a64(std::string_view text);

/// Lowercase hex rendering of a 64-bit value (16 digits).
std::string hex64(std::uint64_t value);

/// ASCII-only lowercasing; bytes >= 0x80 pass through unchanged.
std::string ascii_lower(std::string_view text);

/// Trims and collapses every whitespace run to a single space.
std::string collapse_whitespace(std::string_view text);

struct Token {
    std::string text;
    bool is_word = true; // false for punctuation runs
};

/// Splits text into tokens: maximal runs of word characters (alphanumerics and
/// non-ASCII bytes) and maximal runs of punctuation. Whitespace separates
/// tokens and is never itself a token. "San Francisco, CA" -> [San] [Francisco]
/// [,] [CA], count 4.
std::vector<Token> tokenize(std::string_view text);

/// Number of tokens under the rules of tokenize(). Deterministic and
/// platform-stable; used as the chunking budget unit.
std::size_t count_tokens(std::string_view text);

/// Word tokens only (punctuation runs skipped), original casing.
std::vector<std::string> word_tokens(std::string_view text);

/// Lowercased word tokens.
std::vector<std::string> lower_word_tokens(std::string_view text);

/// Splits text into sentences. A sentence ends at a run of '.', '!' or '?'
/// followed by whitespace or end of text; newlines always end a sentence.
/// Terminators stay with their sentence; results are trimmed and non-empty.
std::vector<std::string> split_sentences(std::string_view text);

/// Truncates to at most max_tokens tokens, preserving the original spelling
/// of what remains.
std::string truncate_tokens(std::string_view text, std::size_t max_tokens);

} // namespace graphtune
