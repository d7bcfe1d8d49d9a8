#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace desirev {

/// Trims both ends and collapses internal whitespace runs to one space.
std::string normalize_whitespace(std::string_view text);

/// A token with its byte span in the source string.
struct TokenSpan {
  std::string text;
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Splits on whitespace and treats every ASCII punctuation character as its own
/// token. Non-ASCII bytes stay inside words.
std::vector<TokenSpan> tokenize_words(std::string_view text);

/// Token texts only.
std::vector<std::string> token_strings(std::string_view text);

std::string to_lower_ascii(std::string_view text);

bool is_alpha_word(std::string_view token);

/// Joins with a single space, skipping nothing.
std::string join(const std::vector<std::string>& parts, std::string_view sep = " ");

/// 64-bit FNV-1a, used for fingerprints and seed derivation.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);

std::string hex64(std::uint64_t value);

}  // namespace desirev
