#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace prefkit {

// characters = Unicode scalar count, words = maximal non-whitespace runs,
// provider_tokens = a count supplied by a tokenizing client.
enum class LengthUnit { characters, words, provider_tokens };

LengthUnit length_unit_from_string(std::string_view name);
std::string_view to_string(LengthUnit unit);

// Length of `text` in the given unit. provider_tokens requires the caller
// to pass the externally supplied count; otherwise it is an error.
std::size_t text_length(std::string_view text, LengthUnit unit,
                        std::optional<std::size_t> provider_tokens = std::nullopt);

// |W(a) ∩ W(b)| / |W(a) ∪ W(b)| over lowercased whitespace-split word sets.
// Both empty -> 1.0.
double jaccard_similarity(std::string_view a, std::string_view b);

// Word-level LCS F1: P = LCS/|cand|, R = LCS/|ref|, F = 2PR/(P+R).
// Either side empty -> 0.0, unless both empty -> 1.0.
double rouge_l(std::string_view candidate, std::string_view reference);
double rouge_l_words(const std::vector<std::string>& candidate,
                     const std::vector<std::string>& reference);

// Nearest-rank quantile: for sorted v1 <= ... <= vn the result is
// v_ceil(q*n), with q=0 mapping to v1. Always an element of the input.
double quantile(std::vector<double> values, double q);

// Word-level LCS length; exposed for reuse by dedup and tests.
std::size_t lcs_length(const std::vector<std::string>& a,
                       const std::vector<std::string>& b);

}  // namespace prefkit
