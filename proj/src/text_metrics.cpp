#include "prefkit/text_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "prefkit/util.hpp"

namespace prefkit {

LengthUnit length_unit_from_string(std::string_view name) {
    if (name == "characters") return LengthUnit::characters;
    if (name == "words") return LengthUnit::words;
    if (name == "provider_tokens") return LengthUnit::provider_tokens;
    throw std::invalid_argument("unknown length unit: " + std::string(name));
}

std::string_view to_string(LengthUnit unit) {
    switch (unit) {
        case LengthUnit::characters: return "characters";
        case LengthUnit::words: return "words";
        case LengthUnit::provider_tokens: return "provider_tokens";
    }
    return "characters";
}

std::size_t text_length(std::string_view text, LengthUnit unit,
                        std::optional<std::size_t> provider_tokens) {
    switch (unit) {
        case LengthUnit::characters:
            return utf8_length(text);
        case LengthUnit::words:
            return split_words(text).size();
        case LengthUnit::provider_tokens:
            if (!provider_tokens) {
                throw std::invalid_argument(
                    "text_length: provider_tokens requested without token data");
            }
            return *provider_tokens;
    }
    return 0;
}

double jaccard_similarity(std::string_view a, std::string_view b) {
    const auto wa = split_words(a);
    const auto wb = split_words(b);
    std::unordered_set<std::string> sa(wa.begin(), wa.end());
    std::unordered_set<std::string> sb(wb.begin(), wb.end());
    if (sa.empty() && sb.empty()) return 1.0;
    std::size_t inter = 0;
    for (const auto& w : sa) inter += sb.count(w);
    const std::size_t uni = sa.size() + sb.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

std::size_t lcs_length(const std::vector<std::string>& a,
                       const std::vector<std::string>& b) {
    if (a.empty() || b.empty()) return 0;
    // Two-row DP; rows along the shorter sequence.
    const auto& longer = a.size() >= b.size() ? a : b;
    const auto& shorter = a.size() >= b.size() ? b : a;
    std::vector<std::size_t> prev(shorter.size() + 1, 0), cur(shorter.size() + 1, 0);
    for (std::size_t i = 1; i <= longer.size(); ++i) {
        for (std::size_t j = 1; j <= shorter.size(); ++j) {
            if (longer[i - 1] == shorter[j - 1]) {
                cur[j] = prev[j - 1] + 1;
            } else {
                cur[j] = std::max(prev[j], cur[j - 1]);
            }
        }
        std::swap(prev, cur);
    }
    return prev[shorter.size()];
}

double rouge_l_words(const std::vector<std::string>& candidate,
                     const std::vector<std::string>& reference) {
    if (candidate.empty() && reference.empty()) return 1.0;
    if (candidate.empty() || reference.empty()) return 0.0;
    const std::size_t lcs = lcs_length(candidate, reference);
    const double p = static_cast<double>(lcs) / static_cast<double>(candidate.size());
    const double r = static_cast<double>(lcs) / static_cast<double>(reference.size());
    if (p + r == 0.0) return 0.0;
    return 2.0 * p * r / (p + r);
}

double rouge_l(std::string_view candidate, std::string_view reference) {
    return rouge_l_words(split_words(candidate), split_words(reference));
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("quantile: empty sample");
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("quantile: q outside [0,1]");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    auto rank = static_cast<std::size_t>(std::ceil(q * n));
    if (rank < 1) rank = 1;
    if (rank > values.size()) rank = values.size();
    return values[rank - 1];
}

}  // namespace prefkit
