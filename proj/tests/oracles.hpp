#pragma once

// Independent reference implementations used to cross-check the library.
// Everything here is deliberately written the straightforward quadratic /
// brute-force way and must not call the code under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "prefkit/core.hpp"

namespace oracle {

// Full-table word-level LCS.
inline std::size_t lcs_full_table(const std::vector<std::string>& a,
                                  const std::vector<std::string>& b) {
    std::vector<std::vector<std::size_t>> dp(a.size() + 1,
                                             std::vector<std::size_t>(b.size() + 1, 0));
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            dp[i][j] = a[i - 1] == b[j - 1] ? dp[i - 1][j - 1] + 1
                                            : std::max(dp[i - 1][j], dp[i][j - 1]);
        }
    }
    return dp[a.size()][b.size()];
}

inline double rouge_f1(const std::vector<std::string>& cand,
                       const std::vector<std::string>& ref) {
    if (cand.empty() && ref.empty()) return 1.0;
    if (cand.empty() || ref.empty()) return 0.0;
    const double lcs = static_cast<double>(lcs_full_table(cand, ref));
    const double p = lcs / static_cast<double>(cand.size());
    const double r = lcs / static_cast<double>(ref.size());
    if (p + r == 0.0) return 0.0;
    return 2.0 * p * r / (p + r);
}

// Nearest-rank quantile by explicit sort-and-index.
inline double quantile_sorted(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    std::size_t rank = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(values.size())));
    if (rank < 1) rank = 1;
    if (rank > values.size()) rank = values.size();
    return values[rank - 1];
}

// Exhaustive argmax/argmin with lowest-sample-index tie break.
struct BestWorst {
    std::size_t best = 0;
    std::size_t worst = 0;
};

inline BestWorst scan_best_worst(const std::vector<prefkit::ScoredResponse>& responses) {
    BestWorst result;
    for (std::size_t i = 0; i < responses.size(); ++i) {
        const double r = *responses[i].reward;
        const double best_r = *responses[result.best].reward;
        const double worst_r = *responses[result.worst].reward;
        if (r > best_r ||
            (r == best_r && responses[i].sample_index < responses[result.best].sample_index)) {
            result.best = i;
        }
        if (r < worst_r ||
            (r == worst_r && responses[i].sample_index < responses[result.worst].sample_index)) {
            result.worst = i;
        }
    }
    return result;
}

inline double mean(const std::vector<double>& values) {
    double total = 0.0;
    for (double v : values) total += v;
    return total / static_cast<double>(values.size());
}

// Independent RIP filter: recompute each metric and apply the bounds as a
// plain set comprehension. `len_chars` counts Unicode scalars by explicit
// iteration.
inline std::size_t len_chars(const std::string& text) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < text.size();) {
        const unsigned char c = static_cast<unsigned char>(text[i]);
        std::size_t step = 1;
        if (c >= 0xF0) step = 4;
        else if (c >= 0xE0) step = 3;
        else if (c >= 0xC0) step = 2;
        i += step;
        ++count;
    }
    return count;
}

struct RipBounds {
    std::optional<double> min_rejected_reward;
    std::optional<double> min_rejected_length;
    std::optional<double> max_reward_gap;
};

inline std::vector<std::size_t> brute_force_rip(const std::vector<prefkit::PreferencePair>& pairs,
                                                const RipBounds& bounds) {
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const double rr = *pairs[i].rejected.reward;
        const double rl = static_cast<double>(len_chars(pairs[i].rejected.text));
        const double gap = *pairs[i].chosen.reward - *pairs[i].rejected.reward;
        if (bounds.min_rejected_reward && rr < *bounds.min_rejected_reward) continue;
        if (bounds.min_rejected_length && rl < *bounds.min_rejected_length) continue;
        if (bounds.max_reward_gap && gap > *bounds.max_reward_gap) continue;
        kept.push_back(i);
    }
    return kept;
}

// Keep indices whose value lies in [lo, hi].
inline std::vector<std::size_t> brute_force_range(const std::vector<double>& values, double lo,
                                                  double hi) {
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] >= lo && values[i] <= hi) kept.push_back(i);
    }
    return kept;
}

// Chi-square statistic against a uniform distribution over k buckets.
inline double chi_square_uniform(const std::vector<std::size_t>& counts, std::size_t draws) {
    const double expected = static_cast<double>(draws) / static_cast<double>(counts.size());
    double stat = 0.0;
    for (std::size_t c : counts) {
        const double d = static_cast<double>(c) - expected;
        stat += d * d / expected;
    }
    return stat;
}

}  // namespace oracle
