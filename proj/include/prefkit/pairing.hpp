#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "prefkit/core.hpp"

namespace prefkit {

struct BestVsWorst {};
struct BestVsBottom {
    double k_percent = 25.0;  // strictly between 0 and 100
};
struct BestVsRandom {
    std::uint64_t seed = 0;
};
using PairingStrategy = std::variant<BestVsWorst, BestVsBottom, BestVsRandom>;

PairingStrategy pairing_strategy_from_string(const std::string& name, double k_percent,
                                             std::uint64_t seed);

// A pairing either yields a pair or drops the prompt (degenerate: no strict
// reward ordering is possible). Degenerates are never emitted as pairs.
struct PairingResult {
    std::optional<PreferencePair> pair;
    std::string drop_reason;  // set iff !pair

    bool degenerate() const { return !pair.has_value(); }
};

// chosen = argmax reward, rejected = argmin reward; ties broken by lowest
// sample_index. All-equal rewards are degenerate.
PairingResult pair_best_vs_worst(const PromptRecord& prompt,
                                 const std::vector<ScoredResponse>& responses);

// rejected = the response whose reward is the nearest-rank k_percent
// quantile of all rewards (k -> 0 recovers the minimum).
PairingResult pair_best_vs_bottom(const PromptRecord& prompt,
                                  const std::vector<ScoredResponse>& responses,
                                  double k_percent);

// rejected drawn uniformly from the non-chosen responses by a seeded
// deterministic generator.
PairingResult pair_best_vs_random(const PromptRecord& prompt,
                                  const std::vector<ScoredResponse>& responses,
                                  std::uint64_t seed);

PairingResult pair_with_strategy(const PromptRecord& prompt,
                                 const std::vector<ScoredResponse>& responses,
                                 const PairingStrategy& strategy);

}  // namespace prefkit
