#include "prefkit/pairing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "prefkit/text_metrics.hpp"
#include "prefkit/util.hpp"

namespace prefkit {

PairingStrategy pairing_strategy_from_string(const std::string& name, double k_percent,
                                             std::uint64_t seed) {
    if (name == "best_vs_worst") return BestVsWorst{};
    if (name == "best_vs_bottom") return BestVsBottom{k_percent};
    if (name == "best_vs_random") return BestVsRandom{seed};
    throw std::invalid_argument("unknown pairing strategy: " + name);
}

namespace {

void check_preconditions(const std::vector<ScoredResponse>& responses) {
    if (responses.size() < 2) {
        throw std::invalid_argument("pairing requires at least 2 responses");
    }
    for (const ScoredResponse& r : responses) {
        if (!r.reward || !std::isfinite(*r.reward)) {
            throw std::invalid_argument("pairing requires a finite reward on every response");
        }
    }
}

// Index of the extreme-reward response; ties go to the lowest sample_index.
template <typename Better>
std::size_t extreme_index(const std::vector<ScoredResponse>& responses, Better better) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < responses.size(); ++i) {
        const double ri = *responses[i].reward;
        const double rb = *responses[best].reward;
        if (better(ri, rb) ||
            (ri == rb && responses[i].sample_index < responses[best].sample_index)) {
            best = i;
        }
    }
    return best;
}

PairingResult make_pair(const PromptRecord& prompt,
                        const std::vector<ScoredResponse>& responses,
                        std::size_t chosen_idx, std::size_t rejected_idx) {
    if (*responses[chosen_idx].reward == *responses[rejected_idx].reward) {
        return {std::nullopt, "degenerate: zero reward gap"};
    }
    PairingResult result;
    result.pair = PreferencePair{prompt.id, prompt.text, responses[chosen_idx],
                                 responses[rejected_idx]};
    return result;
}

}  // namespace

PairingResult pair_best_vs_worst(const PromptRecord& prompt,
                                 const std::vector<ScoredResponse>& responses) {
    check_preconditions(responses);
    const std::size_t chosen = extreme_index(responses, std::greater<double>{});
    const std::size_t rejected = extreme_index(responses, std::less<double>{});
    return make_pair(prompt, responses, chosen, rejected);
}

PairingResult pair_best_vs_bottom(const PromptRecord& prompt,
                                  const std::vector<ScoredResponse>& responses,
                                  double k_percent) {
    check_preconditions(responses);
    if (k_percent <= 0.0 || k_percent >= 100.0) {
        throw std::invalid_argument("k_percent must be strictly between 0 and 100");
    }
    const std::size_t chosen = extreme_index(responses, std::greater<double>{});

    std::vector<double> rewards;
    rewards.reserve(responses.size());
    for (const ScoredResponse& r : responses) rewards.push_back(*r.reward);
    const double target = quantile(std::move(rewards), k_percent / 100.0);

    // Among responses carrying the quantile reward, take the lowest sample_index.
    std::size_t rejected = responses.size();
    for (std::size_t i = 0; i < responses.size(); ++i) {
        if (*responses[i].reward != target) continue;
        if (rejected == responses.size() ||
            responses[i].sample_index < responses[rejected].sample_index) {
            rejected = i;
        }
    }
    return make_pair(prompt, responses, chosen, rejected);
}

PairingResult pair_best_vs_random(const PromptRecord& prompt,
                                  const std::vector<ScoredResponse>& responses,
                                  std::uint64_t seed) {
    check_preconditions(responses);
    const std::size_t chosen = extreme_index(responses, std::greater<double>{});

    // Candidates ordered by sample_index so the draw depends only on the
    // response multiset, not on input order.
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < responses.size(); ++i) {
        if (i != chosen) candidates.push_back(i);
    }
    std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
        return responses[a].sample_index < responses[b].sample_index;
    });

    std::mt19937_64 rng(splitmix64(seed ^ fnv1a64(prompt.id)));
    const std::size_t rejected = candidates[uniform_index(rng, candidates.size())];
    return make_pair(prompt, responses, chosen, rejected);
}

PairingResult pair_with_strategy(const PromptRecord& prompt,
                                 const std::vector<ScoredResponse>& responses,
                                 const PairingStrategy& strategy) {
    return std::visit(
        [&](const auto& s) -> PairingResult {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, BestVsWorst>) {
                return pair_best_vs_worst(prompt, responses);
            } else if constexpr (std::is_same_v<T, BestVsBottom>) {
                return pair_best_vs_bottom(prompt, responses, s.k_percent);
            } else {
                return pair_best_vs_random(prompt, responses, s.seed);
            }
        },
        strategy);
}

}  // namespace prefkit
