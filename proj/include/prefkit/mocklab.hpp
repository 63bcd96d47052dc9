#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "prefkit/core.hpp"
#include "prefkit/scoring.hpp"

namespace prefkit {

// Knobs of the synthetic ground-truth world. Everything any client returns
// is a pure function of (seed, request payload), so worlds regenerate
// exactly from these parameters.
struct WorldParams {
    std::uint64_t seed = 0;
    std::size_t n_prompts = 0;
    double frac_low_quality = 0.0;
    double frac_unsafe = 0.0;
    // Reward model: base = 0.15 + 0.6*quality, noise scale shrinks as
    // quality grows, so low-quality prompts score lower and spread wider.
    double reward_noise = 0.08;
    // Response length model (words): base + span*quality, then +-50%.
    int response_len_base = 10;
    int response_len_span = 90;
    double refusal_prob = 0.9;  // per sample, for unsafe prompts

    nlohmann::json to_json() const;
    static WorldParams from_json(const nlohmann::json& doc);
};

struct PromptTruth {
    double quality = 0.0;  // latent, in [0,1]
    bool low_quality = false;
    bool unsafe_prompt = false;
};

// Refusal text emitted by the world for unsafe prompts.
extern const char* const kWorldRefusalText;

class SyntheticWorld {
public:
    explicit SyntheticWorld(const WorldParams& params);

    // The embedded clients point back at this world, so it must stay put.
    SyntheticWorld(const SyntheticWorld&) = delete;
    SyntheticWorld& operator=(const SyntheticWorld&) = delete;

    const WorldParams& params() const { return params_; }
    const Dataset& dataset() const { return dataset_; }

    const PromptTruth& truth_for_id(const std::string& id) const;
    const PromptTruth* truth_for_text(const std::string& text) const;
    std::vector<std::string> low_quality_ids() const;

    GenerationClient& generation() { return *generation_; }
    RewardClient& reward() { return *reward_; }

    // Samples responses consistent with each prompt's hidden quality and
    // safety label.
    std::vector<std::string> sample_responses(const std::string& prompt_text, int n,
                                              std::uint64_t seed) const;
    double score_response(const std::string& prompt_text, const std::string& response) const;

private:
    WorldParams params_;
    Dataset dataset_;
    std::unordered_map<std::string, PromptTruth> by_id_;
    std::unordered_map<std::string, PromptTruth> by_text_;
    std::unique_ptr<GenerationClient> generation_;
    std::unique_ptr<RewardClient> reward_;
};

// Builds the world and its prompt dataset. Low-quality prompts yield
// lower-mean, higher-variance rewards and shorter responses; unsafe
// prompts yield refusals with the configured probability.
SyntheticWorld make_world(std::uint64_t seed, std::size_t n_prompts, double frac_low_quality,
                          double frac_unsafe = 0.0);

struct TruthEval {
    std::size_t removed = 0;
    std::size_t removed_low = 0;
    std::size_t truly_low = 0;
    double precision = 0.0;  // removed-and-truly-low / removed (1.0 if nothing removed)
    double recall = 0.0;     // removed-and-truly-low / truly-low (0.0 if none are low)
};

// Precision/recall of *removing* low-quality prompts, given the ids that
// survived filtering.
TruthEval evaluate_filter_against_truth(const SyntheticWorld& world,
                                        const std::vector<std::string>& survivor_ids);

}  // namespace prefkit
