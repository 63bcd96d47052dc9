#include "prefkit/mocklab.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "prefkit/mocks.hpp"
#include "prefkit/util.hpp"

namespace prefkit {

using json = nlohmann::json;

const char* const kWorldRefusalText = "I can't help with that request.";

json WorldParams::to_json() const {
    return json{{"seed", seed},
                {"n_prompts", n_prompts},
                {"frac_low_quality", frac_low_quality},
                {"frac_unsafe", frac_unsafe},
                {"reward_noise", reward_noise},
                {"response_len_base", response_len_base},
                {"response_len_span", response_len_span},
                {"refusal_prob", refusal_prob}};
}

WorldParams WorldParams::from_json(const json& doc) {
    WorldParams p;
    p.seed = doc.at("seed").get<std::uint64_t>();
    p.n_prompts = doc.at("n_prompts").get<std::size_t>();
    p.frac_low_quality = doc.at("frac_low_quality").get<double>();
    p.frac_unsafe = doc.at("frac_unsafe").get<double>();
    p.reward_noise = doc.value("reward_noise", p.reward_noise);
    p.response_len_base = doc.value("response_len_base", p.response_len_base);
    p.response_len_span = doc.value("response_len_span", p.response_len_span);
    p.refusal_prob = doc.value("refusal_prob", p.refusal_prob);
    return p;
}

namespace {

std::string world_tag(const WorldParams& params) { return std::to_string(params.seed); }

class WorldGenerationClient : public GenerationClient {
public:
    explicit WorldGenerationClient(const SyntheticWorld& world) : world_(world) {}

    std::vector<std::string> generate(const std::string& prompt, int n, double, double,
                                      std::uint64_t seed) override {
        return world_.sample_responses(prompt, n, seed);
    }
    std::string id() const override { return "world_gen:" + world_tag(world_.params()); }

private:
    const SyntheticWorld& world_;
};

class WorldRewardClient : public RewardClient {
public:
    explicit WorldRewardClient(const SyntheticWorld& world) : world_(world) {}

    double score(const std::string& prompt, const std::string& response) override {
        return world_.score_response(prompt, response);
    }
    std::string id() const override { return "world_reward:" + world_tag(world_.params()); }

private:
    const SyntheticWorld& world_;
};

}  // namespace

SyntheticWorld::SyntheticWorld(const WorldParams& params) : params_(params) {
    if (params_.frac_low_quality < 0.0 || params_.frac_low_quality > 1.0 ||
        params_.frac_unsafe < 0.0 || params_.frac_unsafe > 1.0) {
        throw std::invalid_argument("SyntheticWorld: fractions must lie in [0,1]");
    }

    const std::string seed_str = std::to_string(params_.seed);
    std::unordered_set<std::string> texts;
    for (std::size_t i = 0; i < params_.n_prompts; ++i) {
        char buf[24];
        std::snprintf(buf, sizeof(buf), "w%06zu", i);
        const std::string id = buf;

        PromptTruth truth;
        truth.low_quality = hash01({seed_str, id, "lowq"}) < params_.frac_low_quality;
        truth.unsafe_prompt = hash01({seed_str, id, "unsafe"}) < params_.frac_unsafe;
        const double u = hash01({seed_str, id, "quality"});
        truth.quality = truth.low_quality ? 0.05 + 0.30 * u : 0.60 + 0.40 * u;

        std::mt19937_64 rng(splitmix64(params_.seed ^ fnv1a64(id + "/text")));
        std::string text = random_words(rng, 8 + static_cast<int>(uniform_index(rng, 9)));
        while (!texts.insert(text).second) {
            text += ' ';
            text += mock_vocabulary()[uniform_index(rng, mock_vocabulary().size())];
        }

        PromptRecord rec;
        rec.id = id;
        rec.text = text;
        rec.lang = "en";
        dataset_.records.push_back(std::move(rec));
        by_id_[id] = truth;
        by_text_[text] = truth;
    }
    dataset_.provenance_log.push_back("make_world: seed " + seed_str + ", " +
                                      std::to_string(params_.n_prompts) + " prompts");
    generation_ = std::make_unique<WorldGenerationClient>(*this);
    reward_ = std::make_unique<WorldRewardClient>(*this);
}

const PromptTruth& SyntheticWorld::truth_for_id(const std::string& id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) throw std::invalid_argument("unknown world prompt id: " + id);
    return it->second;
}

const PromptTruth* SyntheticWorld::truth_for_text(const std::string& text) const {
    auto it = by_text_.find(text);
    return it == by_text_.end() ? nullptr : &it->second;
}

std::vector<std::string> SyntheticWorld::low_quality_ids() const {
    std::vector<std::string> ids;
    for (const PromptRecord& rec : dataset_.records) {
        if (by_id_.at(rec.id).low_quality) ids.push_back(rec.id);
    }
    return ids;
}

std::vector<std::string> SyntheticWorld::sample_responses(const std::string& prompt_text, int n,
                                                          std::uint64_t seed) const {
    if (n < 1) throw std::invalid_argument("sample_responses: n must be >= 1");
    const PromptTruth* truth = truth_for_text(prompt_text);
    const double quality = truth ? truth->quality : 0.5;
    const bool unsafe_prompt = truth && truth->unsafe_prompt;

    std::mt19937_64 rng(
        splitmix64(params_.seed ^ fnv1a64(prompt_text) ^ splitmix64(seed)));
    std::vector<std::string> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        if (unsafe_prompt && uniform_real(rng) < params_.refusal_prob) {
            out.push_back(kWorldRefusalText);
            continue;
        }
        const double mean_len = params_.response_len_base + params_.response_len_span * quality;
        const int len =
            std::max(3, static_cast<int>(std::lround(mean_len * (0.5 + uniform_real(rng)))));
        out.push_back(random_words(rng, len));
    }
    return out;
}

double SyntheticWorld::score_response(const std::string& prompt_text,
                                      const std::string& response) const {
    const std::string seed_str = std::to_string(params_.seed);
    if (response == kWorldRefusalText) {
        return 0.02 + 0.05 * hash01({seed_str, prompt_text, response, "refusal"});
    }
    const PromptTruth* truth = truth_for_text(prompt_text);
    const double quality = truth ? truth->quality : 0.5;
    const double base = 0.15 + 0.60 * quality;
    const double scale = params_.reward_noise * (1.5 - quality);
    const double noise = (2.0 * hash01({seed_str, prompt_text, response}) - 1.0) * scale;
    return std::clamp(base + noise, 0.0, 1.0);
}

SyntheticWorld make_world(std::uint64_t seed, std::size_t n_prompts, double frac_low_quality,
                          double frac_unsafe) {
    WorldParams params;
    params.seed = seed;
    params.n_prompts = n_prompts;
    params.frac_low_quality = frac_low_quality;
    params.frac_unsafe = frac_unsafe;
    return SyntheticWorld(params);
}

TruthEval evaluate_filter_against_truth(const SyntheticWorld& world,
                                        const std::vector<std::string>& survivor_ids) {
    std::unordered_set<std::string> survivors(survivor_ids.begin(), survivor_ids.end());
    for (const std::string& id : survivors) {
        world.truth_for_id(id);  // survivors must be world prompts
    }

    TruthEval eval;
    for (const PromptRecord& rec : world.dataset().records) {
        const PromptTruth& truth = world.truth_for_id(rec.id);
        if (truth.low_quality) ++eval.truly_low;
        if (!survivors.count(rec.id)) {
            ++eval.removed;
            if (truth.low_quality) ++eval.removed_low;
        }
    }
    eval.precision = eval.removed == 0
                         ? 1.0
                         : static_cast<double>(eval.removed_low) / static_cast<double>(eval.removed);
    eval.recall = eval.truly_low == 0
                      ? 0.0
                      : static_cast<double>(eval.removed_low) / static_cast<double>(eval.truly_low);
    return eval;
}

}  // namespace prefkit
