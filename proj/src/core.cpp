#include "prefkit/core.hpp"

#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "prefkit/util.hpp"

namespace prefkit {

namespace {

void check_response(const ScoredResponse& r, std::size_t pair_index,
                    const char* side, std::vector<Violation>& out) {
    if (r.reward && !std::isfinite(*r.reward)) {
        out.push_back({"nonfinite_reward",
                       std::string(side) + " reward is not finite",
                       std::nullopt, pair_index});
    }
    if (r.token_logprobs && r.unconditioned_logprobs &&
        r.token_logprobs->size() != r.unconditioned_logprobs->size()) {
        out.push_back({"logprob_length_mismatch",
                       std::string(side) + " conditioned/unconditioned logprob lists differ in length",
                       std::nullopt, pair_index});
    }
}

}  // namespace

ValidationReport validate_dataset(const Dataset& dataset) {
    ValidationReport report;

    std::unordered_set<std::string> seen_ids;
    std::unordered_set<std::string> known_ids;
    for (std::size_t i = 0; i < dataset.records.size(); ++i) {
        const PromptRecord& rec = dataset.records[i];
        if (!seen_ids.insert(rec.id).second) {
            report.violations.push_back(
                {"duplicate_id", "record id \"" + rec.id + "\" occurs more than once", i, std::nullopt});
        }
        known_ids.insert(rec.id);
        if (trim(rec.text).empty()) {
            report.violations.push_back(
                {"empty_text", "record \"" + rec.id + "\" has empty text after trim", i, std::nullopt});
        }
        if (rec.turn_index < 0) {
            report.violations.push_back(
                {"negative_turn_index", "record \"" + rec.id + "\" has negative turn_index", i, std::nullopt});
        }
    }

    for (std::size_t i = 0; i < dataset.pairs.size(); ++i) {
        const PreferencePair& pair = dataset.pairs[i];
        if (!dataset.records.empty() && !known_ids.count(pair.prompt_id)) {
            report.violations.push_back(
                {"unresolved_prompt_id",
                 "pair prompt_id \"" + pair.prompt_id + "\" has no matching record",
                 std::nullopt, i});
        }
        if (!pair.chosen.reward || !pair.rejected.reward) {
            report.violations.push_back(
                {"missing_reward", "pair \"" + pair.prompt_id + "\" is missing a reward",
                 std::nullopt, i});
        } else if (*pair.chosen.reward < *pair.rejected.reward) {
            report.violations.push_back(
                {"reward_order", "pair \"" + pair.prompt_id + "\" has chosen.reward < rejected.reward",
                 std::nullopt, i});
        }
        check_response(pair.chosen, i, "chosen", report.violations);
        check_response(pair.rejected, i, "rejected", report.violations);
    }

    return report;
}

nlohmann::json ValidationReport::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const Violation& v : violations) {
        nlohmann::json item{{"kind", v.kind}, {"detail", v.detail}};
        if (v.record_index) item["record_index"] = *v.record_index;
        if (v.pair_index) item["pair_index"] = *v.pair_index;
        arr.push_back(std::move(item));
    }
    return nlohmann::json{{"ok", ok()}, {"violations", std::move(arr)}};
}

}  // namespace prefkit
