#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "prefkit/core.hpp"

namespace prefkit {

// WildChat-style preprocessing rules. Prefixes are matched against the
// trimmed prompt start; dedup is byte equality of trimmed text.
struct PreprocessRules {
    std::set<std::string> keep_langs;        // empty = keep all languages
    std::vector<std::string> drop_prefixes;
    bool first_turn_only = false;
    bool exact_dedup = false;
};

// The Midjourney boilerplate prefix removed from WildChat.
extern const char* const kMidjourneyPrefix;

// Rules matching the WildChat preprocessing run: English only, Midjourney
// prefix dropped, first-turn prompts, exact dedup.
PreprocessRules wildchat_default_rules();

struct PreprocessResult {
    Dataset dataset;
    // (record id, reason) for every dropped record, in input order.
    std::vector<std::pair<std::string, std::string>> drops;
};

// Records failing any rule are removed; surviving order is preserved and a
// provenance entry is appended.
PreprocessResult preprocess(const Dataset& dataset, const PreprocessRules& rules);

// --- JSONL schemas ----------------------------------------------------------
// prompts.jsonl    {"id", "text", "lang"?, "turn_index"?, "meta"?}
// responses.jsonl  {"prompt_id", "sample_index", "text", "reward"?,
//                   "token_logprobs"?, "unconditioned_logprobs"?}
// pairs.jsonl      {"prompt_id", "prompt", "chosen", "rejected",
//                   "chosen_reward", "rejected_reward"}
// tags.jsonl       {"prompt_id", "tags"}
// Unknown fields on prompt lines are preserved under meta.

Dataset load_prompts(const std::string& path);
void write_prompts(const std::vector<PromptRecord>& records, const std::string& path);

// Responses grouped by prompt_id, each group ordered by sample_index.
std::map<std::string, std::vector<ScoredResponse>> load_responses(const std::string& path);
void write_responses(const std::map<std::string, std::vector<ScoredResponse>>& responses,
                     const std::string& path);

std::vector<PreferencePair> load_pairs(const std::string& path);
void write_pairs(const std::vector<PreferencePair>& pairs, const std::string& path);

}  // namespace prefkit
