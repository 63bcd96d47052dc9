#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace prefkit {

// One instruction x. `meta` is an opaque key-value map; unknown fields from
// ingested files are preserved there instead of being rejected.
struct PromptRecord {
    std::string id;
    std::string text;
    std::optional<std::string> lang;
    int turn_index = 0;
    nlohmann::json meta = nlohmann::json::object();

    bool operator==(const PromptRecord&) const = default;
};

struct GenParams {
    double temperature = 0.0;
    double top_p = 0.0;

    bool operator==(const GenParams&) const = default;
};

// One sampled response with its annotator reward. Log-probabilities are
// natural-log and, when both lists are present, refer to the same
// tokenization of `text` (equal lengths).
struct ScoredResponse {
    std::string text;
    std::optional<double> reward;
    int sample_index = 0;
    std::optional<GenParams> gen_params;
    std::optional<std::vector<double>> token_logprobs;
    std::optional<std::vector<double>> unconditioned_logprobs;

    bool operator==(const ScoredResponse&) const = default;
};

// (x, y_w, y_l): invariant chosen.reward >= rejected.reward, both present.
struct PreferencePair {
    std::string prompt_id;
    std::string prompt_text;
    ScoredResponse chosen;
    ScoredResponse rejected;

    bool operator==(const PreferencePair&) const = default;
};

// Likert-5 attribute rewards. Each value is on [0,4] or [1,5] depending on
// the source convention (recorded in dataset meta); absent attributes make
// aggregation an error.
struct AttributeRewards {
    std::optional<double> helpfulness;
    std::optional<double> correctness;
    std::optional<double> coherence;
    std::optional<double> complexity;
    std::optional<double> verbosity;
};

struct Dataset {
    std::vector<PromptRecord> records;
    std::vector<PreferencePair> pairs;
    std::vector<std::string> provenance_log;
};

struct Violation {
    std::string kind;                       // "duplicate_id", "empty_text", ...
    std::string detail;
    std::optional<std::size_t> record_index;
    std::optional<std::size_t> pair_index;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    nlohmann::json to_json() const;
};

// Pure invariant check; violations are reported, never thrown.
ValidationReport validate_dataset(const Dataset& dataset);

}  // namespace prefkit
