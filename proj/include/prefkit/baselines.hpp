#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "prefkit/core.hpp"
#include "prefkit/rip.hpp"
#include "prefkit/scoring.hpp"

namespace prefkit {

// Instruction-following difficulty of an (instruction, answer) pair:
// the ratio of the conditioned to the unconditioned average NLL.
struct IfdScore {
    double conditioned_nll = 0.0;    // -mean(logP(answer | instruction))
    double unconditioned_nll = 0.0;  // -mean(logP(answer))
    double ratio = 0.0;              // conditioned_nll / unconditioned_nll
};

IfdScore ifd_score(const std::vector<double>& conditioned_logprobs,
                   const std::vector<double>& unconditioned_logprobs);

// ppl = exp(-mean(logprobs)).
double perplexity(const std::vector<double>& logprobs);

struct TaggedPrompt {
    std::string prompt_id;
    std::vector<std::string> tags;  // lowercased, deduplicated
};

// tags.jsonl: {"prompt_id": str, "tags": [str]}; tags are lowercased and
// deduplicated on load.
std::vector<TaggedPrompt> load_tags(const std::string& path);

struct BaselineReport {
    std::string method;
    std::size_t input_count = 0;
    std::size_t output_count = 0;
    // Resolved numeric bounds, e.g. {"lo": ..., "hi": ...} or {"threshold": ...}.
    std::map<std::string, double> resolved;
    std::vector<DropRecord> drops;

    nlohmann::json to_json() const;
};

struct BaselineOutcome {
    std::vector<PreferencePair> survivors;
    BaselineReport report;
};

// Keep pairs whose IFD over (prompt, chosen response) lies in the inclusive
// nearest-rank quantile range. Both logprob lists must be present on every
// chosen response.
BaselineOutcome ifd_filter(const std::vector<PreferencePair>& pairs, QuantileRange range);

// Keep pairs whose chosen-response perplexity lies in the inclusive
// quantile range.
BaselineOutcome perplexity_filter(const std::vector<PreferencePair>& pairs, QuantileRange range);

// Keep pairs whose chosen/rejected Jaccard similarity satisfies the bound
// (quantile bounds resolve over the similarity population).
BaselineOutcome jaccard_filter(const std::vector<PreferencePair>& pairs, const Bound& bound);

// Keep prompts with at least min_tags tags; optionally subsample the
// survivors without replacement.
std::vector<std::string> instag_complexity_filter(const std::vector<TaggedPrompt>& tagged,
                                                  int min_tags,
                                                  std::optional<std::size_t> sample_size,
                                                  std::uint64_t seed);

// Greedy tag-coverage pass in input order. Tags below tag_freq_min corpus
// frequency are invalid; a prompt is kept iff one of its valid tags has
// been used by fewer than max_per_tag previously kept prompts.
std::vector<std::string> instag_diversity_select(const std::vector<TaggedPrompt>& tagged,
                                                 int tag_freq_min, int max_per_tag,
                                                 std::optional<std::uint64_t> shuffle_seed =
                                                     std::nullopt);

struct PromptJudgeOutcome {
    std::vector<PromptRecord> survivors;
    std::vector<std::pair<std::string, double>> scores;  // (prompt id, mean score)
    std::vector<std::pair<std::string, std::string>> failures;
    BaselineReport report;
};

// Mean of `repeats` judgments per prompt (seeds cfg.seed..+repeats-1);
// keep iff mean >= cutoff. Binary votes average to the useful fraction.
PromptJudgeOutcome prompt_judge_filter(const std::vector<PromptRecord>& prompts,
                                       PromptJudgeMode mode, int repeats, double cutoff,
                                       PromptJudgeClient& client, const AnnotationConfig& cfg);

}  // namespace prefkit
