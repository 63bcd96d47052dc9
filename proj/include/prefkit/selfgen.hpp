#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "prefkit/core.hpp"
#include "prefkit/rip.hpp"
#include "prefkit/scoring.hpp"

namespace prefkit {

// Few-shot seed pool, usually the RIP-curated prompt set or a seeded
// subsample of it.
struct SeedPool {
    std::vector<PromptRecord> prompts;
    std::optional<std::size_t> subsample_size;
    std::uint64_t seed = 0;

    // The prompts actually used for few-shot sampling (subsample applied).
    std::vector<PromptRecord> effective_prompts() const;
};

struct SyntheticPrompt {
    std::string text;
    std::vector<std::string> fewshot_ids;  // exactly 8, resolving to pool members
    std::uint64_t generation_seed = 0;
};

// The 8-shot generation prompt, rendered byte-exactly from the stored
// template asset (or a caller-supplied override with the same
// {INSTRUCTION 1..8} placeholders). Any example containing a literal
// </end> is rejected so the rendered markers stay parseable.
std::string build_fewshot_prompt(const std::vector<PromptRecord>& examples,
                                 const std::string& template_text = "");

// The shipped template text.
const std::string& default_fewshot_template();

// Number of few-shot slots in the template.
inline constexpr std::size_t kFewshotCount = 8;

// Every <begin>...</end> span of the model output, in order, trimmed,
// empty spans dropped. Unparseable output yields an empty list.
std::vector<std::string> parse_generated_tasks(const std::string& model_output);

// Sequential dedup: a candidate is dropped iff its ROUGE-L against any
// existing instruction or any previously accepted candidate reaches the
// threshold. Accepted candidates join the comparison set.
std::vector<std::string> dedup_candidates(const std::vector<std::string>& candidates,
                                          const std::vector<std::string>& existing,
                                          double threshold);

// Keywords that text-only models cannot act on; matched whole-word and
// case-insensitively.
const std::vector<std::string>& default_excluded_keywords();

bool contains_keyword(const std::string& text, const std::string& keyword);

std::vector<std::string> keyword_exclude(const std::vector<std::string>& candidates,
                                         const std::vector<std::string>& keywords);

struct SelfGenOptions {
    double dedup_threshold = 0.7;
    std::vector<std::string> keywords = default_excluded_keywords();
    // Instructions beyond the seed pool that candidates must not duplicate.
    std::vector<std::string> existing_texts;
    // 0 = derived from target (4 calls per requested prompt, at least 32).
    std::size_t max_generation_calls = 0;
    std::string synthetic_id_prefix = "syn-";
    // Empty = the shipped template asset.
    std::string fewshot_template;
};

struct SelfRipClients {
    GenerationClient& task_gen;      // produces new instructions from few-shots
    GenerationClient& response_gen;  // samples responses for RIP annotation
    RewardClient& reward;
};

struct GenerationStageReport {
    std::size_t calls = 0;
    std::size_t parsed = 0;
    std::size_t dropped_dedup = 0;
    std::size_t dropped_keyword = 0;
    std::size_t accepted = 0;
    bool target_reached = false;
};

struct SelfRipResult {
    std::vector<SyntheticPrompt> prompts;     // accepted candidates (pre post-filter)
    std::vector<PromptRecord> records;        // the same prompts as records
    std::vector<PreferencePair> pairs;        // RIP-post-filtered preference pairs
    GenerationStageReport generation;
    FilterReport post_filter;
    std::vector<std::pair<std::string, std::string>> annotation_failures;
    bool complete = false;  // target reached within the generation budget

    nlohmann::json to_json() const;
};

// Full pipeline: few-shot generation from the seed pool until `target`
// candidates pass dedup and keyword exclusion (or the budget runs out,
// which flags a partial result), then annotate, pair best-vs-worst and
// apply the RIP post-filter with `policy` resolved over the synthetic
// population.
SelfRipResult self_rip_pipeline(const SeedPool& seed_pool, std::size_t target,
                                const AnnotationConfig& cfg, const SelfRipClients& clients,
                                const ThresholdPolicy& policy,
                                const SelfGenOptions& options = {});

// synthetic_prompts.jsonl: the prompts.jsonl schema plus fewshot_ids and
// generation_seed.
void write_synthetic_prompts(const std::vector<SyntheticPrompt>& prompts,
                             const std::string& id_prefix, const std::string& path);

}  // namespace prefkit
