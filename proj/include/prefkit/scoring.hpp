#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "prefkit/core.hpp"

namespace prefkit {

// --- client contracts ---------------------------------------------------
// Mocks must be exact functions of (inputs, seed); live endpoints are
// best-effort. `id()` feeds cache keys, so two clients that can disagree
// must not share an id.

class GenerationClient {
public:
    virtual ~GenerationClient() = default;
    virtual std::vector<std::string> generate(const std::string& prompt, int n,
                                              double temperature, double top_p,
                                              std::uint64_t seed) = 0;
    virtual std::string id() const = 0;
};

class RewardClient {
public:
    virtual ~RewardClient() = default;
    virtual double score(const std::string& prompt, const std::string& response) = 0;
    virtual std::string id() const = 0;
};

class JudgeClient {
public:
    virtual ~JudgeClient() = default;
    virtual double judge(const std::string& prompt, const std::string& response,
                         const std::string& template_id, std::uint64_t seed) = 0;
    virtual std::string id() const = 0;
};

enum class PromptJudgeMode { binary, pointwise };

PromptJudgeMode prompt_judge_mode_from_string(const std::string& name);

class PromptJudgeClient {
public:
    virtual ~PromptJudgeClient() = default;
    // binary -> {0,1}; pointwise -> [0,5]
    virtual double judge_prompt(const std::string& prompt, PromptJudgeMode mode,
                                std::uint64_t seed) = 0;
    virtual std::string id() const = 0;
};

class LogProbClient {
public:
    virtual ~LogProbClient() = default;
    // Per-token natural-log probabilities of `completion`, conditioned on
    // `prompt` when given. All values <= 0.
    virtual std::vector<double> logprobs(const std::optional<std::string>& prompt,
                                         const std::string& completion) = 0;
    virtual std::string id() const = 0;
};

// --- configuration --------------------------------------------------------

struct AnnotationConfig {
    int n_samples = 64;
    double temperature = 0.8;
    double top_p = 0.95;
    int judge_repeats = 10;
    int prompt_judge_repeats = 5;
    int max_in_flight = 8;
    std::string cache_dir;  // empty disables caching
    std::uint64_t seed = 0;
    int retries = 3;
    int retry_backoff_ms = 25;

    std::string stable_hash() const;
};

struct AnnotationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- operations -------------------------------------------------------------

// Generate n_samples responses for the prompt and score each one.
// sample_index runs 0..N-1 in generation order; the result is cached under
// (prompt id, client ids, config hash) when cache_dir is set. A client
// failure that survives the retry budget raises AnnotationError; partial
// results are never returned.
std::vector<ScoredResponse> annotate_prompt(const PromptRecord& prompt,
                                            const AnnotationConfig& cfg,
                                            GenerationClient& gen, RewardClient& scorer);

struct AnnotatedPrompt {
    PromptRecord prompt;
    std::vector<ScoredResponse> responses;
};

struct AnnotationBatch {
    std::vector<AnnotatedPrompt> annotated;                       // input order
    std::vector<std::pair<std::string, std::string>> failures;    // (id, error)
};

// Per-prompt failures are recorded and skipped, never partially emitted.
AnnotationBatch annotate_dataset(const std::vector<PromptRecord>& prompts,
                                 const AnnotationConfig& cfg, GenerationClient& gen,
                                 RewardClient& scorer);

// Mean of judge_repeats evaluations with seeds cfg.seed .. cfg.seed+repeats-1.
double judge_reward(const std::string& prompt, const std::string& response,
                    const AnnotationConfig& cfg, JudgeClient& judge,
                    const std::string& template_id = "response_quality_0_10");

// Adapter so LLM-as-a-Judge averages can stand in for a reward classifier.
class JudgeRewardAdapter : public RewardClient {
public:
    JudgeRewardAdapter(JudgeClient& judge, AnnotationConfig cfg,
                       std::string template_id = "response_quality_0_10")
        : judge_(judge), cfg_(std::move(cfg)), template_id_(std::move(template_id)) {}

    double score(const std::string& prompt, const std::string& response) override {
        return judge_reward(prompt, response, cfg_, judge_, template_id_);
    }
    std::string id() const override { return "judge_mean:" + judge_.id() + ":" + template_id_; }

private:
    JudgeClient& judge_;
    AnnotationConfig cfg_;
    std::string template_id_;
};

// helpfulness, correctness, coherence, complexity, verbosity weights for the
// HelpSteer2 aggregate reward.
inline constexpr double kHelpSteerWeights[5] = {0.65, 0.8, 0.45, 0.55, 0.4};

// Weighted sum of the five attributes; any missing attribute is an error.
double aggregate_helpsteer(const AttributeRewards& attrs);

enum class SafetyLabel { safe, unsafe };

using RefusalDetector = std::function<bool(const std::string&)>;

// Crude default: flags responses that open with a refusal phrase.
bool looks_like_refusal(const std::string& response);

// Sample the prompt k times (seeds cfg.seed..cfg.seed+k-1); unsafe iff the
// detector flags at least one response.
SafetyLabel refusal_probe(const std::string& prompt, int k, GenerationClient& gen,
                          const RefusalDetector& detector, const AnnotationConfig& cfg);

// --- judge templates ----------------------------------------------------
// Templates declare their own score direction; filters consume normalized
// higher-is-better scores.

struct JudgeTemplate {
    std::string id;
    std::string text;  // with {prompt} / {response} placeholders
    double min_score = 0.0;
    double max_score = 1.0;
    bool higher_is_better = true;
};

const JudgeTemplate& get_judge_template(const std::string& id);
std::vector<std::string> judge_template_ids();

// Raw template-scale score -> higher-is-better [0,1].
double normalize_judge_score(const JudgeTemplate& tmpl, double raw);

std::string render_template(const JudgeTemplate& tmpl, const std::string& prompt,
                            const std::string& response = "");

// --- retry / concurrency helpers -----------------------------------------

// Runs fn up to `attempts` times with exponential backoff; rethrows the
// last failure.
void with_retries(int attempts, int backoff_ms, const std::function<void()>& fn);

// Runs fn(0..n-1) on up to max_in_flight worker threads. The first thrown
// exception is rethrown on the caller after all workers finish.
void parallel_for_bounded(std::size_t n, int max_in_flight,
                          const std::function<void(std::size_t)>& fn);

// --- cache ------------------------------------------------------------------

// Content-addressed JSON store: key -> <fnv1a64(key) as hex>.json under dir.
class FileCache {
public:
    explicit FileCache(std::string dir);

    std::optional<nlohmann::json> try_get(const std::string& key) const;
    void put(const std::string& key, const nlohmann::json& value) const;

private:
    std::string path_for(const std::string& key) const;
    std::string dir_;
};

}  // namespace prefkit
