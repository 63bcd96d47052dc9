#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "prefkit/scoring.hpp"

namespace prefkit {

// Deterministic desk-scale stand-ins for the live endpoints. Every output
// is a pure function of the request payload (plus the construction-time
// client seed), so reruns are byte-identical.

// Seeded pseudo-random word sequences with a configurable length range.
class MockGenerationClient : public GenerationClient {
public:
    explicit MockGenerationClient(std::uint64_t client_seed = 0, int min_words = 5,
                                  int max_words = 40)
        : client_seed_(client_seed), min_words_(min_words), max_words_(max_words) {}

    std::vector<std::string> generate(const std::string& prompt, int n, double temperature,
                                      double top_p, std::uint64_t seed) override;
    std::string id() const override;

private:
    std::uint64_t client_seed_;
    int min_words_;
    int max_words_;
};

// Emits numbered tasks wrapped in <begin>..</end>, the shape the few-shot
// template asks for. Used as the synthetic-prompt generator in tests and
// in mock selfgen runs.
class MockTaskGenerationClient : public GenerationClient {
public:
    explicit MockTaskGenerationClient(std::uint64_t client_seed = 0, int tasks_per_call = 4,
                                      int min_words = 4, int max_words = 14)
        : client_seed_(client_seed), tasks_per_call_(tasks_per_call),
          min_words_(min_words), max_words_(max_words) {}

    std::vector<std::string> generate(const std::string& prompt, int n, double temperature,
                                      double top_p, std::uint64_t seed) override;
    std::string id() const override;

private:
    std::uint64_t client_seed_;
    int tasks_per_call_;
    int min_words_;
    int max_words_;
};

// reward = hash(response text) mod 1000 / 1000.
class MockRewardClient : public RewardClient {
public:
    double score(const std::string& prompt, const std::string& response) override;
    std::string id() const override { return "mock_reward"; }
};

// Deterministic value on the template's scale from (prompt, response,
// template, seed).
class MockJudgeClient : public JudgeClient {
public:
    explicit MockJudgeClient(std::uint64_t client_seed = 0) : client_seed_(client_seed) {}

    double judge(const std::string& prompt, const std::string& response,
                 const std::string& template_id, std::uint64_t seed) override;
    std::string id() const override;

private:
    std::uint64_t client_seed_;
};

class MockPromptJudgeClient : public PromptJudgeClient {
public:
    explicit MockPromptJudgeClient(std::uint64_t client_seed = 0) : client_seed_(client_seed) {}

    double judge_prompt(const std::string& prompt, PromptJudgeMode mode,
                        std::uint64_t seed) override;
    std::string id() const override;

private:
    std::uint64_t client_seed_;
};

// One pseudo-logprob in [-4, 0) per whitespace word of the completion.
// Conditioned and unconditioned calls differ through the prompt hash.
class MockLogProbClient : public LogProbClient {
public:
    explicit MockLogProbClient(std::uint64_t client_seed = 0) : client_seed_(client_seed) {}

    std::vector<double> logprobs(const std::optional<std::string>& prompt,
                                 const std::string& completion) override;
    std::string id() const override;

private:
    std::uint64_t client_seed_;
};

// Wraps a RewardClient to count calls and observe concurrency. Lets tests
// assert cache hits (zero calls) and the max_in_flight ceiling.
class InstrumentedRewardClient : public RewardClient {
public:
    explicit InstrumentedRewardClient(RewardClient& inner, int delay_ms = 0)
        : inner_(inner), delay_ms_(delay_ms) {}

    double score(const std::string& prompt, const std::string& response) override;
    std::string id() const override { return inner_.id(); }

    int calls() const { return calls_.load(); }
    int max_concurrent() const { return max_concurrent_.load(); }

private:
    RewardClient& inner_;
    int delay_ms_;
    std::atomic<int> calls_{0};
    std::atomic<int> in_flight_{0};
    std::atomic<int> max_concurrent_{0};
};

// Fails the first `failures_before_success` calls per unique payload, then
// answers like the inner client. For retry-path tests.
class FlakyRewardClient : public RewardClient {
public:
    FlakyRewardClient(RewardClient& inner, int failures_before_success)
        : inner_(inner), failures_before_success_(failures_before_success) {}

    double score(const std::string& prompt, const std::string& response) override;
    std::string id() const override { return inner_.id(); }

private:
    RewardClient& inner_;
    int failures_before_success_;
    std::mutex mu_;
    std::map<std::string, int> failure_counts_;
};

// Fixed word list used by the mock generators.
const std::vector<std::string>& mock_vocabulary();

// Internal helper shared by the mock generators: `count` words drawn from
// the vocabulary by the given rng.
std::string random_words(std::mt19937_64& rng, int count);

}  // namespace prefkit
