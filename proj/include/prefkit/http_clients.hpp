#pragma once

#include <memory>
#include <string>

#include "prefkit/scoring.hpp"

namespace prefkit {

// Connection settings shared by the live clients. `auth_env` names an
// environment variable whose value is sent as a bearer token.
struct EndpointConfig {
    std::string base_url;         // e.g. http://localhost:8080
    std::string client_id;        // cache/provenance identity of the endpoint
    std::string auth_env;         // empty = no Authorization header
    int timeout_seconds = 120;
};

// Wire contract (JSON bodies):
//   POST /generate     {prompt, n, temperature, top_p, seed} -> {texts: [...]}
//   POST /score        {prompt, response}                    -> {reward}
//   POST /judge        {prompt, response, template_id, seed} -> {score}
//   POST /judge_prompt {prompt, mode, seed}                  -> {score}
//   POST /logprobs     {prompt?, completion}                 -> {logprobs: [...]}

class HttpGenerationClient : public GenerationClient {
public:
    explicit HttpGenerationClient(EndpointConfig cfg) : cfg_(std::move(cfg)) {}
    std::vector<std::string> generate(const std::string& prompt, int n, double temperature,
                                      double top_p, std::uint64_t seed) override;
    std::string id() const override { return cfg_.client_id; }

private:
    EndpointConfig cfg_;
};

class HttpRewardClient : public RewardClient {
public:
    explicit HttpRewardClient(EndpointConfig cfg) : cfg_(std::move(cfg)) {}
    double score(const std::string& prompt, const std::string& response) override;
    std::string id() const override { return cfg_.client_id; }

private:
    EndpointConfig cfg_;
};

class HttpJudgeClient : public JudgeClient {
public:
    explicit HttpJudgeClient(EndpointConfig cfg) : cfg_(std::move(cfg)) {}
    double judge(const std::string& prompt, const std::string& response,
                 const std::string& template_id, std::uint64_t seed) override;
    std::string id() const override { return cfg_.client_id; }

private:
    EndpointConfig cfg_;
};

class HttpPromptJudgeClient : public PromptJudgeClient {
public:
    explicit HttpPromptJudgeClient(EndpointConfig cfg) : cfg_(std::move(cfg)) {}
    double judge_prompt(const std::string& prompt, PromptJudgeMode mode,
                        std::uint64_t seed) override;
    std::string id() const override { return cfg_.client_id; }

private:
    EndpointConfig cfg_;
};

class HttpLogProbClient : public LogProbClient {
public:
    explicit HttpLogProbClient(EndpointConfig cfg) : cfg_(std::move(cfg)) {}
    std::vector<double> logprobs(const std::optional<std::string>& prompt,
                                 const std::string& completion) override;
    std::string id() const override { return cfg_.client_id; }

private:
    EndpointConfig cfg_;
};

}  // namespace prefkit
