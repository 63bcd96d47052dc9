#include "prefkit/http_clients.hpp"

#include <cstdlib>
#include <stdexcept>

#include "httplib.h"

namespace prefkit {

using json = nlohmann::json;

namespace {

json post_json(const EndpointConfig& cfg, const std::string& path, const json& body) {
    httplib::Client client(cfg.base_url);
    client.set_connection_timeout(cfg.timeout_seconds);
    client.set_read_timeout(cfg.timeout_seconds);
    httplib::Headers headers;
    if (!cfg.auth_env.empty()) {
        if (const char* token = std::getenv(cfg.auth_env.c_str())) {
            headers.emplace("Authorization", std::string("Bearer ") + token);
        }
    }
    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res) {
        throw std::runtime_error("request to " + cfg.base_url + path + " failed: " +
                                 httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw std::runtime_error("request to " + cfg.base_url + path + " returned status " +
                                 std::to_string(res->status));
    }
    return json::parse(res->body);
}

}  // namespace

std::vector<std::string> HttpGenerationClient::generate(const std::string& prompt, int n,
                                                        double temperature, double top_p,
                                                        std::uint64_t seed) {
    const json reply = post_json(cfg_, "/generate",
                                 {{"prompt", prompt},
                                  {"n", n},
                                  {"temperature", temperature},
                                  {"top_p", top_p},
                                  {"seed", seed}});
    return reply.at("texts").get<std::vector<std::string>>();
}

double HttpRewardClient::score(const std::string& prompt, const std::string& response) {
    const json reply = post_json(cfg_, "/score", {{"prompt", prompt}, {"response", response}});
    return reply.at("reward").get<double>();
}

double HttpJudgeClient::judge(const std::string& prompt, const std::string& response,
                              const std::string& template_id, std::uint64_t seed) {
    const json reply = post_json(cfg_, "/judge",
                                 {{"prompt", prompt},
                                  {"response", response},
                                  {"template_id", template_id},
                                  {"seed", seed}});
    return reply.at("score").get<double>();
}

double HttpPromptJudgeClient::judge_prompt(const std::string& prompt, PromptJudgeMode mode,
                                           std::uint64_t seed) {
    const json reply = post_json(cfg_, "/judge_prompt",
                                 {{"prompt", prompt},
                                  {"mode", mode == PromptJudgeMode::binary ? "binary" : "pointwise"},
                                  {"seed", seed}});
    return reply.at("score").get<double>();
}

std::vector<double> HttpLogProbClient::logprobs(const std::optional<std::string>& prompt,
                                                const std::string& completion) {
    json body{{"completion", completion}};
    if (prompt) body["prompt"] = *prompt;
    const json reply = post_json(cfg_, "/logprobs", body);
    return reply.at("logprobs").get<std::vector<double>>();
}

}  // namespace prefkit
