#include "prefkit/scoring.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "prefkit/util.hpp"

namespace prefkit {

using json = nlohmann::json;
namespace fs = std::filesystem;

PromptJudgeMode prompt_judge_mode_from_string(const std::string& name) {
    if (name == "binary") return PromptJudgeMode::binary;
    if (name == "pointwise") return PromptJudgeMode::pointwise;
    throw std::invalid_argument("unknown prompt judge mode: " + name);
}

std::string AnnotationConfig::stable_hash() const {
    json doc{{"n_samples", n_samples},   {"temperature", temperature},
             {"top_p", top_p},           {"judge_repeats", judge_repeats},
             {"prompt_judge_repeats", prompt_judge_repeats},
             {"seed", seed}};
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(doc.dump())));
    return buf;
}

void with_retries(int attempts, int backoff_ms, const std::function<void()>& fn) {
    for (int attempt = 0;; ++attempt) {
        try {
            fn();
            return;
        } catch (...) {
            if (attempt + 1 >= attempts) throw;
            const auto delay = std::chrono::milliseconds(backoff_ms) * (1 << attempt);
            std::this_thread::sleep_for(delay);
        }
    }
}

void parallel_for_bounded(std::size_t n, int max_in_flight,
                          const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    if (max_in_flight < 1) max_in_flight = 1;
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(max_in_flight));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mu;
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mu);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

FileCache::FileCache(std::string dir) : dir_(std::move(dir)) {
    fs::create_directories(dir_);
}

std::string FileCache::path_for(const std::string& key) const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(key)));
    return (fs::path(dir_) / (std::string(buf) + ".json")).string();
}

std::optional<json> FileCache::try_get(const std::string& key) const {
    std::ifstream in(path_for(key), std::ios::binary);
    if (!in) return std::nullopt;
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error&) {
        return std::nullopt;  // corrupt entries behave like misses
    }
    return doc;
}

void FileCache::put(const std::string& key, const json& value) const {
    const std::string path = path_for(key);
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << value.dump();
        if (!out) throw std::runtime_error("cache write failure: " + tmp);
    }
    fs::rename(tmp, path);
}

namespace {

std::string annotation_cache_key(const PromptRecord& prompt, const AnnotationConfig& cfg,
                                 const GenerationClient& gen, const RewardClient& scorer) {
    json payload{{"prompt_id", prompt.id},
                 {"prompt_text", prompt.text},
                 {"gen_client", gen.id()},
                 {"reward_client", scorer.id()},
                 {"cfg", cfg.stable_hash()}};
    return "annotate:" + payload.dump();
}

std::vector<ScoredResponse> responses_from_cache(const json& doc) {
    std::vector<ScoredResponse> out;
    for (const auto& item : doc) {
        ScoredResponse r;
        r.text = item.at("text").get<std::string>();
        r.reward = item.at("reward").get<double>();
        r.sample_index = item.at("sample_index").get<int>();
        out.push_back(std::move(r));
    }
    return out;
}

json responses_to_cache(const std::vector<ScoredResponse>& responses) {
    json doc = json::array();
    for (const ScoredResponse& r : responses) {
        doc.push_back({{"text", r.text}, {"reward", *r.reward}, {"sample_index", r.sample_index}});
    }
    return doc;
}

}  // namespace

std::vector<ScoredResponse> annotate_prompt(const PromptRecord& prompt,
                                            const AnnotationConfig& cfg,
                                            GenerationClient& gen, RewardClient& scorer) {
    if (cfg.n_samples < 2) {
        throw std::invalid_argument("annotate_prompt: n_samples must be >= 2");
    }

    std::optional<FileCache> cache;
    std::string cache_key;
    if (!cfg.cache_dir.empty()) {
        cache.emplace(cfg.cache_dir);
        cache_key = annotation_cache_key(prompt, cfg, gen, scorer);
        if (auto hit = cache->try_get(cache_key)) return responses_from_cache(*hit);
    }

    const std::uint64_t prompt_seed = splitmix64(cfg.seed ^ fnv1a64(prompt.id));

    std::vector<std::string> texts;
    try {
        with_retries(cfg.retries, cfg.retry_backoff_ms, [&] {
            texts = gen.generate(prompt.text, cfg.n_samples, cfg.temperature, cfg.top_p,
                                 prompt_seed);
        });
    } catch (const std::exception& e) {
        throw AnnotationError("generation failed for prompt \"" + prompt.id + "\": " + e.what());
    }
    if (static_cast<int>(texts.size()) != cfg.n_samples) {
        throw AnnotationError("generation returned " + std::to_string(texts.size()) +
                              " responses for prompt \"" + prompt.id + "\", expected " +
                              std::to_string(cfg.n_samples));
    }

    std::vector<ScoredResponse> responses(texts.size());
    try {
        parallel_for_bounded(texts.size(), cfg.max_in_flight, [&](std::size_t i) {
            double reward = 0.0;
            with_retries(cfg.retries, cfg.retry_backoff_ms,
                         [&] { reward = scorer.score(prompt.text, texts[i]); });
            if (!std::isfinite(reward)) throw std::runtime_error("non-finite reward");
            ScoredResponse r;
            r.text = texts[i];
            r.reward = reward;
            r.sample_index = static_cast<int>(i);
            r.gen_params = GenParams{cfg.temperature, cfg.top_p};
            responses[i] = std::move(r);
        });
    } catch (const std::exception& e) {
        throw AnnotationError("scoring failed for prompt \"" + prompt.id + "\": " + e.what());
    }

    if (cache) cache->put(cache_key, responses_to_cache(responses));
    return responses;
}

AnnotationBatch annotate_dataset(const std::vector<PromptRecord>& prompts,
                                 const AnnotationConfig& cfg, GenerationClient& gen,
                                 RewardClient& scorer) {
    AnnotationBatch batch;
    for (const PromptRecord& prompt : prompts) {
        try {
            batch.annotated.push_back({prompt, annotate_prompt(prompt, cfg, gen, scorer)});
        } catch (const AnnotationError& e) {
            batch.failures.emplace_back(prompt.id, e.what());
        }
    }
    return batch;
}

double judge_reward(const std::string& prompt, const std::string& response,
                    const AnnotationConfig& cfg, JudgeClient& judge,
                    const std::string& template_id) {
    if (cfg.judge_repeats < 1) {
        throw std::invalid_argument("judge_reward: judge_repeats must be >= 1");
    }
    double total = 0.0;
    for (int i = 0; i < cfg.judge_repeats; ++i) {
        double score = 0.0;
        with_retries(cfg.retries, cfg.retry_backoff_ms, [&] {
            score = judge.judge(prompt, response, template_id, cfg.seed + static_cast<std::uint64_t>(i));
        });
        total += score;
    }
    return total / cfg.judge_repeats;
}

double aggregate_helpsteer(const AttributeRewards& attrs) {
    const std::pair<const char*, const std::optional<double>&> fields[] = {
        {"helpfulness", attrs.helpfulness}, {"correctness", attrs.correctness},
        {"coherence", attrs.coherence},     {"complexity", attrs.complexity},
        {"verbosity", attrs.verbosity},
    };
    double total = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
        if (!fields[i].second) {
            throw std::invalid_argument(std::string("aggregate_helpsteer: missing attribute ") +
                                        fields[i].first);
        }
        total += kHelpSteerWeights[i] * *fields[i].second;
    }
    return total;
}

bool looks_like_refusal(const std::string& response) {
    static const char* kOpeners[] = {
        "i can't", "i cannot", "i won't", "i'm sorry", "i am sorry",
        "i'm not able to", "i am not able to", "sorry, ",
    };
    const std::string head = to_lower(std::string(trim(response)).substr(0, 32));
    for (const char* opener : kOpeners) {
        if (head.rfind(opener, 0) == 0) return true;
    }
    return false;
}

SafetyLabel refusal_probe(const std::string& prompt, int k, GenerationClient& gen,
                          const RefusalDetector& detector, const AnnotationConfig& cfg) {
    if (k < 1) throw std::invalid_argument("refusal_probe: k must be >= 1");
    for (int i = 0; i < k; ++i) {
        std::vector<std::string> texts;
        with_retries(cfg.retries, cfg.retry_backoff_ms, [&] {
            texts = gen.generate(prompt, 1, cfg.temperature, cfg.top_p,
                                 cfg.seed + static_cast<std::uint64_t>(i));
        });
        if (texts.empty()) throw std::runtime_error("refusal_probe: empty generation");
        if (detector(texts[0])) return SafetyLabel::unsafe;
    }
    return SafetyLabel::safe;
}

}  // namespace prefkit
