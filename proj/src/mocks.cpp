#include "prefkit/mocks.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>
#include <thread>

#include "prefkit/util.hpp"

namespace prefkit {

const std::vector<std::string>& mock_vocabulary() {
    static const std::vector<std::string> vocab = {
        "the",      "a",       "of",       "and",      "to",      "in",      "is",
        "for",      "on",      "with",     "as",       "by",      "an",      "be",
        "this",     "that",    "from",     "or",       "are",     "it",      "about",
        "explain",  "write",   "describe", "compare",  "list",    "summarize",
        "analyze",  "design",  "plan",     "draft",    "outline", "review",  "evaluate",
        "history",  "science", "energy",   "market",   "model",   "theory",  "method",
        "system",   "process", "story",    "essay",    "report",  "letter",  "poem",
        "recipe",   "budget",  "schedule", "strategy", "lesson",  "quiz",    "question",
        "answer",   "detail",  "example",  "argument", "summary", "context", "evidence",
        "climate",  "economy", "culture",  "language", "travel",  "health",  "fitness",
        "garden",   "city",    "river",    "mountain", "ocean",   "forest",  "animal",
        "machine",  "network", "database", "function", "variable","matrix",  "vector",
        "protein",  "molecule","planet",   "galaxy",   "circuit", "engine",  "bridge",
        "novel",    "movie",   "song",     "painting", "sculpture","dance",  "theater",
        "teacher",  "student", "doctor",   "engineer", "farmer",  "artist",  "writer",
        "morning",  "evening", "winter",   "summer",   "spring",  "autumn",  "holiday",
        "project",  "meeting", "deadline", "contract", "invoice", "policy",  "election",
        "justice",  "freedom", "courage",  "wisdom",   "balance", "harmony", "growth",
        "coffee",   "bread",   "cheese",   "salad",    "soup",    "dessert", "spice",
        "whisper",  "shadow",  "mirror",   "lantern",  "compass", "anchor",  "voyage",
    };
    return vocab;
}

std::string random_words(std::mt19937_64& rng, int count) {
    const auto& vocab = mock_vocabulary();
    std::string out;
    for (int i = 0; i < count; ++i) {
        if (i) out.push_back(' ');
        out += vocab[uniform_index(rng, vocab.size())];
    }
    return out;
}

namespace {

std::mt19937_64 request_rng(std::uint64_t client_seed, const std::string& payload,
                            std::uint64_t seed) {
    return std::mt19937_64(splitmix64(client_seed ^ fnv1a64(payload) ^ splitmix64(seed)));
}

}  // namespace

std::vector<std::string> MockGenerationClient::generate(const std::string& prompt, int n,
                                                        double temperature, double top_p,
                                                        std::uint64_t seed) {
    (void)temperature;
    (void)top_p;
    if (n < 1) throw std::invalid_argument("generate: n must be >= 1");
    std::mt19937_64 rng = request_rng(client_seed_, prompt, seed);
    std::vector<std::string> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        const int len = min_words_ + static_cast<int>(uniform_index(
                                         rng, static_cast<std::uint64_t>(max_words_ - min_words_ + 1)));
        out.push_back(random_words(rng, len));
    }
    return out;
}

std::string MockGenerationClient::id() const {
    return "mock_gen:" + std::to_string(client_seed_) + ":" + std::to_string(min_words_) + "-" +
           std::to_string(max_words_);
}

std::vector<std::string> MockTaskGenerationClient::generate(const std::string& prompt, int n,
                                                            double temperature, double top_p,
                                                            std::uint64_t seed) {
    (void)temperature;
    (void)top_p;
    if (n < 1) throw std::invalid_argument("generate: n must be >= 1");
    std::mt19937_64 rng = request_rng(client_seed_, prompt, seed);
    std::vector<std::string> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        std::string text;
        for (int t = 0; t < tasks_per_call_; ++t) {
            const int len = min_words_ + static_cast<int>(uniform_index(
                                             rng, static_cast<std::uint64_t>(max_words_ - min_words_ + 1)));
            text += std::to_string(9 + t) + ". <begin>" + random_words(rng, len) + "</end>\n";
        }
        out.push_back(std::move(text));
    }
    return out;
}

std::string MockTaskGenerationClient::id() const {
    return "mock_task_gen:" + std::to_string(client_seed_) + ":" + std::to_string(tasks_per_call_);
}

double MockRewardClient::score(const std::string& prompt, const std::string& response) {
    (void)prompt;
    return static_cast<double>(fnv1a64(response) % 1000) / 1000.0;
}

double MockJudgeClient::judge(const std::string& prompt, const std::string& response,
                              const std::string& template_id, std::uint64_t seed) {
    const JudgeTemplate& tmpl = get_judge_template(template_id);
    const double u = hash01({std::to_string(client_seed_), prompt, response, template_id,
                             std::to_string(seed)});
    return tmpl.min_score + u * (tmpl.max_score - tmpl.min_score);
}

std::string MockJudgeClient::id() const { return "mock_judge:" + std::to_string(client_seed_); }

double MockPromptJudgeClient::judge_prompt(const std::string& prompt, PromptJudgeMode mode,
                                           std::uint64_t seed) {
    const double u = hash01({std::to_string(client_seed_), prompt,
                             mode == PromptJudgeMode::binary ? "binary" : "pointwise",
                             std::to_string(seed)});
    if (mode == PromptJudgeMode::binary) return u < 0.5 ? 0.0 : 1.0;
    return u * 5.0;
}

std::string MockPromptJudgeClient::id() const {
    return "mock_prompt_judge:" + std::to_string(client_seed_);
}

std::vector<double> MockLogProbClient::logprobs(const std::optional<std::string>& prompt,
                                                const std::string& completion) {
    const auto words = split_words(completion);
    std::vector<double> out;
    out.reserve(words.size());
    const std::string ctx = prompt ? *prompt : "";
    for (std::size_t i = 0; i < words.size(); ++i) {
        const double u = hash01({std::to_string(client_seed_), ctx, completion,
                                 std::to_string(i)});
        out.push_back(-4.0 * u);
    }
    return out;
}

std::string MockLogProbClient::id() const {
    return "mock_logprob:" + std::to_string(client_seed_);
}

double InstrumentedRewardClient::score(const std::string& prompt, const std::string& response) {
    calls_.fetch_add(1);
    const int now = in_flight_.fetch_add(1) + 1;
    int prev_max = max_concurrent_.load();
    while (now > prev_max && !max_concurrent_.compare_exchange_weak(prev_max, now)) {
    }
    if (delay_ms_ > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms_));
    const double result = inner_.score(prompt, response);
    in_flight_.fetch_sub(1);
    return result;
}

double FlakyRewardClient::score(const std::string& prompt, const std::string& response) {
    {
        std::lock_guard<std::mutex> lock(mu_);
        int& count = failure_counts_[prompt + "\x1f" + response];
        if (count < failures_before_success_) {
            ++count;
            throw std::runtime_error("injected transient failure");
        }
    }
    return inner_.score(prompt, response);
}

}  // namespace prefkit
