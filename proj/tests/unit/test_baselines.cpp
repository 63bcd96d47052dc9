#include <cmath>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "prefkit/baselines.hpp"
#include "prefkit/mocks.hpp"
#include "prefkit/util.hpp"

using namespace prefkit;

namespace {

std::vector<double> random_logprobs(std::mt19937_64& rng, std::size_t n) {
    std::vector<double> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(-4.0 * uniform_real(rng) - 1e-6);
    return out;
}

PreferencePair pair_with_logprobs(const std::string& id, std::vector<double> conditioned,
                                  std::vector<double> unconditioned) {
    PreferencePair pair;
    pair.prompt_id = id;
    pair.prompt_text = "prompt";
    pair.chosen.text = "chosen text";
    pair.chosen.reward = 0.9;
    pair.chosen.token_logprobs = std::move(conditioned);
    pair.chosen.unconditioned_logprobs = std::move(unconditioned);
    pair.rejected.text = "rejected text";
    pair.rejected.reward = 0.1;
    return pair;
}

PreferencePair pair_with_texts(const std::string& id, const std::string& chosen,
                               const std::string& rejected) {
    PreferencePair pair;
    pair.prompt_id = id;
    pair.prompt_text = "prompt";
    pair.chosen.text = chosen;
    pair.chosen.reward = 0.9;
    pair.rejected.text = rejected;
    pair.rejected.reward = 0.1;
    return pair;
}

}  // namespace

TEST_CASE("ifd_score pins the ratio definition") {
    const IfdScore half = ifd_score({-2, -2}, {-4, -4});
    CHECK(half.conditioned_nll == 2.0);
    CHECK(half.unconditioned_nll == 4.0);
    CHECK(half.ratio == 0.5);

    const std::vector<double> same = {-1.5, -0.25, -3.0};
    CHECK(ifd_score(same, same).ratio == 1.0);  // exactly
}

TEST_CASE("ifd_score validates its inputs") {
    CHECK_THROWS_AS(ifd_score({}, {}), std::invalid_argument);
    CHECK_THROWS_AS(ifd_score({-1}, {-1, -2}), std::invalid_argument);
    CHECK_THROWS_AS(ifd_score({0.5}, {-1}), std::invalid_argument);
    CHECK_THROWS_AS(ifd_score({-1}, {0, 0}), std::invalid_argument);  // zero NLL divisor
}

TEST_CASE("ifd and perplexity match independent arithmetic within 1e-12 relative") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + uniform_index(rng, 50);
        const auto conditioned = random_logprobs(rng, n);
        const auto unconditioned = random_logprobs(rng, n);

        const double expected_ratio =
            (-oracle::mean(conditioned)) / (-oracle::mean(unconditioned));
        const IfdScore score = ifd_score(conditioned, unconditioned);
        CHECK(std::abs(score.ratio - expected_ratio) <= 1e-12 * std::abs(expected_ratio));

        const double expected_ppl = std::exp(-oracle::mean(conditioned));
        CHECK(std::abs(perplexity(conditioned) - expected_ppl) <= 1e-12 * expected_ppl);
    }
}

TEST_CASE("ifd ratio is invariant under positive scaling of both lists") {
    std::mt19937_64 rng(7);
    const auto conditioned = random_logprobs(rng, 20);
    const auto unconditioned = random_logprobs(rng, 20);
    const double base = ifd_score(conditioned, unconditioned).ratio;
    for (double c : {0.5, 2.0, 7.25}) {
        std::vector<double> sc, su;
        for (double v : conditioned) sc.push_back(c * v);
        for (double v : unconditioned) su.push_back(c * v);
        CHECK(ifd_score(sc, su).ratio == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("perplexity pins the closed-form cases") {
    const double ln2 = std::log(2.0);
    CHECK(perplexity({-ln2, -ln2}) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(perplexity({0.0, 0.0, 0.0}) == 1.0);  // fully certain
}

TEST_CASE("ifd_filter keeps the inclusive quantile range and reports missing logprobs") {
    std::mt19937_64 rng(55);
    std::vector<PreferencePair> pairs;
    std::vector<double> ratios;
    for (int i = 0; i < 200; ++i) {
        const std::size_t n = 5 + uniform_index(rng, 30);
        auto conditioned = random_logprobs(rng, n);
        auto unconditioned = random_logprobs(rng, n);
        ratios.push_back(ifd_score(conditioned, unconditioned).ratio);
        pairs.push_back(pair_with_logprobs("p" + std::to_string(i), std::move(conditioned),
                                           std::move(unconditioned)));
    }
    const BaselineOutcome outcome = ifd_filter(pairs, {0.25, 1.0});
    const auto expected = oracle::brute_force_range(ratios, oracle::quantile_sorted(ratios, 0.25),
                                                    oracle::quantile_sorted(ratios, 1.0));
    REQUIRE(outcome.survivors.size() == expected.size());
    for (std::size_t k = 0; k < expected.size(); ++k) {
        CHECK(outcome.survivors[k].prompt_id == pairs[expected[k]].prompt_id);
    }

    // full range is the identity
    CHECK(ifd_filter(pairs, {0.0, 1.0}).survivors.size() == pairs.size());

    auto incomplete = pairs;
    incomplete[3].chosen.unconditioned_logprobs.reset();
    incomplete[7].chosen.unconditioned_logprobs.reset();
    CHECK_THROWS_WITH_AS(ifd_filter(incomplete, {0.0, 1.0}), doctest::Contains("p3"),
                         std::invalid_argument);
}

TEST_CASE("perplexity_filter equals brute-force selection") {
    std::mt19937_64 rng(66);
    std::vector<PreferencePair> pairs;
    std::vector<double> ppls;
    for (int i = 0; i < 150; ++i) {
        auto logprobs = random_logprobs(rng, 10 + uniform_index(rng, 40));
        ppls.push_back(std::exp(-oracle::mean(logprobs)));
        pairs.push_back(pair_with_logprobs("p" + std::to_string(i), std::move(logprobs), {-1.0}));
        pairs.back().chosen.unconditioned_logprobs.reset();
    }
    const BaselineOutcome outcome = perplexity_filter(pairs, {0.25, 1.0});
    const auto expected = oracle::brute_force_range(ppls, oracle::quantile_sorted(ppls, 0.25),
                                                    oracle::quantile_sorted(ppls, 1.0));
    REQUIRE(outcome.survivors.size() == expected.size());
    for (std::size_t k = 0; k < expected.size(); ++k) {
        CHECK(outcome.survivors[k].prompt_id == pairs[expected[k]].prompt_id);
    }
}

TEST_CASE("jaccard_filter bounds behave inclusively") {
    std::vector<PreferencePair> pairs = {
        pair_with_texts("identical", "the same words", "the same words"),
        pair_with_texts("disjoint", "alpha beta gamma", "delta epsilon zeta"),
    };
    const BaselineOutcome keep_all =
        jaccard_filter(pairs, Bound::absolute(1.0, BoundDirection::keep_at_or_above));
    REQUIRE(keep_all.survivors.size() == 1);
    CHECK(keep_all.survivors[0].prompt_id == "identical");

    const BaselineOutcome mid =
        jaccard_filter(pairs, Bound::absolute(0.5, BoundDirection::keep_at_or_above));
    CHECK(mid.survivors.size() == 1);
    REQUIRE(mid.report.drops.size() == 1);
    CHECK(mid.report.drops[0].prompt_id == "disjoint");
}

TEST_CASE("jaccard_filter at the median matches the brute-force set") {
    std::mt19937_64 rng(77);
    MockGenerationClient gen(1, 3, 25);
    std::vector<PreferencePair> pairs;
    std::vector<double> sims;
    for (int i = 0; i < 500; ++i) {
        const auto texts = gen.generate("corpus", 2, 0.8, 0.95, i);
        pairs.push_back(pair_with_texts("p" + std::to_string(i), texts[0], texts[1]));
        sims.push_back(jaccard_similarity(texts[0], texts[1]));
    }
    const BaselineOutcome outcome =
        jaccard_filter(pairs, Bound::quantile(0.5, BoundDirection::keep_at_or_above));
    const double threshold = oracle::quantile_sorted(sims, 0.5);
    std::set<std::string> expected;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (sims[i] >= threshold) expected.insert(pairs[i].prompt_id);
    }
    std::set<std::string> actual;
    for (const auto& pair : outcome.survivors) actual.insert(pair.prompt_id);
    CHECK(actual == expected);
    // roughly half survive at the median
    CHECK(outcome.survivors.size() >= pairs.size() / 4);
    CHECK(outcome.survivors.size() <= 3 * pairs.size() / 4);
}

TEST_CASE("instag complexity thresholding") {
    std::vector<TaggedPrompt> tagged = {
        {"one_tag", {"a"}},
        {"two_tags", {"a", "b"}},
        {"three_tags", {"a", "b", "c"}},
    };
    CHECK(instag_complexity_filter(tagged, 2, std::nullopt, 0) ==
          std::vector<std::string>{"two_tags", "three_tags"});
    // threshold 1 is no filtering
    CHECK(instag_complexity_filter(tagged, 1, std::nullopt, 0).size() == 3);
    CHECK_THROWS_AS(instag_complexity_filter(tagged, 2, 5, 0), std::invalid_argument);

    const auto sampled = instag_complexity_filter(tagged, 1, 2, 99);
    CHECK(sampled.size() == 2);
    CHECK(instag_complexity_filter(tagged, 1, 2, 99) == sampled);  // seeded
}

TEST_CASE("instag complexity matches a count oracle on synthetic prompts") {
    std::mt19937_64 rng(41);
    std::vector<TaggedPrompt> tagged;
    for (int i = 0; i < 100; ++i) {
        TaggedPrompt t;
        t.prompt_id = "p" + std::to_string(i);
        const std::size_t n_tags = uniform_index(rng, 5);
        for (std::size_t k = 0; k < n_tags; ++k) t.tags.push_back("tag" + std::to_string(k));
        tagged.push_back(std::move(t));
    }
    const auto kept = instag_complexity_filter(tagged, 2, std::nullopt, 0);
    std::vector<std::string> expected;
    for (const auto& t : tagged) {
        if (t.tags.size() >= 2) expected.push_back(t.prompt_id);
    }
    CHECK(kept == expected);
}

TEST_CASE("instag diversity greedy pass") {
    std::vector<TaggedPrompt> same_tag = {{"P1", {"t"}}, {"P2", {"t"}}, {"P3", {"t"}}};
    CHECK(instag_diversity_select(same_tag, 1, 1) == std::vector<std::string>{"P1"});
    CHECK(instag_diversity_select(same_tag, 1, 3) ==
          std::vector<std::string>{"P1", "P2", "P3"});
    // all tags below the frequency floor -> nothing is keepable
    CHECK(instag_diversity_select(same_tag, 4, 1).empty());
}

TEST_CASE("instag diversity equals a step-by-step greedy replay") {
    std::mt19937_64 rng(61);
    std::vector<TaggedPrompt> tagged;
    for (int i = 0; i < 50; ++i) {
        TaggedPrompt t;
        t.prompt_id = "p" + std::to_string(i);
        const std::size_t n_tags = 1 + uniform_index(rng, 3);
        std::set<std::string> tags;
        for (std::size_t k = 0; k < n_tags; ++k) {
            tags.insert("t" + std::to_string(uniform_index(rng, 8)));
        }
        t.tags.assign(tags.begin(), tags.end());
        tagged.push_back(std::move(t));
    }
    const int freq_min = 3, max_per_tag = 2;
    const auto kept = instag_diversity_select(tagged, freq_min, max_per_tag);

    // independent replay
    std::map<std::string, int> freq;
    for (const auto& t : tagged) {
        for (const auto& tag : t.tags) ++freq[tag];
    }
    std::map<std::string, int> used;
    std::vector<std::string> expected;
    for (const auto& t : tagged) {
        bool ok = false;
        for (const auto& tag : t.tags) {
            if (freq[tag] >= freq_min && used[tag] < max_per_tag) ok = true;
        }
        if (!ok) continue;
        expected.push_back(t.prompt_id);
        for (const auto& tag : t.tags) {
            if (freq[tag] >= freq_min) ++used[tag];
        }
    }
    CHECK(kept == expected);

    // capacity accounting: no tag serves as the keep reason for more than
    // max_per_tag prompts
    std::map<std::string, int> used2, reason_counts;
    std::set<std::string> kept_set(kept.begin(), kept.end());
    for (const auto& t : tagged) {
        if (!kept_set.count(t.prompt_id)) continue;
        for (const auto& tag : t.tags) {
            if (freq[tag] >= freq_min && used2[tag] < max_per_tag) ++reason_counts[tag];
        }
        for (const auto& tag : t.tags) {
            if (freq[tag] >= freq_min) ++used2[tag];
        }
    }
    for (const auto& [tag, count] : reason_counts) {
        (void)tag;
        CHECK(count <= max_per_tag);
    }
}

TEST_CASE("prompt_judge_filter averages votes against the cutoff") {
    class ScriptedPromptJudge : public PromptJudgeClient {
    public:
        explicit ScriptedPromptJudge(std::vector<double> scores) : scores_(std::move(scores)) {}
        double judge_prompt(const std::string&, PromptJudgeMode, std::uint64_t) override {
            return scores_[next_++ % scores_.size()];
        }
        std::string id() const override { return "scripted_prompt_judge"; }

    private:
        std::vector<double> scores_;
        std::size_t next_ = 0;
    };

    const std::vector<PromptRecord> prompts = {{"p1", "first", {}, 0, {}}};
    AnnotationConfig cfg;
    cfg.retry_backoff_ms = 1;

    ScriptedPromptJudge binary({1, 1, 1, 0, 0});
    const auto kept =
        prompt_judge_filter(prompts, PromptJudgeMode::binary, 5, 0.5, binary, cfg);
    REQUIRE(kept.scores.size() == 1);
    CHECK(kept.scores[0].second == doctest::Approx(0.6));
    CHECK(kept.survivors.size() == 1);

    ScriptedPromptJudge pointwise({3, 4, 4, 5, 4});
    const auto scored =
        prompt_judge_filter(prompts, PromptJudgeMode::pointwise, 5, 4.5, pointwise, cfg);
    REQUIRE(scored.scores.size() == 1);
    CHECK(scored.scores[0].second == 4.0);
    CHECK(scored.survivors.empty());
    REQUIRE(scored.report.drops.size() == 1);
    CHECK(scored.report.drops[0].reason == "below_cutoff");

    // the paper-shaped default configuration: five repeats
    AnnotationConfig defaults;
    CHECK(defaults.prompt_judge_repeats == 5);
    CHECK(defaults.judge_repeats == 10);
    CHECK(defaults.n_samples == 64);
    CHECK(defaults.temperature == 0.8);
    CHECK(defaults.top_p == 0.95);
}

TEST_CASE("prompt_judge_filter excludes prompts whose client keeps failing") {
    class FailingPromptJudge : public PromptJudgeClient {
    public:
        double judge_prompt(const std::string& prompt, PromptJudgeMode, std::uint64_t) override {
            if (prompt == "bad") throw std::runtime_error("boom");
            return 1.0;
        }
        std::string id() const override { return "failing_prompt_judge"; }
    };
    const std::vector<PromptRecord> prompts = {{"good", "fine", {}, 0, {}},
                                               {"bad_id", "bad", {}, 0, {}}};
    FailingPromptJudge judge;
    AnnotationConfig cfg;
    cfg.retries = 2;
    cfg.retry_backoff_ms = 1;
    const auto outcome =
        prompt_judge_filter(prompts, PromptJudgeMode::binary, 3, 0.5, judge, cfg);
    CHECK(outcome.survivors.size() == 1);
    REQUIRE(outcome.failures.size() == 1);
    CHECK(outcome.failures[0].first == "bad_id");
}
