#include <set>

#include "doctest.h"
#include "prefkit/mocklab.hpp"
#include "prefkit/pairing.hpp"
#include "prefkit/scoring.hpp"

using namespace prefkit;

TEST_CASE("worlds regenerate identically from the same seed") {
    const SyntheticWorld a = make_world(11, 50, 0.3, 0.1);
    const SyntheticWorld b = make_world(11, 50, 0.3, 0.1);
    REQUIRE(a.dataset().records.size() == b.dataset().records.size());
    for (std::size_t i = 0; i < a.dataset().records.size(); ++i) {
        const auto& ra = a.dataset().records[i];
        const auto& rb = b.dataset().records[i];
        CHECK(ra.id == rb.id);
        CHECK(ra.text == rb.text);
        CHECK(a.truth_for_id(ra.id).quality == b.truth_for_id(rb.id).quality);
        CHECK(a.truth_for_id(ra.id).low_quality == b.truth_for_id(rb.id).low_quality);
    }
    // prompt texts are unique (clients key on them)
    std::set<std::string> texts;
    for (const auto& rec : a.dataset().records) texts.insert(rec.text);
    CHECK(texts.size() == a.dataset().records.size());
}

TEST_CASE("world params round-trip through json and rebuild the same world") {
    const SyntheticWorld a = make_world(23, 40, 0.25, 0.0);
    const WorldParams reparsed = WorldParams::from_json(a.params().to_json());
    const SyntheticWorld b(reparsed);
    for (std::size_t i = 0; i < a.dataset().records.size(); ++i) {
        CHECK(a.dataset().records[i].text == b.dataset().records[i].text);
    }
}

TEST_CASE("world clients are pure functions of the request") {
    SyntheticWorld world = make_world(5, 20, 0.5, 0.2);
    const std::string prompt = world.dataset().records[3].text;
    const auto r1 = world.generation().generate(prompt, 6, 0.8, 0.95, 42);
    const auto r2 = world.generation().generate(prompt, 6, 0.8, 0.95, 42);
    CHECK(r1 == r2);
    const auto r3 = world.generation().generate(prompt, 6, 0.8, 0.95, 43);
    CHECK(r1 != r3);
    CHECK(world.reward().score(prompt, r1[0]) == world.reward().score(prompt, r1[0]));
}

TEST_CASE("a zero-low-quality world has no low labels") {
    SyntheticWorld world = make_world(3, 100, 0.0, 0.0);
    CHECK(world.low_quality_ids().empty());
    for (const auto& rec : world.dataset().records) {
        CHECK(world.truth_for_id(rec.id).quality >= 0.6);
    }
}

TEST_CASE("low-quality prompts yield lower rejected rewards and wider gaps") {
    SyntheticWorld world = make_world(7, 300, 0.3, 0.0);
    AnnotationConfig cfg;
    cfg.n_samples = 16;
    cfg.seed = 1;

    double low_rejected_sum = 0, high_rejected_sum = 0;
    double low_gap_sum = 0, high_gap_sum = 0;
    std::size_t low_n = 0, high_n = 0;
    for (const PromptRecord& rec : world.dataset().records) {
        const auto responses = annotate_prompt(rec, cfg, world.generation(), world.reward());
        const PairingResult paired = pair_best_vs_worst(rec, responses);
        REQUIRE(!paired.degenerate());
        const double rejected = *paired.pair->rejected.reward;
        const double gap = *paired.pair->chosen.reward - rejected;
        if (world.truth_for_id(rec.id).low_quality) {
            low_rejected_sum += rejected;
            low_gap_sum += gap;
            ++low_n;
        } else {
            high_rejected_sum += rejected;
            high_gap_sum += gap;
            ++high_n;
        }
    }
    REQUIRE(low_n > 20);
    REQUIRE(high_n > 20);
    CHECK(low_rejected_sum / low_n < high_rejected_sum / high_n);
    CHECK(low_gap_sum / low_n > high_gap_sum / high_n);
}

TEST_CASE("unsafe prompts mostly produce refusals and low rewards") {
    SyntheticWorld world = make_world(13, 200, 0.0, 1.0);  // everything unsafe
    std::size_t refusals = 0, total = 0;
    for (const auto& rec : world.dataset().records) {
        const auto responses = world.generation().generate(rec.text, 4, 0.8, 0.95, 9);
        for (const auto& text : responses) {
            ++total;
            if (text == kWorldRefusalText) {
                ++refusals;
                CHECK(world.reward().score(rec.text, text) < 0.1);
                CHECK(looks_like_refusal(text));
            }
        }
    }
    // refusal_prob defaults to 0.9
    CHECK(refusals > total * 3 / 4);
}

TEST_CASE("evaluate_filter_against_truth pins precision and recall") {
    SyntheticWorld world = make_world(17, 100, 0.4, 0.0);
    const auto low_ids = world.low_quality_ids();
    REQUIRE(!low_ids.empty());

    // survivors = everything except the truly-low set
    std::set<std::string> low(low_ids.begin(), low_ids.end());
    std::vector<std::string> survivors;
    for (const auto& rec : world.dataset().records) {
        if (!low.count(rec.id)) survivors.push_back(rec.id);
    }
    const TruthEval exact = evaluate_filter_against_truth(world, survivors);
    CHECK(exact.precision == 1.0);
    CHECK(exact.recall == 1.0);

    // remove nothing
    std::vector<std::string> all_ids;
    for (const auto& rec : world.dataset().records) all_ids.push_back(rec.id);
    const TruthEval nothing = evaluate_filter_against_truth(world, all_ids);
    CHECK(nothing.recall == 0.0);
    CHECK(nothing.removed == 0);

    CHECK_THROWS_AS(evaluate_filter_against_truth(world, {"not_a_prompt"}),
                    std::invalid_argument);
}
