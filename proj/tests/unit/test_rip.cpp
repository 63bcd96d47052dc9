#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "prefkit/rip.hpp"
#include "prefkit/util.hpp"

using namespace prefkit;

namespace {

PreferencePair synth_pair(const std::string& id, double chosen_reward, double rejected_reward,
                          std::size_t rejected_len) {
    PreferencePair pair;
    pair.prompt_id = id;
    pair.prompt_text = "prompt " + id;
    pair.chosen.text = "chosen";
    pair.chosen.reward = chosen_reward;
    pair.rejected.text = std::string(rejected_len, 'x');
    pair.rejected.reward = rejected_reward;
    return pair;
}

std::vector<PreferencePair> random_pairs(std::uint64_t seed, std::size_t n) {
    std::mt19937_64 rng(seed);
    std::vector<PreferencePair> pairs;
    for (std::size_t i = 0; i < n; ++i) {
        const double rejected = uniform_real(rng);
        const double gap = uniform_real(rng) * (1.0 - rejected);
        pairs.push_back(synth_pair("p" + std::to_string(i), rejected + gap, rejected,
                                   1 + uniform_index(rng, 3000)));
    }
    return pairs;
}

std::set<std::string> ids_of(const std::vector<PreferencePair>& pairs) {
    std::set<std::string> ids;
    for (const auto& pair : pairs) ids.insert(pair.prompt_id);
    return ids;
}

ThresholdPolicy median_policy() {
    ThresholdPolicy policy;
    policy.rejected_reward = Bound::quantile(0.5, BoundDirection::keep_at_or_above);
    policy.rejected_length = Bound::quantile(0.5, BoundDirection::keep_at_or_above);
    policy.reward_gap = Bound::quantile(0.5, BoundDirection::keep_at_or_below);
    return policy;
}

}  // namespace

TEST_CASE("compute_rip_metrics pins the three definitions") {
    const PreferencePair pair = synth_pair("p", 0.9, 0.7, 4);
    const RipMetrics m = compute_rip_metrics(pair);
    CHECK(m.rejected_reward == 0.7);
    CHECK(m.rejected_length == 4);
    CHECK(m.reward_gap == doctest::Approx(0.2).epsilon(1e-12));

    const RipMetrics tie = compute_rip_metrics(synth_pair("t", 0.5, 0.5, 10));
    CHECK(tie.reward_gap == 0.0);
}

TEST_CASE("rip metrics equal independent recomputation on random pairs") {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 500; ++i) {
        const double rejected = uniform_real(rng);
        const double chosen = rejected + uniform_real(rng) * (1 - rejected);
        const std::size_t len = uniform_index(rng, 500);
        const PreferencePair pair = synth_pair("p", chosen, rejected, len);
        const RipMetrics m = compute_rip_metrics(pair);
        CHECK(m.reward_gap >= 0.0);
        CHECK(m.reward_gap == chosen - rejected);
        CHECK(m.rejected_length == oracle::len_chars(pair.rejected.text));
    }
}

TEST_CASE("resolve_thresholds replaces quantile bounds and passes absolutes through") {
    std::vector<RipMetrics> metrics;
    for (double v : {10.0, 20.0, 30.0, 40.0}) metrics.push_back({0.5, static_cast<std::size_t>(v), 0.1});

    ThresholdPolicy policy;
    policy.rejected_length = Bound::quantile(0.5, BoundDirection::keep_at_or_above);
    const ResolvedPolicy resolved = resolve_thresholds(metrics, policy);
    REQUIRE(resolved.rejected_length.has_value());
    CHECK(resolved.rejected_length->threshold == 20.0);  // nearest rank 2 of 4

    ThresholdPolicy absolute;
    absolute.rejected_length = Bound::absolute(1878, BoundDirection::keep_at_or_above);
    const ResolvedPolicy kept = resolve_thresholds(metrics, absolute);
    CHECK(kept.rejected_length->threshold == 1878.0);

    CHECK_THROWS_AS(resolve_thresholds({}, policy), std::invalid_argument);
}

TEST_CASE("resolve_thresholds matches a sort oracle on 1000 random metrics") {
    std::mt19937_64 rng(15);
    std::vector<RipMetrics> metrics;
    std::vector<double> gaps;
    for (int i = 0; i < 1000; ++i) {
        RipMetrics m{uniform_real(rng), uniform_index(rng, 2000), uniform_real(rng)};
        gaps.push_back(m.reward_gap);
        metrics.push_back(m);
    }
    ThresholdPolicy policy;
    policy.reward_gap = Bound::quantile(0.75, BoundDirection::keep_at_or_below);
    const ResolvedPolicy resolved = resolve_thresholds(metrics, policy);
    CHECK(resolved.reward_gap->threshold == oracle::quantile_sorted(gaps, 0.75));
}

TEST_CASE("apply_rip_filter keeps boundary pairs inclusively") {
    // the published WildChat configuration, hit exactly on every bound
    const PreferencePair boundary = synth_pair("edge", 0.168, 0.126, 1878);
    const double exact_gap = *boundary.chosen.reward - *boundary.rejected.reward;
    ResolvedPolicy resolved;
    resolved.rejected_reward = ResolvedBound{0.126, BoundDirection::keep_at_or_above};
    resolved.rejected_length = ResolvedBound{1878, BoundDirection::keep_at_or_above};
    resolved.reward_gap = ResolvedBound{exact_gap, BoundDirection::keep_at_or_below};
    CHECK(exact_gap == doctest::Approx(0.042).epsilon(1e-9));

    const FilterOutcome outcome = apply_rip_filter({boundary}, resolved);
    CHECK(outcome.survivors.size() == 1);
    CHECK(outcome.report.output_count == 1);

    // one ulp past any bound drops the pair
    ResolvedPolicy stricter = resolved;
    stricter.rejected_length = ResolvedBound{1879, BoundDirection::keep_at_or_above};
    CHECK(apply_rip_filter({boundary}, stricter).survivors.empty());
}

TEST_CASE("vacuous bounds keep everything") {
    const auto pairs = random_pairs(21, 200);
    ThresholdPolicy policy;
    policy.rejected_reward = Bound::quantile(0.0, BoundDirection::keep_at_or_above);
    policy.rejected_length = Bound::quantile(0.0, BoundDirection::keep_at_or_above);
    policy.reward_gap = Bound::quantile(1.0, BoundDirection::keep_at_or_below);
    const FilterOutcome outcome = rip_filter(pairs, policy);
    CHECK(outcome.survivors.size() == pairs.size());
    CHECK(outcome.report.drops.empty());
}

TEST_CASE("median filtering equals the brute-force set comprehension") {
    const auto pairs = random_pairs(33, 1000);
    const FilterOutcome outcome = rip_filter(pairs, median_policy());

    std::vector<double> m1, m2, m3;
    for (const auto& pair : pairs) {
        m1.push_back(*pair.rejected.reward);
        m2.push_back(static_cast<double>(oracle::len_chars(pair.rejected.text)));
        m3.push_back(*pair.chosen.reward - *pair.rejected.reward);
    }
    oracle::RipBounds bounds;
    bounds.min_rejected_reward = oracle::quantile_sorted(m1, 0.5);
    bounds.min_rejected_length = oracle::quantile_sorted(m2, 0.5);
    bounds.max_reward_gap = oracle::quantile_sorted(m3, 0.5);
    const auto expected_idx = oracle::brute_force_rip(pairs, bounds);

    REQUIRE(outcome.survivors.size() == expected_idx.size());
    for (std::size_t k = 0; k < expected_idx.size(); ++k) {
        CHECK(outcome.survivors[k].prompt_id == pairs[expected_idx[k]].prompt_id);
    }
}

TEST_CASE("drop reasons name the first violated metric and order is preserved") {
    std::vector<PreferencePair> pairs = {
        synth_pair("ok", 0.8, 0.7, 100),
        synth_pair("low_reward", 0.8, 0.1, 100),
        synth_pair("short", 0.8, 0.7, 5),
        synth_pair("wide_gap", 0.99, 0.5, 100),
    };
    ResolvedPolicy resolved;
    resolved.rejected_reward = ResolvedBound{0.4, BoundDirection::keep_at_or_above};
    resolved.rejected_length = ResolvedBound{50, BoundDirection::keep_at_or_above};
    resolved.reward_gap = ResolvedBound{0.2, BoundDirection::keep_at_or_below};

    const FilterOutcome outcome = apply_rip_filter(pairs, resolved);
    REQUIRE(outcome.survivors.size() == 1);
    CHECK(outcome.survivors[0].prompt_id == "ok");
    REQUIRE(outcome.report.drops.size() == 3);
    CHECK(outcome.report.drops[0].reason == "rejected_reward");
    CHECK(outcome.report.drops[1].reason == "rejected_length");
    CHECK(outcome.report.drops[2].reason == "reward_gap");
    CHECK(outcome.report.drops[0].index == 1);
}

TEST_CASE("survivor sets are nested along threshold sweeps") {
    const auto pairs = random_pairs(44, 400);
    std::set<std::string> previous;
    bool first = true;
    for (double q : {0.0, 0.1, 0.25, 0.5, 0.6, 0.75}) {
        ThresholdPolicy policy;
        policy.rejected_reward = Bound::quantile(q, BoundDirection::keep_at_or_above);
        const auto survivors = ids_of(rip_filter(pairs, policy).survivors);
        if (!first) {
            CHECK(std::includes(previous.begin(), previous.end(), survivors.begin(),
                                survivors.end()));
        }
        previous = survivors;
        first = false;
    }
}

TEST_CASE("per-metric filters compose to the joint filter") {
    const auto pairs = random_pairs(55, 300);
    const ThresholdPolicy policy = median_policy();
    const ResolvedPolicy resolved = resolve_thresholds(compute_rip_metrics(pairs), policy);

    ResolvedPolicy only_m1, only_m2, only_m3;
    only_m1.rejected_reward = resolved.rejected_reward;
    only_m2.rejected_length = resolved.rejected_length;
    only_m3.reward_gap = resolved.reward_gap;

    const auto joint = apply_rip_filter(pairs, resolved).survivors;
    const auto sequential = apply_rip_filter(
        apply_rip_filter(apply_rip_filter(pairs, only_m1).survivors, only_m2).survivors,
        only_m3).survivors;
    CHECK(joint == sequential);
}

TEST_CASE("filtering is idempotent on its own survivors") {
    const auto pairs = random_pairs(66, 300);
    const ResolvedPolicy resolved =
        resolve_thresholds(compute_rip_metrics(pairs), median_policy());
    const auto once = apply_rip_filter(pairs, resolved).survivors;
    const auto twice = apply_rip_filter(once, resolved).survivors;
    CHECK(once == twice);
}

TEST_CASE("policy json round-trips with default directions") {
    const auto doc = nlohmann::json::parse(R"({
        "m1": {"quantile": 0.5},
        "m2": {"absolute": 1878},
        "m3": {"absolute": 0.042}
    })");
    const ThresholdPolicy policy = policy_from_json(doc);
    REQUIRE(policy.rejected_reward.has_value());
    CHECK(policy.rejected_reward->direction == BoundDirection::keep_at_or_above);
    CHECK(policy.rejected_length->direction == BoundDirection::keep_at_or_above);
    CHECK(policy.reward_gap->direction == BoundDirection::keep_at_or_below);  // keeps small gaps
    CHECK(policy.rejected_length->value == 1878.0);

    const ThresholdPolicy reparsed = policy_from_json(policy_to_json(policy));
    CHECK(reparsed == policy);

    CHECK_THROWS_AS(policy_from_json(nlohmann::json::object()), std::invalid_argument);
    CHECK_THROWS_AS(policy_from_json(nlohmann::json::parse(R"({"m1": {}})")),
                    std::invalid_argument);
}

TEST_CASE("coordinate_sweep full range keeps everything") {
    const auto pairs = random_pairs(77, 100);
    const SweepReport report =
        coordinate_sweep(pairs, SweepMetric::rejected_reward, {{0.0, 1.0}});
    REQUIRE(report.entries.size() == 1);
    CHECK(report.entries[0].survivor_count == pairs.size());
}

TEST_CASE("coordinate_sweep (0.5,1) keeps values at or above the median") {
    std::vector<PreferencePair> pairs;
    for (int i = 1; i <= 100; ++i) {
        pairs.push_back(synth_pair("v" + std::to_string(i), 1.0 + i, static_cast<double>(i), 10));
    }
    const SweepReport report =
        coordinate_sweep(pairs, SweepMetric::rejected_reward, {{0.5, 1.0}});
    CHECK(report.entries[0].lo_value == 50.0);  // nearest rank 50 of 1..100
    CHECK(report.entries[0].survivor_count == 51);
    for (const std::string& id : report.entries[0].survivor_ids) {
        CHECK(std::stoi(id.substr(1)) >= 50);
    }
}

TEST_CASE("gap sweep (0,0.5) equals the keep-small rip filter at the median") {
    const auto pairs = random_pairs(88, 500);
    const SweepReport sweep = coordinate_sweep(pairs, SweepMetric::reward_gap, {{0.0, 0.5}});

    ThresholdPolicy policy;
    policy.reward_gap = Bound::quantile(0.5, BoundDirection::keep_at_or_below);
    const auto survivors = ids_of(rip_filter(pairs, policy).survivors);

    CHECK(sweep.entries[0].survivor_count == survivors.size());
    const std::set<std::string> sweep_ids(sweep.entries[0].survivor_ids.begin(),
                                          sweep.entries[0].survivor_ids.end());
    CHECK(sweep_ids == survivors);
}

TEST_CASE("coordinate_sweep validates ranges and default grids match the usual shape") {
    const auto pairs = random_pairs(99, 10);
    CHECK_THROWS_AS(coordinate_sweep(pairs, SweepMetric::reward_gap, {{0.5, 0.5}}),
                    std::invalid_argument);

    const auto reward_grid = default_sweep_ranges(SweepMetric::rejected_reward);
    REQUIRE(reward_grid.size() == 6);
    CHECK(reward_grid[0].q_lo == 0.0);
    CHECK(reward_grid[5].q_lo == 0.75);
    const auto gap_grid = default_sweep_ranges(SweepMetric::reward_gap);
    REQUIRE(gap_grid.size() == 3);
    CHECK(gap_grid[0].q_hi == 0.25);
  }
