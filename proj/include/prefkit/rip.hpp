#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "prefkit/core.hpp"
#include "prefkit/text_metrics.hpp"

namespace prefkit {

// The three per-pair filter metrics: reward of the rejected response, its
// length, and the chosen-minus-rejected reward gap.
struct RipMetrics {
    double rejected_reward = 0.0;
    std::size_t rejected_length = 0;
    double reward_gap = 0.0;
};

// Metric identifiers as used in reports, policy files and the CLI.
inline constexpr const char* kMetricRejectedReward = "rejected_reward";
inline constexpr const char* kMetricRejectedLength = "rejected_length";
inline constexpr const char* kMetricRewardGap = "reward_gap";

enum class BoundDirection { keep_at_or_above, keep_at_or_below };

BoundDirection direction_from_string(const std::string& name);
std::string to_string(BoundDirection direction);

// A keep-side threshold, either absolute (in metric units) or a quantile of
// the filtered population. Both directions are inclusive.
struct Bound {
    enum class Kind { absolute, quantile };

    Kind kind = Kind::absolute;
    double value = 0.0;
    BoundDirection direction = BoundDirection::keep_at_or_above;

    static Bound absolute(double v, BoundDirection d) { return {Kind::absolute, v, d}; }
    static Bound quantile(double q, BoundDirection d);

    bool operator==(const Bound&) const = default;
};

// Per-metric bounds; absent metrics are unconstrained. Default directions:
// rejected reward and length keep high, reward gap keeps small.
struct ThresholdPolicy {
    std::optional<Bound> rejected_reward;
    std::optional<Bound> rejected_length;
    std::optional<Bound> reward_gap;

    bool operator==(const ThresholdPolicy&) const = default;
};

struct ResolvedBound {
    double threshold = 0.0;
    BoundDirection direction = BoundDirection::keep_at_or_above;

    bool satisfied(double metric) const {
        return direction == BoundDirection::keep_at_or_above ? metric >= threshold
                                                             : metric <= threshold;
    }
};

struct ResolvedPolicy {
    std::optional<ResolvedBound> rejected_reward;
    std::optional<ResolvedBound> rejected_length;
    std::optional<ResolvedBound> reward_gap;
};

struct DropRecord {
    std::size_t index = 0;
    std::string prompt_id;
    std::string reason;  // first violated metric
};

// Quantile grid reported for every metric.
inline constexpr double kReportQuantiles[] = {0.0, 0.1, 0.25, 0.5, 0.6, 0.75, 0.9, 1.0};

struct FilterReport {
    std::size_t input_count = 0;
    std::size_t output_count = 0;
    // metric -> resolved threshold / direction, for bounds that were present.
    std::map<std::string, double> resolved_thresholds;
    std::map<std::string, std::string> directions;
    std::vector<DropRecord> drops;
    // metric -> (q -> value) over the pre-filter population.
    std::map<std::string, std::map<double, double>> quantile_tables;

    nlohmann::json to_json() const;
    // The resolved policy in the policy-file schema, reusable as-is for a
    // later run with carried-over absolute thresholds.
    nlohmann::json resolved_policy_json() const;
};

// --- policy file ------------------------------------------------------------
// {"m1": {"quantile": 0.5, "direction": "keep_at_or_above"},
//  "m2": {"absolute": 1878},
//  "m3": {"quantile": 0.5}}
// m1 = rejected reward, m2 = rejected length, m3 = reward gap.

ThresholdPolicy policy_from_json(const nlohmann::json& doc);
nlohmann::json policy_to_json(const ThresholdPolicy& policy);
ThresholdPolicy load_policy(const std::string& path);

// --- operations -------------------------------------------------------------

RipMetrics compute_rip_metrics(const PreferencePair& pair,
                               LengthUnit unit = LengthUnit::characters);

std::vector<RipMetrics> compute_rip_metrics(const std::vector<PreferencePair>& pairs,
                                            LengthUnit unit = LengthUnit::characters);

// Quantile bounds are resolved over the full pre-filter population; absolute
// bounds pass through unchanged.
ResolvedPolicy resolve_thresholds(const std::vector<RipMetrics>& metrics,
                                  const ThresholdPolicy& policy);

struct FilterOutcome {
    std::vector<PreferencePair> survivors;
    FilterReport report;
};

// Survivor iff every present bound is satisfied (bounds inclusive); input
// order preserved.
FilterOutcome apply_rip_filter(const std::vector<PreferencePair>& pairs,
                               const ResolvedPolicy& resolved,
                               LengthUnit unit = LengthUnit::characters);

// Convenience wrapper: resolve then apply.
FilterOutcome rip_filter(const std::vector<PreferencePair>& pairs,
                         const ThresholdPolicy& policy,
                         LengthUnit unit = LengthUnit::characters);

// --- coordinate-wise sweeps -------------------------------------------------

// Metrics available for sweeps (the RIP metrics plus the per-pair reward
// variants used by coordinate-wise baselines).
enum class SweepMetric {
    rejected_reward,
    rejected_length,
    reward_gap,
    chosen_reward,
    chosen_length,
    average_reward,
};

SweepMetric sweep_metric_from_string(const std::string& name);
std::string to_string(SweepMetric metric);

double sweep_metric_value(const PreferencePair& pair, SweepMetric metric, LengthUnit unit);

struct QuantileRange {
    double q_lo = 0.0;
    double q_hi = 1.0;
};

// Usual grids: {0-100, 10-100, 25-100, 50-100, 60-100, 75-100} for reward
// and length metrics, {0-25, 0-50, 50-100} for the reward gap.
std::vector<QuantileRange> default_sweep_ranges(SweepMetric metric);

struct SweepEntry {
    QuantileRange range;
    double lo_value = 0.0;
    double hi_value = 0.0;
    std::size_t survivor_count = 0;
    std::vector<std::string> survivor_ids;
};

struct SweepReport {
    SweepMetric metric = SweepMetric::rejected_reward;
    std::size_t input_count = 0;
    std::vector<SweepEntry> entries;

    nlohmann::json to_json() const;
};

// For each range keep the pairs whose metric lies within
// [quantile(q_lo), quantile(q_hi)] inclusive.
SweepReport coordinate_sweep(const std::vector<PreferencePair>& pairs, SweepMetric metric,
                             const std::vector<QuantileRange>& ranges,
                             LengthUnit unit = LengthUnit::characters);

}  // namespace prefkit
