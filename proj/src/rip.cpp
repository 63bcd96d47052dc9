#include "prefkit/rip.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace prefkit {

using json = nlohmann::json;

BoundDirection direction_from_string(const std::string& name) {
    if (name == "keep_at_or_above") return BoundDirection::keep_at_or_above;
    if (name == "keep_at_or_below") return BoundDirection::keep_at_or_below;
    throw std::invalid_argument("unknown bound direction: " + name);
}

std::string to_string(BoundDirection direction) {
    return direction == BoundDirection::keep_at_or_above ? "keep_at_or_above"
                                                         : "keep_at_or_below";
}

Bound Bound::quantile(double q, BoundDirection d) {
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("quantile bound outside [0,1]");
    return {Kind::quantile, q, d};
}

namespace {

BoundDirection default_direction(const std::string& metric) {
    // Reward gap keeps small values; the other two keep large.
    return metric == kMetricRewardGap ? BoundDirection::keep_at_or_below
                                      : BoundDirection::keep_at_or_above;
}

std::optional<Bound> bound_from_json(const json& doc, const char* key,
                                     const std::string& metric) {
    auto it = doc.find(key);
    if (it == doc.end() || it->is_null()) return std::nullopt;
    const json& obj = *it;
    if (!obj.is_object()) {
        throw std::invalid_argument(std::string("policy: ") + key + " must be an object");
    }
    const bool has_abs = obj.contains("absolute");
    const bool has_q = obj.contains("quantile");
    if (has_abs == has_q) {
        throw std::invalid_argument(std::string("policy: ") + key +
                                    " needs exactly one of \"absolute\" or \"quantile\"");
    }
    BoundDirection dir = default_direction(metric);
    if (obj.contains("direction")) dir = direction_from_string(obj["direction"].get<std::string>());
    if (has_abs) return Bound::absolute(obj["absolute"].get<double>(), dir);
    return Bound::quantile(obj["quantile"].get<double>(), dir);
}

json bound_to_json(const Bound& bound) {
    json obj;
    if (bound.kind == Bound::Kind::absolute) {
        obj["absolute"] = bound.value;
    } else {
        obj["quantile"] = bound.value;
    }
    obj["direction"] = to_string(bound.direction);
    return obj;
}

}  // namespace

ThresholdPolicy policy_from_json(const json& doc) {
    if (!doc.is_object()) throw std::invalid_argument("policy: expected a JSON object");
    ThresholdPolicy policy;
    policy.rejected_reward = bound_from_json(doc, "m1", kMetricRejectedReward);
    policy.rejected_length = bound_from_json(doc, "m2", kMetricRejectedLength);
    policy.reward_gap = bound_from_json(doc, "m3", kMetricRewardGap);
    if (!policy.rejected_reward && !policy.rejected_length && !policy.reward_gap) {
        throw std::invalid_argument("policy: at least one of m1/m2/m3 must be present");
    }
    return policy;
}

json policy_to_json(const ThresholdPolicy& policy) {
    json doc = json::object();
    if (policy.rejected_reward) doc["m1"] = bound_to_json(*policy.rejected_reward);
    if (policy.rejected_length) doc["m2"] = bound_to_json(*policy.rejected_length);
    if (policy.reward_gap) doc["m3"] = bound_to_json(*policy.reward_gap);
    return doc;
}

ThresholdPolicy load_policy(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open policy file: " + path);
    json doc;
    in >> doc;
    return policy_from_json(doc);
}

RipMetrics compute_rip_metrics(const PreferencePair& pair, LengthUnit unit) {
    if (!pair.chosen.reward || !pair.rejected.reward) {
        throw std::invalid_argument("compute_rip_metrics: pair \"" + pair.prompt_id +
                                    "\" is missing a reward");
    }
    std::optional<std::size_t> provider_tokens;
    if (unit == LengthUnit::provider_tokens && pair.rejected.token_logprobs) {
        provider_tokens = pair.rejected.token_logprobs->size();
    }
    RipMetrics m;
    m.rejected_reward = *pair.rejected.reward;
    m.rejected_length = text_length(pair.rejected.text, unit, provider_tokens);
    m.reward_gap = *pair.chosen.reward - *pair.rejected.reward;
    return m;
}

std::vector<RipMetrics> compute_rip_metrics(const std::vector<PreferencePair>& pairs,
                                            LengthUnit unit) {
    std::vector<RipMetrics> out;
    out.reserve(pairs.size());
    for (const PreferencePair& pair : pairs) out.push_back(compute_rip_metrics(pair, unit));
    return out;
}

namespace {

std::optional<ResolvedBound> resolve_bound(const std::optional<Bound>& bound,
                                           const std::vector<double>& values,
                                           const std::string& metric) {
    if (!bound) return std::nullopt;
    if (bound->kind == Bound::Kind::absolute) {
        return ResolvedBound{bound->value, bound->direction};
    }
    if (values.empty()) {
        throw std::invalid_argument("resolve_thresholds: quantile bound on " + metric +
                                    " with no metrics");
    }
    return ResolvedBound{quantile(values, bound->value), bound->direction};
}

std::map<double, double> quantile_table(const std::vector<double>& values) {
    std::map<double, double> table;
    if (values.empty()) return table;
    for (double q : kReportQuantiles) table[q] = quantile(values, q);
    return table;
}

}  // namespace

ResolvedPolicy resolve_thresholds(const std::vector<RipMetrics>& metrics,
                                  const ThresholdPolicy& policy) {
    std::vector<double> m1, m2, m3;
    m1.reserve(metrics.size());
    m2.reserve(metrics.size());
    m3.reserve(metrics.size());
    for (const RipMetrics& m : metrics) {
        m1.push_back(m.rejected_reward);
        m2.push_back(static_cast<double>(m.rejected_length));
        m3.push_back(m.reward_gap);
    }
    ResolvedPolicy resolved;
    resolved.rejected_reward = resolve_bound(policy.rejected_reward, m1, kMetricRejectedReward);
    resolved.rejected_length = resolve_bound(policy.rejected_length, m2, kMetricRejectedLength);
    resolved.reward_gap = resolve_bound(policy.reward_gap, m3, kMetricRewardGap);
    return resolved;
}

FilterOutcome apply_rip_filter(const std::vector<PreferencePair>& pairs,
                               const ResolvedPolicy& resolved, LengthUnit unit) {
    FilterOutcome outcome;
    outcome.report.input_count = pairs.size();

    std::vector<double> m1, m2, m3;
    m1.reserve(pairs.size());
    m2.reserve(pairs.size());
    m3.reserve(pairs.size());

    struct NamedBound {
        const char* metric;
        const std::optional<ResolvedBound>& bound;
    };
    const NamedBound bounds[] = {
        {kMetricRejectedReward, resolved.rejected_reward},
        {kMetricRejectedLength, resolved.rejected_length},
        {kMetricRewardGap, resolved.reward_gap},
    };

    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const RipMetrics m = compute_rip_metrics(pairs[i], unit);
        m1.push_back(m.rejected_reward);
        m2.push_back(static_cast<double>(m.rejected_length));
        m3.push_back(m.reward_gap);

        const double values[] = {m.rejected_reward, static_cast<double>(m.rejected_length),
                                 m.reward_gap};
        std::string reason;
        for (std::size_t k = 0; k < 3; ++k) {
            if (bounds[k].bound && !bounds[k].bound->satisfied(values[k])) {
                reason = bounds[k].metric;
                break;
            }
        }
        if (reason.empty()) {
            outcome.survivors.push_back(pairs[i]);
        } else {
            outcome.report.drops.push_back({i, pairs[i].prompt_id, reason});
        }
    }

    outcome.report.output_count = outcome.survivors.size();
    for (std::size_t k = 0; k < 3; ++k) {
        if (bounds[k].bound) {
            outcome.report.resolved_thresholds[bounds[k].metric] = bounds[k].bound->threshold;
            outcome.report.directions[bounds[k].metric] = to_string(bounds[k].bound->direction);
        }
    }
    outcome.report.quantile_tables[kMetricRejectedReward] = quantile_table(m1);
    outcome.report.quantile_tables[kMetricRejectedLength] = quantile_table(m2);
    outcome.report.quantile_tables[kMetricRewardGap] = quantile_table(m3);
    return outcome;
}

FilterOutcome rip_filter(const std::vector<PreferencePair>& pairs,
                         const ThresholdPolicy& policy, LengthUnit unit) {
    const ResolvedPolicy resolved = resolve_thresholds(compute_rip_metrics(pairs, unit), policy);
    return apply_rip_filter(pairs, resolved, unit);
}

namespace {

json quantile_table_json(const std::map<double, double>& table) {
    json obj = json::object();
    for (const auto& [q, v] : table) {
        char key[32];
        std::snprintf(key, sizeof(key), "%g", q);
        obj[key] = v;
    }
    return obj;
}

}  // namespace

json FilterReport::to_json() const {
    json drops_json = json::array();
    for (const DropRecord& d : drops) {
        drops_json.push_back({{"index", d.index}, {"prompt_id", d.prompt_id}, {"reason", d.reason}});
    }
    json tables = json::object();
    for (const auto& [metric, table] : quantile_tables) {
        tables[metric] = quantile_table_json(table);
    }
    return json{{"input_count", input_count},
                {"output_count", output_count},
                {"resolved_policy", resolved_policy_json()},
                {"drops", std::move(drops_json)},
                {"quantiles", std::move(tables)}};
}

json FilterReport::resolved_policy_json() const {
    json policy = json::object();
    const std::pair<const char*, const char*> keys[] = {
        {kMetricRejectedReward, "m1"},
        {kMetricRejectedLength, "m2"},
        {kMetricRewardGap, "m3"},
    };
    for (const auto& [metric, key] : keys) {
        auto it = resolved_thresholds.find(metric);
        if (it == resolved_thresholds.end()) continue;
        policy[key] = {{"absolute", it->second}, {"direction", directions.at(metric)}};
    }
    return policy;
}

SweepMetric sweep_metric_from_string(const std::string& name) {
    if (name == kMetricRejectedReward) return SweepMetric::rejected_reward;
    if (name == kMetricRejectedLength) return SweepMetric::rejected_length;
    if (name == kMetricRewardGap) return SweepMetric::reward_gap;
    if (name == "chosen_reward") return SweepMetric::chosen_reward;
    if (name == "chosen_length") return SweepMetric::chosen_length;
    if (name == "average_reward") return SweepMetric::average_reward;
    throw std::invalid_argument("unknown sweep metric: " + name);
}

std::string to_string(SweepMetric metric) {
    switch (metric) {
        case SweepMetric::rejected_reward: return kMetricRejectedReward;
        case SweepMetric::rejected_length: return kMetricRejectedLength;
        case SweepMetric::reward_gap: return kMetricRewardGap;
        case SweepMetric::chosen_reward: return "chosen_reward";
        case SweepMetric::chosen_length: return "chosen_length";
        case SweepMetric::average_reward: return "average_reward";
    }
    return kMetricRejectedReward;
}

double sweep_metric_value(const PreferencePair& pair, SweepMetric metric, LengthUnit unit) {
    const RipMetrics m = compute_rip_metrics(pair, unit);
    switch (metric) {
        case SweepMetric::rejected_reward: return m.rejected_reward;
        case SweepMetric::rejected_length: return static_cast<double>(m.rejected_length);
        case SweepMetric::reward_gap: return m.reward_gap;
        case SweepMetric::chosen_reward: return *pair.chosen.reward;
        case SweepMetric::chosen_length: {
            std::optional<std::size_t> tokens;
            if (unit == LengthUnit::provider_tokens && pair.chosen.token_logprobs) {
                tokens = pair.chosen.token_logprobs->size();
            }
            return static_cast<double>(text_length(pair.chosen.text, unit, tokens));
        }
        case SweepMetric::average_reward:
            return 0.5 * (*pair.chosen.reward + *pair.rejected.reward);
    }
    return 0.0;
}

std::vector<QuantileRange> default_sweep_ranges(SweepMetric metric) {
    if (metric == SweepMetric::reward_gap) {
        return {{0.0, 0.25}, {0.0, 0.5}, {0.5, 1.0}};
    }
    return {{0.0, 1.0}, {0.1, 1.0}, {0.25, 1.0}, {0.5, 1.0}, {0.6, 1.0}, {0.75, 1.0}};
}

SweepReport coordinate_sweep(const std::vector<PreferencePair>& pairs, SweepMetric metric,
                             const std::vector<QuantileRange>& ranges, LengthUnit unit) {
    for (const QuantileRange& r : ranges) {
        if (!(0.0 <= r.q_lo && r.q_lo < r.q_hi && r.q_hi <= 1.0)) {
            throw std::invalid_argument("coordinate_sweep: invalid quantile range");
        }
    }
    std::vector<double> values;
    values.reserve(pairs.size());
    for (const PreferencePair& pair : pairs) {
        values.push_back(sweep_metric_value(pair, metric, unit));
    }

    SweepReport report;
    report.metric = metric;
    report.input_count = pairs.size();
    for (const QuantileRange& r : ranges) {
        SweepEntry entry;
        entry.range = r;
        entry.lo_value = quantile(values, r.q_lo);
        entry.hi_value = quantile(values, r.q_hi);
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            if (values[i] >= entry.lo_value && values[i] <= entry.hi_value) {
                ++entry.survivor_count;
                entry.survivor_ids.push_back(pairs[i].prompt_id);
            }
        }
        report.entries.push_back(std::move(entry));
    }
    return report;
}

json SweepReport::to_json() const {
    json entries_json = json::array();
    for (const SweepEntry& e : entries) {
        entries_json.push_back({{"q_lo", e.range.q_lo},
                                {"q_hi", e.range.q_hi},
                                {"lo_value", e.lo_value},
                                {"hi_value", e.hi_value},
                                {"survivor_count", e.survivor_count}});
    }
    return json{{"metric", to_string(metric)},
                {"input_count", input_count},
                {"entries", std::move(entries_json)}};
}

}  // namespace prefkit
