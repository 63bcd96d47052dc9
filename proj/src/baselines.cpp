#include "prefkit/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "prefkit/text_metrics.hpp"
#include "prefkit/util.hpp"

namespace prefkit {

using json = nlohmann::json;

std::vector<TaggedPrompt> load_tags(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::vector<TaggedPrompt> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                                     ": parse failure: " + e.what());
        }
        TaggedPrompt row;
        row.prompt_id = obj.at("prompt_id").get<std::string>();
        std::set<std::string> dedup;
        for (const auto& t : obj.at("tags")) dedup.insert(to_lower(t.get<std::string>()));
        row.tags.assign(dedup.begin(), dedup.end());
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

double mean(const std::vector<double>& values) {
    double total = 0.0;
    for (double v : values) total += v;
    return total / static_cast<double>(values.size());
}

void check_logprobs(const std::vector<double>& logprobs, const char* name) {
    if (logprobs.empty()) {
        throw std::invalid_argument(std::string("ifd_score: ") + name + " is empty");
    }
    for (double lp : logprobs) {
        if (!(lp <= 0.0)) {
            throw std::invalid_argument(std::string("ifd_score: ") + name +
                                        " holds a positive log-probability");
        }
    }
}

}  // namespace

IfdScore ifd_score(const std::vector<double>& conditioned_logprobs,
                   const std::vector<double>& unconditioned_logprobs) {
    check_logprobs(conditioned_logprobs, "conditioned_logprobs");
    check_logprobs(unconditioned_logprobs, "unconditioned_logprobs");
    if (conditioned_logprobs.size() != unconditioned_logprobs.size()) {
        throw std::invalid_argument("ifd_score: logprob list lengths differ");
    }
    IfdScore score;
    score.conditioned_nll = -mean(conditioned_logprobs);
    score.unconditioned_nll = -mean(unconditioned_logprobs);
    if (score.unconditioned_nll == 0.0) {
        throw std::invalid_argument("ifd_score: unconditioned NLL is zero");
    }
    score.ratio = score.conditioned_nll / score.unconditioned_nll;
    return score;
}

double perplexity(const std::vector<double>& logprobs) {
    if (logprobs.empty()) throw std::invalid_argument("perplexity: empty logprob list");
    return std::exp(-mean(logprobs));
}

json BaselineReport::to_json() const {
    json drops_json = json::array();
    for (const DropRecord& d : drops) {
        drops_json.push_back({{"index", d.index}, {"prompt_id", d.prompt_id}, {"reason", d.reason}});
    }
    return json{{"method", method},
                {"input_count", input_count},
                {"output_count", output_count},
                {"resolved", resolved},
                {"drops", std::move(drops_json)}};
}

namespace {

// Shared keep-in-quantile-range pass over a per-pair score.
BaselineOutcome range_filter(const std::vector<PreferencePair>& pairs,
                             const std::vector<double>& values, QuantileRange range,
                             const std::string& method) {
    if (!(0.0 <= range.q_lo && range.q_lo < range.q_hi && range.q_hi <= 1.0)) {
        throw std::invalid_argument(method + ": invalid quantile range");
    }
    BaselineOutcome outcome;
    outcome.report.method = method;
    outcome.report.input_count = pairs.size();
    if (pairs.empty()) return outcome;

    const double lo = quantile(values, range.q_lo);
    const double hi = quantile(values, range.q_hi);
    outcome.report.resolved = {{"lo", lo}, {"hi", hi}};
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (values[i] >= lo && values[i] <= hi) {
            outcome.survivors.push_back(pairs[i]);
        } else {
            outcome.report.drops.push_back(
                {i, pairs[i].prompt_id, values[i] < lo ? "below_range" : "above_range"});
        }
    }
    outcome.report.output_count = outcome.survivors.size();
    return outcome;
}

std::vector<double> chosen_scores(const std::vector<PreferencePair>& pairs, bool need_both,
                                  const std::string& method,
                                  double (*fn)(const PreferencePair&)) {
    std::vector<std::string> missing;
    for (const PreferencePair& pair : pairs) {
        if (!pair.chosen.token_logprobs || (need_both && !pair.chosen.unconditioned_logprobs)) {
            missing.push_back(pair.prompt_id);
        }
    }
    if (!missing.empty()) {
        std::string joined;
        for (const std::string& id : missing) {
            if (!joined.empty()) joined += ", ";
            joined += id;
        }
        throw std::invalid_argument(method + ": missing chosen-response logprobs for pairs: " +
                                    joined);
    }
    std::vector<double> values;
    values.reserve(pairs.size());
    for (const PreferencePair& pair : pairs) values.push_back(fn(pair));
    return values;
}

}  // namespace

BaselineOutcome ifd_filter(const std::vector<PreferencePair>& pairs, QuantileRange range) {
    const std::vector<double> values =
        chosen_scores(pairs, true, "ifd_filter", [](const PreferencePair& pair) {
            return ifd_score(*pair.chosen.token_logprobs, *pair.chosen.unconditioned_logprobs)
                .ratio;
        });
    return range_filter(pairs, values, range, "ifd");
}

BaselineOutcome perplexity_filter(const std::vector<PreferencePair>& pairs, QuantileRange range) {
    const std::vector<double> values =
        chosen_scores(pairs, false, "perplexity_filter", [](const PreferencePair& pair) {
            return perplexity(*pair.chosen.token_logprobs);
        });
    return range_filter(pairs, values, range, "perplexity");
}

BaselineOutcome jaccard_filter(const std::vector<PreferencePair>& pairs, const Bound& bound) {
    BaselineOutcome outcome;
    outcome.report.method = "jaccard";
    outcome.report.input_count = pairs.size();
    if (pairs.empty()) {
        if (bound.kind == Bound::Kind::absolute) {
            outcome.report.resolved = {{"threshold", bound.value}};
        }
        return outcome;
    }

    std::vector<double> values;
    values.reserve(pairs.size());
    for (const PreferencePair& pair : pairs) {
        values.push_back(jaccard_similarity(pair.chosen.text, pair.rejected.text));
    }
    const double threshold =
        bound.kind == Bound::Kind::absolute ? bound.value : quantile(values, bound.value);
    outcome.report.resolved = {{"threshold", threshold}};

    const ResolvedBound resolved{threshold, bound.direction};
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (resolved.satisfied(values[i])) {
            outcome.survivors.push_back(pairs[i]);
        } else {
            outcome.report.drops.push_back({i, pairs[i].prompt_id, "jaccard"});
        }
    }
    outcome.report.output_count = outcome.survivors.size();
    return outcome;
}

std::vector<std::string> instag_complexity_filter(const std::vector<TaggedPrompt>& tagged,
                                                  int min_tags,
                                                  std::optional<std::size_t> sample_size,
                                                  std::uint64_t seed) {
    if (min_tags < 1) throw std::invalid_argument("instag_complexity_filter: min_tags must be >= 1");
    std::vector<std::string> kept;
    for (const TaggedPrompt& t : tagged) {
        if (t.tags.size() >= static_cast<std::size_t>(min_tags)) kept.push_back(t.prompt_id);
    }
    if (!sample_size) return kept;
    if (*sample_size > kept.size()) {
        throw std::invalid_argument("instag_complexity_filter: sample_size exceeds survivor count");
    }
    std::mt19937_64 rng(splitmix64(seed ^ fnv1a64("instag_complexity")));
    auto picks = sample_without_replacement(rng, kept.size(), *sample_size);
    std::sort(picks.begin(), picks.end());  // keep input order
    std::vector<std::string> sampled;
    sampled.reserve(picks.size());
    for (std::size_t i : picks) sampled.push_back(kept[i]);
    return sampled;
}

std::vector<std::string> instag_diversity_select(const std::vector<TaggedPrompt>& tagged,
                                                 int tag_freq_min, int max_per_tag,
                                                 std::optional<std::uint64_t> shuffle_seed) {
    if (tag_freq_min < 1 || max_per_tag < 1) {
        throw std::invalid_argument("instag_diversity_select: parameters must be >= 1");
    }

    std::unordered_map<std::string, int> corpus_freq;
    for (const TaggedPrompt& t : tagged) {
        for (const std::string& tag : t.tags) ++corpus_freq[tag];
    }

    std::vector<std::size_t> order(tagged.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    if (shuffle_seed) {
        std::mt19937_64 rng(splitmix64(*shuffle_seed ^ fnv1a64("instag_diversity")));
        for (std::size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[uniform_index(rng, i)]);
        }
    }

    std::unordered_map<std::string, int> used;
    std::vector<std::string> kept;
    for (std::size_t idx : order) {
        const TaggedPrompt& t = tagged[idx];
        bool has_capacity = false;
        for (const std::string& tag : t.tags) {
            if (corpus_freq[tag] < tag_freq_min) continue;  // invalid tag
            if (used[tag] < max_per_tag) {
                has_capacity = true;
                break;
            }
        }
        if (!has_capacity) continue;
        kept.push_back(t.prompt_id);
        for (const std::string& tag : t.tags) {
            if (corpus_freq[tag] >= tag_freq_min) ++used[tag];
        }
    }
    return kept;
}

PromptJudgeOutcome prompt_judge_filter(const std::vector<PromptRecord>& prompts,
                                       PromptJudgeMode mode, int repeats, double cutoff,
                                       PromptJudgeClient& client, const AnnotationConfig& cfg) {
    if (repeats < 1) throw std::invalid_argument("prompt_judge_filter: repeats must be >= 1");

    PromptJudgeOutcome outcome;
    outcome.report.method = "prompt_judge";
    outcome.report.input_count = prompts.size();
    outcome.report.resolved = {{"cutoff", cutoff}};

    for (std::size_t i = 0; i < prompts.size(); ++i) {
        const PromptRecord& prompt = prompts[i];
        double total = 0.0;
        bool failed = false;
        for (int rep = 0; rep < repeats && !failed; ++rep) {
            try {
                double score = 0.0;
                with_retries(cfg.retries, cfg.retry_backoff_ms, [&] {
                    score = client.judge_prompt(prompt.text, mode,
                                                cfg.seed + static_cast<std::uint64_t>(rep));
                });
                total += score;
            } catch (const std::exception& e) {
                outcome.failures.emplace_back(prompt.id, e.what());
                outcome.report.drops.push_back({i, prompt.id, "judge_failure"});
                failed = true;
            }
        }
        if (failed) continue;
        const double mean_score = total / repeats;
        outcome.scores.emplace_back(prompt.id, mean_score);
        if (mean_score >= cutoff) {
            outcome.survivors.push_back(prompt);
        } else {
            outcome.report.drops.push_back({i, prompt.id, "below_cutoff"});
        }
    }
    outcome.report.output_count = outcome.survivors.size();
    return outcome;
}

}  // namespace prefkit
