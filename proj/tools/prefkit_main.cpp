// prefkit: curation toolkit for pairwise preference datasets.
//
// Subcommands: preprocess, annotate, pair, rip-filter, sweep,
// baseline-filter, selfgen, stats, validate.
// Exit codes: 0 success, 1 validation/operational failure, 2 usage error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "prefkit/baselines.hpp"
#include "prefkit/core.hpp"
#include "prefkit/http_clients.hpp"
#include "prefkit/ingest.hpp"
#include "prefkit/mocklab.hpp"
#include "prefkit/mocks.hpp"
#include "prefkit/pairing.hpp"
#include "prefkit/report.hpp"
#include "prefkit/rip.hpp"
#include "prefkit/scoring.hpp"
#include "prefkit/selfgen.hpp"
#include "prefkit/util.hpp"

using json = nlohmann::json;
using namespace prefkit;

namespace {

// Every artifact gets a sidecar provenance file; JSON reports embed the
// same record under "provenance".
void write_sidecar_provenance(const std::string& artifact_path, const json& config,
                              const std::vector<std::string>& inputs) {
    const json prov = make_provenance(config, inputs);
    write_text_file(artifact_path + ".prov.json", emit_report(prov, ReportFormat::json));
}

void write_report_file(const std::string& path, json report, const json& config,
                       const std::vector<std::string>& inputs, ReportFormat format) {
    report["provenance"] = make_provenance(config, inputs);
    write_text_file(path, emit_report(report, format));
}

std::vector<QuantileRange> parse_percent_ranges(const std::string& spec) {
    std::vector<QuantileRange> ranges;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) {
            throw std::invalid_argument("range \"" + item + "\" must look like lo:hi (percent)");
        }
        QuantileRange r;
        r.q_lo = std::stod(item.substr(0, colon)) / 100.0;
        r.q_hi = std::stod(item.substr(colon + 1)) / 100.0;
        ranges.push_back(r);
    }
    if (ranges.empty()) throw std::invalid_argument("no ranges given");
    return ranges;
}

// Shared client-selection flags for commands that call out to models.
struct ClientOptions {
    std::string kind = "mock";  // mock | http
    std::uint64_t mock_seed = 0;
    int mock_min_words = 5;
    int mock_max_words = 40;
    std::string gen_url;
    std::string score_url;
    std::string judge_prompt_url;
    std::string logprob_url;
    std::string client_id = "http";
    std::string auth_env;

    void attach(CLI::App* cmd) {
        cmd->add_option("--client", kind, "Client backend: mock or http")
            ->check(CLI::IsMember({"mock", "http"}))
            ->capture_default_str();
        cmd->add_option("--mock-seed", mock_seed, "Mock client seed")->capture_default_str();
        cmd->add_option("--mock-min-words", mock_min_words)->capture_default_str();
        cmd->add_option("--mock-max-words", mock_max_words)->capture_default_str();
        cmd->add_option("--gen-url", gen_url, "Generation endpoint base URL");
        cmd->add_option("--score-url", score_url, "Reward endpoint base URL");
        cmd->add_option("--prompt-judge-url", judge_prompt_url, "Prompt judge endpoint base URL");
        cmd->add_option("--logprob-url", logprob_url, "Logprob endpoint base URL");
        cmd->add_option("--client-id", client_id, "Identity of the http endpoint")
            ->capture_default_str();
        cmd->add_option("--auth-env", auth_env,
                        "Environment variable holding a bearer token for http clients");
    }

    json to_json() const {
        return json{{"kind", kind},       {"mock_seed", mock_seed},
                    {"mock_min_words", mock_min_words}, {"mock_max_words", mock_max_words},
                    {"gen_url", gen_url}, {"score_url", score_url},
                    {"client_id", client_id}};
    }

    std::unique_ptr<GenerationClient> make_generation() const {
        if (kind == "mock") {
            return std::make_unique<MockGenerationClient>(mock_seed, mock_min_words,
                                                          mock_max_words);
        }
        if (gen_url.empty()) throw std::invalid_argument("--gen-url required with --client http");
        return std::make_unique<HttpGenerationClient>(
            EndpointConfig{gen_url, client_id + ":gen", auth_env});
    }

    std::unique_ptr<GenerationClient> make_task_generation() const {
        if (kind == "mock") return std::make_unique<MockTaskGenerationClient>(mock_seed);
        if (gen_url.empty()) throw std::invalid_argument("--gen-url required with --client http");
        return std::make_unique<HttpGenerationClient>(
            EndpointConfig{gen_url, client_id + ":gen", auth_env});
    }

    std::unique_ptr<RewardClient> make_reward() const {
        if (kind == "mock") return std::make_unique<MockRewardClient>();
        if (score_url.empty()) throw std::invalid_argument("--score-url required with --client http");
        return std::make_unique<HttpRewardClient>(
            EndpointConfig{score_url, client_id + ":score", auth_env});
    }

    std::unique_ptr<PromptJudgeClient> make_prompt_judge() const {
        if (kind == "mock") return std::make_unique<MockPromptJudgeClient>(mock_seed);
        if (judge_prompt_url.empty()) {
            throw std::invalid_argument("--prompt-judge-url required with --client http");
        }
        return std::make_unique<HttpPromptJudgeClient>(
            EndpointConfig{judge_prompt_url, client_id + ":prompt_judge", auth_env});
    }

    std::unique_ptr<LogProbClient> make_logprob() const {
        if (kind == "mock") return std::make_unique<MockLogProbClient>(mock_seed);
        if (logprob_url.empty()) {
            throw std::invalid_argument("--logprob-url required with --client http");
        }
        return std::make_unique<HttpLogProbClient>(
            EndpointConfig{logprob_url, client_id + ":logprobs", auth_env});
    }
};

// --- validate ----------------------------------------------------------------

struct ValidateArgs {
    std::string prompts_path;
    std::string pairs_path;
    std::string report_path;
};

int run_validate(const ValidateArgs& args) {
    Dataset dataset;
    std::vector<std::string> inputs;
    if (!args.prompts_path.empty()) {
        dataset = load_prompts(args.prompts_path);
        inputs.push_back(args.prompts_path);
    }
    if (!args.pairs_path.empty()) {
        dataset.pairs = load_pairs(args.pairs_path);
        inputs.push_back(args.pairs_path);
    }
    const ValidationReport report = validate_dataset(dataset);
    const json config{{"command", "validate"},
                      {"prompts", args.prompts_path},
                      {"pairs", args.pairs_path}};
    if (!args.report_path.empty()) {
        write_report_file(args.report_path, report.to_json(), config, inputs, ReportFormat::json);
    } else {
        std::cout << emit_report(report.to_json(), ReportFormat::json);
    }
    return report.ok() ? 0 : 1;
}

// --- preprocess ---------------------------------------------------------------

struct PreprocessArgs {
    std::string in_path;
    std::string out_path;
    std::string report_path;
    std::vector<std::string> keep_langs;
    std::vector<std::string> drop_prefixes;
    bool first_turn_only = false;
    bool exact_dedup = false;
    bool wildchat_defaults = false;
};

int run_preprocess(const PreprocessArgs& args) {
    PreprocessRules rules;
    if (args.wildchat_defaults) rules = wildchat_default_rules();
    for (const auto& lang : args.keep_langs) rules.keep_langs.insert(lang);
    for (const auto& prefix : args.drop_prefixes) rules.drop_prefixes.push_back(prefix);
    if (args.first_turn_only) rules.first_turn_only = true;
    if (args.exact_dedup) rules.exact_dedup = true;

    const Dataset dataset = load_prompts(args.in_path);
    const PreprocessResult result = preprocess(dataset, rules);
    write_prompts(result.dataset.records, args.out_path);

    const json config{{"command", "preprocess"},
                      {"in", args.in_path},
                      {"out", args.out_path},
                      {"keep_langs", std::vector<std::string>(rules.keep_langs.begin(),
                                                              rules.keep_langs.end())},
                      {"drop_prefixes", rules.drop_prefixes},
                      {"first_turn_only", rules.first_turn_only},
                      {"exact_dedup", rules.exact_dedup}};
    write_sidecar_provenance(args.out_path, config, {args.in_path});

    json drops = json::array();
    for (const auto& [id, reason] : result.drops) {
        drops.push_back({{"id", id}, {"reason", reason}});
    }
    json report{{"input_count", dataset.records.size()},
                {"output_count", result.dataset.records.size()},
                {"drops", std::move(drops)}};
    if (!args.report_path.empty()) {
        write_report_file(args.report_path, std::move(report), config, {args.in_path},
                          ReportFormat::json);
    }
    std::cerr << "preprocess: kept " << result.dataset.records.size() << "/"
              << dataset.records.size() << "\n";
    return 0;
}

// --- annotate -----------------------------------------------------------------

struct AnnotateArgs {
    std::string prompts_path;
    std::string out_path;
    std::string report_path;
    bool with_logprobs = false;
    AnnotationConfig cfg;
    ClientOptions clients;
};

int run_annotate(const AnnotateArgs& args) {
    const Dataset dataset = load_prompts(args.prompts_path);
    auto gen = args.clients.make_generation();
    auto scorer = args.clients.make_reward();

    const AnnotationBatch batch = annotate_dataset(dataset.records, args.cfg, *gen, *scorer);

    std::map<std::string, std::vector<ScoredResponse>> grouped;
    for (const AnnotatedPrompt& annotated : batch.annotated) {
        grouped[annotated.prompt.id] = annotated.responses;
    }
    if (args.with_logprobs) {
        auto logprobs = args.clients.make_logprob();
        for (const AnnotatedPrompt& annotated : batch.annotated) {
            for (ScoredResponse& response : grouped[annotated.prompt.id]) {
                response.token_logprobs =
                    logprobs->logprobs(annotated.prompt.text, response.text);
                response.unconditioned_logprobs =
                    logprobs->logprobs(std::nullopt, response.text);
            }
        }
    }
    write_responses(grouped, args.out_path);

    const json config{{"command", "annotate"},
                      {"prompts", args.prompts_path},
                      {"out", args.out_path},
                      {"n_samples", args.cfg.n_samples},
                      {"temperature", args.cfg.temperature},
                      {"top_p", args.cfg.top_p},
                      {"seed", args.cfg.seed},
                      {"clients", args.clients.to_json()}};
    write_sidecar_provenance(args.out_path, config, {args.prompts_path});

    json failures = json::array();
    for (const auto& [id, error] : batch.failures) {
        failures.push_back({{"id", id}, {"error", error}});
    }
    json report{{"annotated", batch.annotated.size()}, {"failures", std::move(failures)}};
    if (!args.report_path.empty()) {
        write_report_file(args.report_path, std::move(report), config, {args.prompts_path},
                          ReportFormat::json);
    }
    std::cerr << "annotate: " << batch.annotated.size() << " prompts annotated, "
              << batch.failures.size() << " failed\n";
    return 0;
}

// --- pair ----------------------------------------------------------------------

struct PairArgs {
    std::string prompts_path;
    std::string responses_path;
    std::string out_path;
    std::string report_path;
    std::string strategy = "best_vs_worst";
    double k_percent = 25.0;
    std::uint64_t seed = 0;
};

int run_pair(const PairArgs& args) {
    const Dataset dataset = load_prompts(args.prompts_path);
    const auto responses = load_responses(args.responses_path);
    const PairingStrategy strategy =
        pairing_strategy_from_string(args.strategy, args.k_percent, args.seed);

    std::vector<PreferencePair> pairs;
    json drops = json::array();
    for (const PromptRecord& prompt : dataset.records) {
        auto it = responses.find(prompt.id);
        if (it == responses.end()) {
            drops.push_back({{"id", prompt.id}, {"reason", "no responses"}});
            continue;
        }
        try {
            PairingResult result = pair_with_strategy(prompt, it->second, strategy);
            if (result.degenerate()) {
                drops.push_back({{"id", prompt.id}, {"reason", result.drop_reason}});
            } else {
                pairs.push_back(std::move(*result.pair));
            }
        } catch (const std::invalid_argument& e) {
            drops.push_back({{"id", prompt.id}, {"reason", std::string("error: ") + e.what()}});
        }
    }
    write_pairs(pairs, args.out_path);

    const json config{{"command", "pair"},
                      {"prompts", args.prompts_path},
                      {"responses", args.responses_path},
                      {"strategy", args.strategy},
                      {"k_percent", args.k_percent},
                      {"seed", args.seed}};
    const std::vector<std::string> inputs{args.prompts_path, args.responses_path};
    write_sidecar_provenance(args.out_path, config, inputs);

    json report{{"input_count", dataset.records.size()},
                {"pair_count", pairs.size()},
                {"drops", std::move(drops)}};
    if (!args.report_path.empty()) {
        write_report_file(args.report_path, std::move(report), config, inputs, ReportFormat::json);
    }
    std::cerr << "pair: " << pairs.size() << " pairs from " << dataset.records.size()
              << " prompts\n";
    return 0;
}

// --- rip-filter -----------------------------------------------------------------

struct RipFilterArgs {
    std::string pairs_path;
    std::string policy_path;
    std::string out_path;
    std::string report_path;
    std::string unit = "characters";
    std::string report_format = "json";
};

int run_rip_filter(const RipFilterArgs& args) {
    const std::vector<PreferencePair> pairs = load_pairs(args.pairs_path);
    const ThresholdPolicy policy = load_policy(args.policy_path);
    const LengthUnit unit = length_unit_from_string(args.unit);

    FilterOutcome outcome = rip_filter(pairs, policy, unit);
    write_pairs(outcome.survivors, args.out_path);

    const json config{{"command", "rip-filter"},
                      {"pairs", args.pairs_path},
                      {"policy", args.policy_path},
                      {"unit", args.unit}};
    const std::vector<std::string> inputs{args.pairs_path, args.policy_path};
    write_sidecar_provenance(args.out_path, config, inputs);

    if (!args.report_path.empty()) {
        write_report_file(args.report_path, outcome.report.to_json(), config, inputs,
                          report_format_from_string(args.report_format));
    }

    // aligned summary table on stdout alongside the JSON report
    json summary{{"input_count", outcome.report.input_count},
                 {"output_count", outcome.report.output_count},
                 {"resolved_policy", outcome.report.resolved_policy_json()}};
    std::cout << emit_report(summary, ReportFormat::table);
    std::cerr << "rip-filter: kept " << outcome.report.output_count << "/"
              << outcome.report.input_count << "\n";
    return 0;
}

// --- sweep -----------------------------------------------------------------------

struct SweepArgs {
    std::string pairs_path;
    std::string metric = "rejected_reward";
    std::string ranges;  // "0:100,10:100,..." in percent; empty = default grid
    std::string report_path;
    std::string unit = "characters";
    std::string report_format = "json";
};

int run_sweep(const SweepArgs& args) {
    const std::vector<PreferencePair> pairs = load_pairs(args.pairs_path);
    const SweepMetric metric = sweep_metric_from_string(args.metric);
    const std::vector<QuantileRange> ranges =
        args.ranges.empty() ? default_sweep_ranges(metric) : parse_percent_ranges(args.ranges);

    const SweepReport report = coordinate_sweep(pairs, metric, ranges,
                                                length_unit_from_string(args.unit));
    const json config{{"command", "sweep"},
                      {"pairs", args.pairs_path},
                      {"metric", args.metric},
                      {"ranges", args.ranges},
                      {"unit", args.unit}};
    write_report_file(args.report_path, report.to_json(), config, {args.pairs_path},
                      report_format_from_string(args.report_format));
    std::cerr << "sweep: " << ranges.size() << " ranges over " << pairs.size() << " pairs\n";
    return 0;
}

// --- baseline-filter ---------------------------------------------------------------

struct BaselineArgs {
    std::string method;
    std::string pairs_path;
    std::string responses_path;
    std::string prompts_path;
    std::string tags_path;
    std::string out_path;
    std::string report_path;
    std::string range = "25:100";
    double bound_quantile = 0.5;
    double bound_absolute = 0.0;
    bool bound_is_absolute = false;
    std::string direction = "keep_at_or_above";
    int min_tags = 2;
    std::size_t sample_size = 0;
    int tag_freq_min = 6;
    int max_per_tag = 3;
    std::string mode = "pointwise";
    int repeats = 5;
    double cutoff = 2.5;
    std::uint64_t seed = 0;
    ClientOptions clients;
};

int run_baseline(const BaselineArgs& args) {
    json config{{"command", "baseline-filter"}, {"method", args.method}, {"seed", args.seed}};
    std::vector<std::string> inputs;

    if (args.method == "ifd" || args.method == "ppl" || args.method == "jaccard") {
        if (args.pairs_path.empty()) throw std::invalid_argument("--pairs required");
        std::vector<PreferencePair> pairs = load_pairs(args.pairs_path);
        inputs.push_back(args.pairs_path);

        // pairs.jsonl carries no logprobs; ifd/ppl join them back from
        // responses.jsonl or fetch them through the logprob client.
        if (args.method != "jaccard") {
            if (!args.responses_path.empty()) {
                const auto responses = load_responses(args.responses_path);
                inputs.push_back(args.responses_path);
                for (PreferencePair& pair : pairs) {
                    auto it = responses.find(pair.prompt_id);
                    if (it == responses.end()) continue;
                    for (const ScoredResponse& r : it->second) {
                        if (r.text != pair.chosen.text) continue;
                        pair.chosen.token_logprobs = r.token_logprobs;
                        pair.chosen.unconditioned_logprobs = r.unconditioned_logprobs;
                        break;
                    }
                }
            } else {
                auto client = args.clients.make_logprob();
                for (PreferencePair& pair : pairs) {
                    pair.chosen.token_logprobs =
                        client->logprobs(pair.prompt_text, pair.chosen.text);
                    if (args.method == "ifd") {
                        pair.chosen.unconditioned_logprobs =
                            client->logprobs(std::nullopt, pair.chosen.text);
                    }
                }
            }
        }

        BaselineOutcome outcome;
        if (args.method == "jaccard") {
            const Bound bound = args.bound_is_absolute
                                    ? Bound::absolute(args.bound_absolute,
                                                      direction_from_string(args.direction))
                                    : Bound::quantile(args.bound_quantile,
                                                      direction_from_string(args.direction));
            outcome = jaccard_filter(pairs, bound);
            config["bound"] = args.bound_is_absolute ? json{{"absolute", args.bound_absolute}}
                                                     : json{{"quantile", args.bound_quantile}};
        } else {
            const auto ranges = parse_percent_ranges(args.range);
            if (ranges.size() != 1) throw std::invalid_argument("--range takes one lo:hi range");
            outcome = args.method == "ifd" ? ifd_filter(pairs, ranges[0])
                                           : perplexity_filter(pairs, ranges[0]);
            config["range"] = args.range;
        }
        write_pairs(outcome.survivors, args.out_path);
        write_sidecar_provenance(args.out_path, config, inputs);
        if (!args.report_path.empty()) {
            write_report_file(args.report_path, outcome.report.to_json(), config, inputs,
                              ReportFormat::json);
        }
        std::cerr << "baseline-filter " << args.method << ": kept " << outcome.survivors.size()
                  << "/" << pairs.size() << "\n";
        return 0;
    }

    if (args.method == "instag-complexity" || args.method == "instag-diversity") {
        if (args.prompts_path.empty() || args.tags_path.empty()) {
            throw std::invalid_argument("--prompts and --tags required");
        }
        const Dataset dataset = load_prompts(args.prompts_path);
        const std::vector<TaggedPrompt> tagged = load_tags(args.tags_path);
        inputs = {args.prompts_path, args.tags_path};

        std::vector<std::string> kept_ids;
        if (args.method == "instag-complexity") {
            std::optional<std::size_t> sample;
            if (args.sample_size > 0) sample = args.sample_size;
            kept_ids = instag_complexity_filter(tagged, args.min_tags, sample, args.seed);
            config["min_tags"] = args.min_tags;
            config["sample_size"] = args.sample_size;
        } else {
            kept_ids = instag_diversity_select(tagged, args.tag_freq_min, args.max_per_tag);
            config["tag_freq_min"] = args.tag_freq_min;
            config["max_per_tag"] = args.max_per_tag;
        }

        const std::set<std::string> keep(kept_ids.begin(), kept_ids.end());
        std::vector<PromptRecord> survivors;
        for (const PromptRecord& rec : dataset.records) {
            if (keep.count(rec.id)) survivors.push_back(rec);
        }
        write_prompts(survivors, args.out_path);
        write_sidecar_provenance(args.out_path, config, inputs);
        if (!args.report_path.empty()) {
            write_report_file(args.report_path,
                              json{{"input_count", dataset.records.size()},
                                   {"output_count", survivors.size()}},
                              config, inputs, ReportFormat::json);
        }
        std::cerr << "baseline-filter " << args.method << ": kept " << survivors.size() << "/"
                  << dataset.records.size() << "\n";
        return 0;
    }

    if (args.method == "prompt-judge") {
        if (args.prompts_path.empty()) throw std::invalid_argument("--prompts required");
        const Dataset dataset = load_prompts(args.prompts_path);
        inputs.push_back(args.prompts_path);
        auto client = args.clients.make_prompt_judge();
        AnnotationConfig cfg;
        cfg.seed = args.seed;
        cfg.prompt_judge_repeats = args.repeats;
        const PromptJudgeOutcome outcome =
            prompt_judge_filter(dataset.records, prompt_judge_mode_from_string(args.mode),
                                args.repeats, args.cutoff, *client, cfg);
        write_prompts(outcome.survivors, args.out_path);
        config["mode"] = args.mode;
        config["repeats"] = args.repeats;
        config["cutoff"] = args.cutoff;
        write_sidecar_provenance(args.out_path, config, inputs);
        if (!args.report_path.empty()) {
            write_report_file(args.report_path, outcome.report.to_json(), config, inputs,
                              ReportFormat::json);
        }
        std::cerr << "baseline-filter prompt-judge: kept " << outcome.survivors.size() << "/"
                  << dataset.records.size() << "\n";
        return 0;
    }

    throw std::invalid_argument("unknown baseline method: " + args.method);
}

// --- selfgen -------------------------------------------------------------------

struct SelfGenArgs {
    std::string seeds_path;
    std::string existing_path;
    std::string out_path;
    std::string pairs_out_path;
    std::string report_path;
    std::string post_policy_path;
    std::string template_path;
    std::size_t target = 100;
    std::size_t subsample = 0;
    std::size_t budget = 0;
    double dedup_threshold = 0.7;
    std::vector<std::string> extra_keywords;
    bool no_default_keywords = false;
    AnnotationConfig cfg;
    ClientOptions clients;
};

int run_selfgen(const SelfGenArgs& args) {
    SeedPool pool;
    pool.prompts = load_prompts(args.seeds_path).records;
    pool.seed = args.cfg.seed;
    if (args.subsample > 0) pool.subsample_size = args.subsample;

    SelfGenOptions options;
    options.dedup_threshold = args.dedup_threshold;
    options.max_generation_calls = args.budget;
    if (args.no_default_keywords) options.keywords.clear();
    for (const std::string& kw : args.extra_keywords) options.keywords.push_back(kw);

    std::vector<std::string> inputs{args.seeds_path};
    if (!args.template_path.empty()) {
        std::ifstream in(args.template_path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open template file: " + args.template_path);
        std::ostringstream ss;
        ss << in.rdbuf();
        options.fewshot_template = ss.str();
        inputs.push_back(args.template_path);
    }
    if (!args.existing_path.empty()) {
        for (const PromptRecord& rec : load_prompts(args.existing_path).records) {
            options.existing_texts.push_back(rec.text);
        }
        inputs.push_back(args.existing_path);
    }

    // Without an explicit post-filter policy, a vacuous lower bound keeps
    // every pair (generation-only run).
    ThresholdPolicy policy;
    bool post_filter_enabled = false;
    if (!args.post_policy_path.empty()) {
        policy = load_policy(args.post_policy_path);
        post_filter_enabled = true;
        inputs.push_back(args.post_policy_path);
    } else {
        policy.rejected_reward = Bound::quantile(0.0, BoundDirection::keep_at_or_above);
    }

    auto task_gen = args.clients.make_task_generation();
    auto response_gen = args.clients.make_generation();
    auto reward = args.clients.make_reward();
    const SelfRipClients pipeline_clients{*task_gen, *response_gen, *reward};

    const SelfRipResult result =
        self_rip_pipeline(pool, args.target, args.cfg, pipeline_clients, policy, options);

    write_synthetic_prompts(result.prompts, options.synthetic_id_prefix, args.out_path);
    const json config{{"command", "selfgen"},
                      {"seeds", args.seeds_path},
                      {"target", args.target},
                      {"subsample", args.subsample},
                      {"dedup_threshold", args.dedup_threshold},
                      {"post_policy", args.post_policy_path},
                      {"n_samples", args.cfg.n_samples},
                      {"seed", args.cfg.seed},
                      {"clients", args.clients.to_json()}};
    write_sidecar_provenance(args.out_path, config, inputs);

    if (!args.pairs_out_path.empty()) {
        write_pairs(result.pairs, args.pairs_out_path);
        write_sidecar_provenance(args.pairs_out_path, config, inputs);
    }
    if (!args.report_path.empty()) {
        json report = result.to_json();
        report["post_filter_enabled"] = post_filter_enabled;
        write_report_file(args.report_path, std::move(report), config, inputs,
                          ReportFormat::json);
    }
    std::cerr << "selfgen: " << result.prompts.size() << "/" << args.target
              << " prompts generated (" << (result.complete ? "complete" : "budget exhausted")
              << "), " << result.pairs.size() << " pairs after post-filter\n";
    return 0;
}

// --- stats ---------------------------------------------------------------------

struct StatsArgs {
    std::string pairs_path;
    std::string out_path;
    std::string unit = "characters";
};

int run_stats(const StatsArgs& args) {
    const std::vector<PreferencePair> pairs = load_pairs(args.pairs_path);
    const LengthUnit unit = length_unit_from_string(args.unit);

    // Plot-ready long format: metric,quantile,value.
    std::string csv = "metric,quantile,value\r\n";
    const SweepMetric metrics[] = {SweepMetric::rejected_reward, SweepMetric::rejected_length,
                                   SweepMetric::reward_gap,      SweepMetric::chosen_reward,
                                   SweepMetric::chosen_length,   SweepMetric::average_reward};
    for (SweepMetric metric : metrics) {
        std::vector<double> values;
        values.reserve(pairs.size());
        for (const PreferencePair& pair : pairs) {
            values.push_back(sweep_metric_value(pair, metric, unit));
        }
        if (values.empty()) continue;
        for (double q : kReportQuantiles) {
            csv += to_string(metric);
            csv.push_back(',');
            csv += format_float(q);
            csv.push_back(',');
            csv += format_float(quantile(values, q));
            csv += "\r\n";
        }
    }
    write_text_file(args.out_path, csv);
    const json config{{"command", "stats"}, {"pairs", args.pairs_path}, {"unit", args.unit}};
    write_sidecar_provenance(args.out_path, config, {args.pairs_path});
    std::cerr << "stats: wrote " << args.out_path << " for " << pairs.size() << " pairs\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"prefkit: curation toolkit for pairwise preference datasets"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read defaults from an INI/TOML config file");

    ValidateArgs validate_args;
    auto* validate_cmd = app.add_subcommand("validate", "Check dataset invariants");
    validate_cmd->add_option("--prompts", validate_args.prompts_path, "prompts.jsonl");
    validate_cmd->add_option("--pairs", validate_args.pairs_path, "pairs.jsonl");
    validate_cmd->add_option("--report", validate_args.report_path, "Report path (stdout if absent)");

    PreprocessArgs preprocess_args;
    auto* preprocess_cmd = app.add_subcommand("preprocess", "Apply language/prefix/turn/dedup rules");
    preprocess_cmd->add_option("--in", preprocess_args.in_path, "prompts.jsonl")->required();
    preprocess_cmd->add_option("--out", preprocess_args.out_path, "Output prompts.jsonl")->required();
    preprocess_cmd->add_option("--report", preprocess_args.report_path);
    preprocess_cmd->add_option("--keep-lang", preprocess_args.keep_langs, "Language tag to keep");
    preprocess_cmd->add_option("--drop-prefix", preprocess_args.drop_prefixes,
                               "Drop prompts starting with this literal prefix");
    preprocess_cmd->add_flag("--first-turn-only", preprocess_args.first_turn_only);
    preprocess_cmd->add_flag("--exact-dedup", preprocess_args.exact_dedup);
    preprocess_cmd->add_flag("--wildchat-defaults", preprocess_args.wildchat_defaults,
                             "English-only, Midjourney prefix, first turn, exact dedup");

    AnnotateArgs annotate_args;
    auto* annotate_cmd = app.add_subcommand("annotate", "Sample and score N responses per prompt");
    annotate_cmd->add_option("--prompts", annotate_args.prompts_path)->required();
    annotate_cmd->add_option("--out", annotate_args.out_path, "responses.jsonl")->required();
    annotate_cmd->add_option("--report", annotate_args.report_path);
    annotate_cmd->add_option("--n", annotate_args.cfg.n_samples)->capture_default_str();
    annotate_cmd->add_option("--temperature", annotate_args.cfg.temperature)->capture_default_str();
    annotate_cmd->add_option("--top-p", annotate_args.cfg.top_p)->capture_default_str();
    annotate_cmd->add_option("--seed", annotate_args.cfg.seed)->capture_default_str();
    annotate_cmd->add_option("--jobs", annotate_args.cfg.max_in_flight)->capture_default_str();
    annotate_cmd->add_option("--cache-dir", annotate_args.cfg.cache_dir);
    annotate_cmd->add_flag("--logprobs", annotate_args.with_logprobs,
                           "Also fetch per-token logprobs for every response");
    annotate_args.clients.attach(annotate_cmd);

    PairArgs pair_args;
    auto* pair_cmd = app.add_subcommand("pair", "Build preference pairs from scored responses");
    pair_cmd->add_option("--prompts", pair_args.prompts_path)->required();
    pair_cmd->add_option("--responses", pair_args.responses_path)->required();
    pair_cmd->add_option("--out", pair_args.out_path, "pairs.jsonl")->required();
    pair_cmd->add_option("--report", pair_args.report_path);
    pair_cmd->add_option("--strategy", pair_args.strategy,
                         "best_vs_worst | best_vs_bottom | best_vs_random")
        ->capture_default_str();
    pair_cmd->add_option("--k", pair_args.k_percent, "Bottom percentile for best_vs_bottom")
        ->capture_default_str();
    pair_cmd->add_option("--seed", pair_args.seed)->capture_default_str();

    RipFilterArgs rip_args;
    auto* rip_cmd = app.add_subcommand("rip-filter", "Filter pairs by the three reject metrics");
    rip_cmd->add_option("--pairs", rip_args.pairs_path)->required();
    rip_cmd->add_option("--policy", rip_args.policy_path, "Policy JSON file")->required();
    rip_cmd->add_option("--out", rip_args.out_path)->required();
    rip_cmd->add_option("--report", rip_args.report_path);
    rip_cmd->add_option("--unit", rip_args.unit, "characters | words | provider_tokens")
        ->capture_default_str();
    rip_cmd->add_option("--report-format", rip_args.report_format, "json | table | csv")
        ->capture_default_str();

    SweepArgs sweep_args;
    auto* sweep_cmd = app.add_subcommand("sweep", "Coordinate-wise quantile-range survivor counts");
    sweep_cmd->add_option("--pairs", sweep_args.pairs_path)->required();
    sweep_cmd->add_option("--metric", sweep_args.metric,
                          "rejected_reward | rejected_length | reward_gap | chosen_reward | "
                          "chosen_length | average_reward")
        ->capture_default_str();
    sweep_cmd->add_option("--ranges", sweep_args.ranges,
                          "Percent ranges lo:hi, comma separated (default: standard grid)");
    sweep_cmd->add_option("--report", sweep_args.report_path)->required();
    sweep_cmd->add_option("--unit", sweep_args.unit)->capture_default_str();
    sweep_cmd->add_option("--report-format", sweep_args.report_format)->capture_default_str();

    BaselineArgs baseline_args;
    auto* baseline_cmd = app.add_subcommand("baseline-filter", "Comparison filters");
    baseline_cmd
        ->add_option("--method", baseline_args.method,
                     "ifd | ppl | jaccard | instag-complexity | instag-diversity | prompt-judge")
        ->required();
    baseline_cmd->add_option("--pairs", baseline_args.pairs_path);
    baseline_cmd->add_option("--responses", baseline_args.responses_path,
                             "responses.jsonl with logprobs, joined for ifd/ppl");
    baseline_cmd->add_option("--prompts", baseline_args.prompts_path);
    baseline_cmd->add_option("--tags", baseline_args.tags_path);
    baseline_cmd->add_option("--out", baseline_args.out_path)->required();
    baseline_cmd->add_option("--report", baseline_args.report_path);
    baseline_cmd->add_option("--range", baseline_args.range, "Percent range lo:hi for ifd/ppl")
        ->capture_default_str();
    baseline_cmd->add_option("--bound-quantile", baseline_args.bound_quantile)
        ->capture_default_str();
    auto* abs_opt = baseline_cmd->add_option("--bound-absolute", baseline_args.bound_absolute);
    baseline_cmd->add_option("--direction", baseline_args.direction)->capture_default_str();
    baseline_cmd->add_option("--min-tags", baseline_args.min_tags)->capture_default_str();
    baseline_cmd->add_option("--sample-size", baseline_args.sample_size)->capture_default_str();
    baseline_cmd->add_option("--tag-freq-min", baseline_args.tag_freq_min)->capture_default_str();
    baseline_cmd->add_option("--max-per-tag", baseline_args.max_per_tag)->capture_default_str();
    baseline_cmd->add_option("--mode", baseline_args.mode, "binary | pointwise")
        ->capture_default_str();
    baseline_cmd->add_option("--repeats", baseline_args.repeats)->capture_default_str();
    baseline_cmd->add_option("--cutoff", baseline_args.cutoff)->capture_default_str();
    baseline_cmd->add_option("--seed", baseline_args.seed)->capture_default_str();
    baseline_args.clients.attach(baseline_cmd);

    SelfGenArgs selfgen_args;
    auto* selfgen_cmd = app.add_subcommand("selfgen", "Generate synthetic prompts from a seed pool");
    selfgen_cmd->add_option("--seeds", selfgen_args.seeds_path, "Seed-pool prompts.jsonl")
        ->required();
    selfgen_cmd->add_option("--existing", selfgen_args.existing_path,
                            "Extra corpus candidates must not duplicate");
    selfgen_cmd->add_option("--out", selfgen_args.out_path, "synthetic_prompts.jsonl")->required();
    selfgen_cmd->add_option("--pairs-out", selfgen_args.pairs_out_path,
                            "Write post-filtered preference pairs here");
    selfgen_cmd->add_option("--report", selfgen_args.report_path);
    selfgen_cmd->add_option("--post-policy", selfgen_args.post_policy_path,
                            "Policy JSON for RIP post-filtering (usually the resolved seed-run policy)");
    selfgen_cmd->add_option("--template", selfgen_args.template_path,
                            "Override the few-shot template asset");
    selfgen_cmd->add_option("--target", selfgen_args.target)->capture_default_str();
    selfgen_cmd->add_option("--subsample", selfgen_args.subsample,
                            "Use only this many seed prompts (0 = all)")
        ->capture_default_str();
    selfgen_cmd->add_option("--budget", selfgen_args.budget,
                            "Max generation calls (0 = 4x target)")
        ->capture_default_str();
    selfgen_cmd->add_option("--dedup-threshold", selfgen_args.dedup_threshold)
        ->capture_default_str();
    selfgen_cmd->add_option("--keyword", selfgen_args.extra_keywords,
                            "Additional excluded keyword");
    selfgen_cmd->add_flag("--no-default-keywords", selfgen_args.no_default_keywords);
    selfgen_cmd->add_option("--n", selfgen_args.cfg.n_samples)->capture_default_str();
    selfgen_cmd->add_option("--temperature", selfgen_args.cfg.temperature)->capture_default_str();
    selfgen_cmd->add_option("--top-p", selfgen_args.cfg.top_p)->capture_default_str();
    selfgen_cmd->add_option("--seed", selfgen_args.cfg.seed)->capture_default_str();
    selfgen_cmd->add_option("--jobs", selfgen_args.cfg.max_in_flight)->capture_default_str();
    selfgen_cmd->add_option("--cache-dir", selfgen_args.cfg.cache_dir);
    selfgen_args.clients.attach(selfgen_cmd);

    StatsArgs stats_args;
    auto* stats_cmd = app.add_subcommand("stats", "Emit plot-ready metric quantiles as CSV");
    stats_cmd->add_option("--pairs", stats_args.pairs_path)->required();
    stats_cmd->add_option("--out", stats_args.out_path)->required();
    stats_cmd->add_option("--unit", stats_args.unit)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage errors exit 2, --help exits 0
    }

    try {
        if (validate_cmd->parsed()) {
            if (validate_args.prompts_path.empty() && validate_args.pairs_path.empty()) {
                std::cerr << "validate: give --prompts and/or --pairs\n";
                return 2;
            }
            return run_validate(validate_args);
        }
        if (preprocess_cmd->parsed()) return run_preprocess(preprocess_args);
        if (annotate_cmd->parsed()) return run_annotate(annotate_args);
        if (pair_cmd->parsed()) return run_pair(pair_args);
        if (rip_cmd->parsed()) return run_rip_filter(rip_args);
        if (sweep_cmd->parsed()) return run_sweep(sweep_args);
        if (baseline_cmd->parsed()) {
            baseline_args.bound_is_absolute = abs_opt->count() > 0;
            return run_baseline(baseline_args);
        }
        if (selfgen_cmd->parsed()) return run_selfgen(selfgen_args);
        if (stats_cmd->parsed()) return run_stats(stats_args);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
