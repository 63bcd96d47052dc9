#include "prefkit/selfgen.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "prefkit/pairing.hpp"
#include "prefkit/text_metrics.hpp"
#include "prefkit/util.hpp"

namespace prefkit {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

// Must stay byte-identical to assets/templates/fewshot_task_template.txt.
constexpr const char* kFewshotTemplate =
    "Below are sample tasks from user.\n"
    "1. <begin>{INSTRUCTION 1}</end>\n"
    "2. <begin>{INSTRUCTION 2}</end>\n"
    "3. <begin>{INSTRUCTION 3}</end>\n"
    "4. <begin>{INSTRUCTION 4}</end>\n"
    "5. <begin>{INSTRUCTION 5}</end>\n"
    "6. <begin>{INSTRUCTION 6}</end>\n"
    "7. <begin>{INSTRUCTION 7}</end>\n"
    "8. <begin>{INSTRUCTION 8}</end>\n"
    "\n"
    "Come up with a series of new tasks, wrapped with <begin> and </end>\n"
    "9.";

constexpr const char* kBeginMarker = "<begin>";
constexpr const char* kEndMarker = "</end>";

}  // namespace

std::vector<PromptRecord> SeedPool::effective_prompts() const {
    if (!subsample_size || *subsample_size >= prompts.size()) return prompts;
    std::mt19937_64 rng(splitmix64(seed ^ fnv1a64("seed_pool_subsample")));
    auto picks = sample_without_replacement(rng, prompts.size(), *subsample_size);
    std::sort(picks.begin(), picks.end());
    std::vector<PromptRecord> out;
    out.reserve(picks.size());
    for (std::size_t i : picks) out.push_back(prompts[i]);
    return out;
}

const std::string& default_fewshot_template() {
    static const std::string tmpl = kFewshotTemplate;
    return tmpl;
}

std::string build_fewshot_prompt(const std::vector<PromptRecord>& examples,
                                 const std::string& template_text) {
    if (examples.size() != kFewshotCount) {
        throw std::invalid_argument("build_fewshot_prompt: exactly " +
                                    std::to_string(kFewshotCount) + " examples required, got " +
                                    std::to_string(examples.size()));
    }
    std::string out = template_text.empty() ? default_fewshot_template() : template_text;
    for (std::size_t i = 0; i < kFewshotCount; ++i) {
        if (examples[i].text.find(kEndMarker) != std::string::npos) {
            throw std::invalid_argument("build_fewshot_prompt: example \"" + examples[i].id +
                                        "\" contains the literal " + kEndMarker + " marker");
        }
        const std::string placeholder = "{INSTRUCTION " + std::to_string(i + 1) + "}";
        const std::size_t pos = out.find(placeholder);
        if (pos == std::string::npos) {
            throw std::invalid_argument("build_fewshot_prompt: template is missing the " +
                                        placeholder + " placeholder");
        }
        out.replace(pos, placeholder.size(), examples[i].text);
    }
    return out;
}

std::vector<std::string> parse_generated_tasks(const std::string& model_output) {
    std::vector<std::string> tasks;
    std::size_t pos = 0;
    const std::size_t begin_len = std::char_traits<char>::length(kBeginMarker);
    const std::size_t end_len = std::char_traits<char>::length(kEndMarker);
    for (;;) {
        const std::size_t begin = model_output.find(kBeginMarker, pos);
        if (begin == std::string::npos) break;
        const std::size_t body = begin + begin_len;
        const std::size_t end = model_output.find(kEndMarker, body);
        if (end == std::string::npos) break;
        const std::string task(trim(std::string_view(model_output).substr(body, end - body)));
        if (!task.empty()) tasks.push_back(task);
        pos = end + end_len;
    }
    return tasks;
}

std::vector<std::string> dedup_candidates(const std::vector<std::string>& candidates,
                                          const std::vector<std::string>& existing,
                                          double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        throw std::invalid_argument("dedup_candidates: threshold must be in (0, 1]");
    }
    std::vector<std::vector<std::string>> comparison;
    comparison.reserve(existing.size());
    for (const std::string& text : existing) comparison.push_back(split_words(text));

    std::vector<std::string> survivors;
    for (const std::string& candidate : candidates) {
        const auto words = split_words(candidate);
        bool duplicate = false;
        for (const auto& other : comparison) {
            if (rouge_l_words(words, other) >= threshold) {
                duplicate = true;
                break;
            }
        }
        if (duplicate) continue;
        survivors.push_back(candidate);
        comparison.push_back(words);
    }
    return survivors;
}

const std::vector<std::string>& default_excluded_keywords() {
    static const std::vector<std::string> keywords = {
        "image", "picture", "graph",     "file",    "map",   "draw",  "plot",
        "go to", "video",   "audio",     "music",   "flowchart",     "diagram",
    };
    return keywords;
}

namespace {

bool is_word_char(unsigned char c) { return std::isalnum(c) != 0; }

}  // namespace

bool contains_keyword(const std::string& text, const std::string& keyword) {
    const std::string haystack = to_lower(text);
    const std::string needle = to_lower(keyword);
    if (needle.empty()) return false;
    std::size_t pos = 0;
    while ((pos = haystack.find(needle, pos)) != std::string::npos) {
        const bool left_ok = pos == 0 || !is_word_char(haystack[pos - 1]);
        const std::size_t after = pos + needle.size();
        const bool right_ok = after >= haystack.size() || !is_word_char(haystack[after]);
        if (left_ok && right_ok) return true;
        ++pos;
    }
    return false;
}

std::vector<std::string> keyword_exclude(const std::vector<std::string>& candidates,
                                         const std::vector<std::string>& keywords) {
    std::vector<std::string> survivors;
    for (const std::string& candidate : candidates) {
        bool excluded = false;
        for (const std::string& keyword : keywords) {
            if (contains_keyword(candidate, keyword)) {
                excluded = true;
                break;
            }
        }
        if (!excluded) survivors.push_back(candidate);
    }
    return survivors;
}

SelfRipResult self_rip_pipeline(const SeedPool& seed_pool, std::size_t target,
                                const AnnotationConfig& cfg, const SelfRipClients& clients,
                                const ThresholdPolicy& policy, const SelfGenOptions& options) {
    if (target < 1) throw std::invalid_argument("self_rip_pipeline: target must be >= 1");
    const std::vector<PromptRecord> pool = seed_pool.effective_prompts();
    if (pool.size() < kFewshotCount) {
        throw std::invalid_argument("self_rip_pipeline: seed pool must hold at least " +
                                    std::to_string(kFewshotCount) + " prompts");
    }

    std::size_t budget = options.max_generation_calls;
    if (budget == 0) budget = std::max<std::size_t>(32, 4 * target);

    // Comparison corpus for dedup: seed pool plus any extra existing texts,
    // then every accepted emission.
    std::vector<std::string> comparison;
    comparison.reserve(pool.size() + options.existing_texts.size());
    for (const PromptRecord& rec : pool) comparison.push_back(rec.text);
    for (const std::string& text : options.existing_texts) comparison.push_back(text);

    SelfRipResult result;
    std::mt19937_64 sampler(splitmix64(cfg.seed ^ fnv1a64("selfgen_fewshot_sampler")));

    while (result.prompts.size() < target && result.generation.calls < budget) {
        const auto picks = sample_without_replacement(sampler, pool.size(), kFewshotCount);
        std::vector<PromptRecord> examples;
        std::vector<std::string> fewshot_ids;
        examples.reserve(kFewshotCount);
        for (std::size_t i : picks) {
            examples.push_back(pool[i]);
            fewshot_ids.push_back(pool[i].id);
        }

        const std::uint64_t call_seed =
            derive_seed(cfg.seed, "selfgen_call_" + std::to_string(result.generation.calls));
        const std::string fewshot_prompt =
            build_fewshot_prompt(examples, options.fewshot_template);
        std::vector<std::string> outputs;
        with_retries(cfg.retries, cfg.retry_backoff_ms, [&] {
            outputs = clients.task_gen.generate(fewshot_prompt, 1, cfg.temperature, cfg.top_p,
                                                call_seed);
        });
        ++result.generation.calls;
        if (outputs.empty()) continue;

        const std::vector<std::string> parsed = parse_generated_tasks(outputs[0]);
        result.generation.parsed += parsed.size();

        const std::vector<std::string> deduped =
            dedup_candidates(parsed, comparison, options.dedup_threshold);
        result.generation.dropped_dedup += parsed.size() - deduped.size();

        const std::vector<std::string> kept = keyword_exclude(deduped, options.keywords);
        result.generation.dropped_keyword += deduped.size() - kept.size();

        for (const std::string& text : kept) {
            if (result.prompts.size() >= target) break;
            result.prompts.push_back({text, fewshot_ids, call_seed});
            comparison.push_back(text);
        }
    }
    result.generation.accepted = result.prompts.size();
    result.generation.target_reached = result.prompts.size() >= target;
    result.complete = result.generation.target_reached;

    // Stage 2: annotate the synthetic prompts and RIP-filter the pairs.
    result.records.reserve(result.prompts.size());
    for (std::size_t i = 0; i < result.prompts.size(); ++i) {
        PromptRecord rec;
        char suffix[16];
        std::snprintf(suffix, sizeof(suffix), "%06zu", i);
        rec.id = options.synthetic_id_prefix + suffix;
        rec.text = result.prompts[i].text;
        rec.meta["fewshot_ids"] = result.prompts[i].fewshot_ids;
        rec.meta["generation_seed"] = result.prompts[i].generation_seed;
        result.records.push_back(std::move(rec));
    }

    const AnnotationBatch batch =
        annotate_dataset(result.records, cfg, clients.response_gen, clients.reward);
    result.annotation_failures = batch.failures;

    std::vector<PreferencePair> unfiltered;
    unfiltered.reserve(batch.annotated.size());
    for (const AnnotatedPrompt& annotated : batch.annotated) {
        PairingResult paired = pair_best_vs_worst(annotated.prompt, annotated.responses);
        if (!paired.degenerate()) unfiltered.push_back(std::move(*paired.pair));
    }

    FilterOutcome filtered = rip_filter(unfiltered, policy);
    result.pairs = std::move(filtered.survivors);
    result.post_filter = std::move(filtered.report);
    return result;
}

json SelfRipResult::to_json() const {
    return json{{"generation",
                 {{"calls", generation.calls},
                  {"parsed", generation.parsed},
                  {"dropped_dedup", generation.dropped_dedup},
                  {"dropped_keyword", generation.dropped_keyword},
                  {"accepted", generation.accepted},
                  {"target_reached", generation.target_reached}}},
                {"post_filter", post_filter.to_json()},
                {"annotation_failures", annotation_failures.size()},
                {"complete", complete}};
}

void write_synthetic_prompts(const std::vector<SyntheticPrompt>& prompts,
                             const std::string& id_prefix, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    for (std::size_t i = 0; i < prompts.size(); ++i) {
        char suffix[16];
        std::snprintf(suffix, sizeof(suffix), "%06zu", i);
        ordered_json obj;
        obj["id"] = id_prefix + suffix;
        obj["text"] = prompts[i].text;
        obj["turn_index"] = 0;
        obj["fewshot_ids"] = prompts[i].fewshot_ids;
        obj["generation_seed"] = prompts[i].generation_seed;
        out << obj.dump() << '\n';
    }
    if (!out) throw std::runtime_error("write failure: " + path);
}

}  // namespace prefkit
