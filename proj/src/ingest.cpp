#include "prefkit/ingest.hpp"

#include <fstream>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "prefkit/util.hpp"

namespace prefkit {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

const char* const kMidjourneyPrefix =
    "As a prompt generator for a generative AI called \"Midjourney\"";

PreprocessRules wildchat_default_rules() {
    PreprocessRules rules;
    rules.keep_langs = {"en"};
    rules.drop_prefixes = {kMidjourneyPrefix};
    rules.first_turn_only = true;
    rules.exact_dedup = true;
    return rules;
}

namespace {

[[noreturn]] void line_error(const std::string& path, std::size_t line_no,
                             const std::string& what) {
    throw std::runtime_error(path + ": line " + std::to_string(line_no) + ": " + what);
}

std::ifstream open_for_read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    return in;
}

std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open file for writing: " + path);
    return out;
}

// Calls fn(line_no, parsed) for every non-empty line.
template <typename Fn>
void for_each_json_line(const std::string& path, Fn&& fn) {
    std::ifstream in = open_for_read(path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json parsed;
        try {
            parsed = json::parse(line);
        } catch (const json::parse_error& e) {
            line_error(path, line_no, std::string("parse failure: ") + e.what());
        }
        if (!parsed.is_object()) line_error(path, line_no, "expected a JSON object");
        fn(line_no, parsed);
    }
}

const json& require_field(const json& obj, const char* name,
                          const std::string& path, std::size_t line_no) {
    auto it = obj.find(name);
    if (it == obj.end()) {
        line_error(path, line_no, std::string("missing field '") + name + "'");
    }
    return *it;
}

std::vector<double> to_double_list(const json& arr, const std::string& path,
                                   std::size_t line_no, const char* name) {
    if (!arr.is_array()) line_error(path, line_no, std::string(name) + " must be an array");
    std::vector<double> out;
    out.reserve(arr.size());
    for (const auto& v : arr) {
        if (!v.is_number()) line_error(path, line_no, std::string(name) + " must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

}  // namespace

Dataset load_prompts(const std::string& path) {
    Dataset dataset;
    for_each_json_line(path, [&](std::size_t line_no, const json& obj) {
        PromptRecord rec;
        rec.id = require_field(obj, "id", path, line_no).get<std::string>();
        rec.text = require_field(obj, "text", path, line_no).get<std::string>();
        if (obj.contains("lang") && !obj["lang"].is_null()) {
            rec.lang = obj["lang"].get<std::string>();
        }
        if (obj.contains("turn_index")) rec.turn_index = obj["turn_index"].get<int>();
        if (obj.contains("meta") && obj["meta"].is_object()) rec.meta = obj["meta"];
        // Unknown top-level fields are kept rather than rejected.
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            if (it.key() == "id" || it.key() == "text" || it.key() == "lang" ||
                it.key() == "turn_index" || it.key() == "meta") {
                continue;
            }
            rec.meta[it.key()] = it.value();
        }
        rec.meta["line"] = line_no;
        dataset.records.push_back(std::move(rec));
    });
    dataset.provenance_log.push_back("load_prompts: " + path + " (" +
                                     std::to_string(dataset.records.size()) + " records)");
    return dataset;
}

void write_prompts(const std::vector<PromptRecord>& records, const std::string& path) {
    std::ofstream out = open_for_write(path);
    for (const PromptRecord& rec : records) {
        ordered_json obj;
        obj["id"] = rec.id;
        obj["text"] = rec.text;
        if (rec.lang) obj["lang"] = *rec.lang;
        obj["turn_index"] = rec.turn_index;
        if (!rec.meta.empty()) obj["meta"] = rec.meta;
        out << obj.dump() << '\n';
    }
    if (!out) throw std::runtime_error("write failure: " + path);
}

std::map<std::string, std::vector<ScoredResponse>> load_responses(const std::string& path) {
    std::map<std::string, std::vector<ScoredResponse>> grouped;
    for_each_json_line(path, [&](std::size_t line_no, const json& obj) {
        ScoredResponse resp;
        const std::string prompt_id =
            require_field(obj, "prompt_id", path, line_no).get<std::string>();
        resp.sample_index = require_field(obj, "sample_index", path, line_no).get<int>();
        resp.text = require_field(obj, "text", path, line_no).get<std::string>();
        if (obj.contains("reward") && !obj["reward"].is_null()) {
            resp.reward = obj["reward"].get<double>();
        }
        if (obj.contains("token_logprobs") && !obj["token_logprobs"].is_null()) {
            resp.token_logprobs =
                to_double_list(obj["token_logprobs"], path, line_no, "token_logprobs");
        }
        if (obj.contains("unconditioned_logprobs") && !obj["unconditioned_logprobs"].is_null()) {
            resp.unconditioned_logprobs = to_double_list(obj["unconditioned_logprobs"], path,
                                                         line_no, "unconditioned_logprobs");
        }
        grouped[prompt_id].push_back(std::move(resp));
    });
    for (auto& [id, responses] : grouped) {
        std::stable_sort(responses.begin(), responses.end(),
                         [](const ScoredResponse& a, const ScoredResponse& b) {
                             return a.sample_index < b.sample_index;
                         });
    }
    return grouped;
}

void write_responses(const std::map<std::string, std::vector<ScoredResponse>>& responses,
                     const std::string& path) {
    std::ofstream out = open_for_write(path);
    for (const auto& [prompt_id, list] : responses) {
        for (const ScoredResponse& resp : list) {
            ordered_json obj;
            obj["prompt_id"] = prompt_id;
            obj["sample_index"] = resp.sample_index;
            obj["text"] = resp.text;
            if (resp.reward) obj["reward"] = *resp.reward;
            if (resp.token_logprobs) obj["token_logprobs"] = *resp.token_logprobs;
            if (resp.unconditioned_logprobs) {
                obj["unconditioned_logprobs"] = *resp.unconditioned_logprobs;
            }
            out << obj.dump() << '\n';
        }
    }
    if (!out) throw std::runtime_error("write failure: " + path);
}

std::vector<PreferencePair> load_pairs(const std::string& path) {
    std::vector<PreferencePair> pairs;
    for_each_json_line(path, [&](std::size_t line_no, const json& obj) {
        PreferencePair pair;
        pair.prompt_id = require_field(obj, "prompt_id", path, line_no).get<std::string>();
        pair.prompt_text = require_field(obj, "prompt", path, line_no).get<std::string>();
        pair.chosen.text = require_field(obj, "chosen", path, line_no).get<std::string>();
        pair.rejected.text = require_field(obj, "rejected", path, line_no).get<std::string>();
        pair.chosen.reward = require_field(obj, "chosen_reward", path, line_no).get<double>();
        pair.rejected.reward = require_field(obj, "rejected_reward", path, line_no).get<double>();
        pairs.push_back(std::move(pair));
    });
    return pairs;
}

void write_pairs(const std::vector<PreferencePair>& pairs, const std::string& path) {
    std::ofstream out = open_for_write(path);
    for (const PreferencePair& pair : pairs) {
        if (!pair.chosen.reward || !pair.rejected.reward) {
            throw std::runtime_error("write_pairs: pair \"" + pair.prompt_id +
                                     "\" is missing a reward");
        }
        // Schema field order is frozen.
        ordered_json obj;
        obj["prompt_id"] = pair.prompt_id;
        obj["prompt"] = pair.prompt_text;
        obj["chosen"] = pair.chosen.text;
        obj["rejected"] = pair.rejected.text;
        obj["chosen_reward"] = *pair.chosen.reward;
        obj["rejected_reward"] = *pair.rejected.reward;
        out << obj.dump() << '\n';
    }
    if (!out) throw std::runtime_error("write failure: " + path);
}

PreprocessResult preprocess(const Dataset& dataset, const PreprocessRules& rules) {
    PreprocessResult result;
    result.dataset.provenance_log = dataset.provenance_log;

    std::unordered_set<std::string> seen_texts;
    for (const PromptRecord& rec : dataset.records) {
        std::string reason;
        const std::string trimmed(trim(rec.text));
        if (!rules.keep_langs.empty() && rec.lang && !rules.keep_langs.count(*rec.lang)) {
            reason = "lang";
        } else if (rules.first_turn_only && rec.turn_index != 0) {
            reason = "turn";
        } else {
            for (const std::string& prefix : rules.drop_prefixes) {
                if (trimmed.rfind(prefix, 0) == 0) {
                    reason = "prefix";
                    break;
                }
            }
        }
        if (reason.empty() && rules.exact_dedup && !seen_texts.insert(trimmed).second) {
            reason = "duplicate";
        }
        if (reason.empty()) {
            result.dataset.records.push_back(rec);
        } else {
            result.drops.emplace_back(rec.id, reason);
        }
    }

    result.dataset.provenance_log.push_back(
        "preprocess: kept " + std::to_string(result.dataset.records.size()) + "/" +
        std::to_string(dataset.records.size()));
    return result;
}

}  // namespace prefkit
