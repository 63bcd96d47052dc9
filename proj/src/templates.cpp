#include <array>
#include <stdexcept>

#include "prefkit/scoring.hpp"

namespace prefkit {

// Compiled-in copies of the assets/templates/ files; a unit test keeps the
// two in sync byte for byte.

namespace {

constexpr const char* kPromptQuality1to5 =
    "I have a collection of prompts that I need to evaluate for their effectiveness in fine-tuning a language model.\n"
    "A useful prompt should:\n"
    "- Clearly ask a question\n"
    "- Be concise and specific\n"
    "- Directly relate to the topic of interest or follow given instructions\n"
    "\n"
    "Please assess each prompt and assign a score from 1 to 5 based on its usefulness:\n"
    "- 1: Pretty useful\n"
    "- 2: Somewhat useful\n"
    "- 3: Neutral (neither useful nor harmful)\n"
    "- 4: Somewhat harmful\n"
    "- 5: Harmful\n"
    "Make sure to clearly indicate the score at the end of your evaluation using the format: Score: x\n"
    "Prompt: {prompt}\n";

constexpr const char* kResponseQuality0to10 =
    "Review the question and the candidate response below, then rate the response on a scale from 0 to 10, where 0 is unusable and 10 is an excellent answer.\n"
    "Consider whether the response is helpful, accurate, complete, and directly addresses the question.\n"
    "Reply with the rating at the end in the format: Rating: x\n"
    "\n"
    "Question: {prompt}\n"
    "Response: {response}\n";

const std::array<JudgeTemplate, 2> kTemplates{{
    // 1 = most useful, so lower is better on this scale.
    {"prompt_quality_1_5", kPromptQuality1to5, 1.0, 5.0, false},
    {"response_quality_0_10", kResponseQuality0to10, 0.0, 10.0, true},
}};

}  // namespace

const JudgeTemplate& get_judge_template(const std::string& id) {
    for (const JudgeTemplate& t : kTemplates) {
        if (t.id == id) return t;
    }
    throw std::invalid_argument("unknown judge template: " + id);
}

std::vector<std::string> judge_template_ids() {
    std::vector<std::string> ids;
    for (const JudgeTemplate& t : kTemplates) ids.push_back(t.id);
    return ids;
}

double normalize_judge_score(const JudgeTemplate& tmpl, double raw) {
    if (raw < tmpl.min_score || raw > tmpl.max_score) {
        throw std::invalid_argument("judge score " + std::to_string(raw) +
                                    " outside template range for " + tmpl.id);
    }
    const double unit = (raw - tmpl.min_score) / (tmpl.max_score - tmpl.min_score);
    return tmpl.higher_is_better ? unit : 1.0 - unit;
}

namespace {

void replace_all(std::string& text, const std::string& needle, const std::string& value) {
    std::size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        text.replace(pos, needle.size(), value);
        pos += value.size();
    }
}

}  // namespace

std::string render_template(const JudgeTemplate& tmpl, const std::string& prompt,
                            const std::string& response) {
    std::string out = tmpl.text;
    replace_all(out, "{prompt}", prompt);
    replace_all(out, "{response}", response);
    return out;
}

}  // namespace prefkit
