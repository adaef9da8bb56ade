#include "mateval/gateway/prompt.hpp"

#include <cctype>

namespace mateval::gateway {

namespace {

bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

/// Scans `s` once, substituting {identifier} groups. Substituted values are
/// never rescanned, so bindings may contain braces.
std::string substitute(const std::string& s, const Bindings& bindings) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] == '{' && i + 1 < s.size() && is_ident_start(s[i + 1])) {
            std::size_t j = i + 1;
            while (j < s.size() && is_ident_char(s[j])) ++j;
            if (j < s.size() && s[j] == '}') {
                std::string name = s.substr(i + 1, j - i - 1);
                auto it = bindings.find(name);
                if (it == bindings.end()) throw MissingBinding(name);
                out += it->second;
                i = j + 1;
                continue;
            }
        }
        out.push_back(s[i++]);
    }
    return out;
}

}  // namespace

std::vector<std::string> extract_placeholders(const std::string& s) {
    std::vector<std::string> names;
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] == '{' && i + 1 < s.size() && is_ident_start(s[i + 1])) {
            std::size_t j = i + 1;
            while (j < s.size() && is_ident_char(s[j])) ++j;
            if (j < s.size() && s[j] == '}') {
                std::string name = s.substr(i + 1, j - i - 1);
                bool seen = false;
                for (const auto& n : names) seen = seen || n == name;
                if (!seen) names.push_back(name);
                i = j + 1;
                continue;
            }
        }
        ++i;
    }
    return names;
}

Conversation render_prompt(const PromptTemplate& tmpl, const Bindings& bindings) {
    return Conversation{Message::system(substitute(tmpl.system, bindings)),
                        Message::user(substitute(tmpl.body, bindings))};
}

std::string render_error_types(const std::vector<ErrorType>& rubric) {
    std::string out;
    for (ErrorType t : rubric) {
        out += "- ";
        out += to_string(t);
        out += ": ";
        out += describe(t);
        out += "\n";
    }
    if (!out.empty()) out.pop_back();
    return out;
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

namespace {

const char kFindingSchema[] =
    "Answer with a fenced JSON block (```json ... ```) containing an array of "
    "findings, each {\"error_type\": <one of the category codes>, "
    "\"sentence_index\": <0-based sentence number>, \"excerpt\": <verbatim "
    "quote from the story>, \"explanation\": <why this is an error>}. Use an "
    "empty array [] when you find nothing. You may add free-form remarks "
    "outside the block.";

const std::string kExplanationRequest =
    "For every finding include an in-depth explanation of why it is an error "
    "and how it damages the story, so a reader can verify the judgment "
    "without re-reading the whole discussion.";

}  // namespace

PromptCatalog::PromptCatalog() {
    auto add = [this](const char* name, std::string system, std::string body) {
        templates_[name] = PromptTemplate{name, std::move(system), std::move(body)};
    };

    add("decompose",
        "You plan the work of a review panel that checks machine-written "
        "stories for quality problems.",
        "Break the review of the story below into focused sub-questions, at "
        "most one per error category. Error categories:\n{error_types}\n\n"
        "Story:\n{story}\n\n"
        "Answer with a fenced JSON block (```json ... ```) containing an "
        "array, each element {\"question\": <text the panel will discuss>, "
        "\"target\": <category code or null>}.");

    add("preliminary",
        "You are one of several independent reviewers of a machine-written "
        "story. Judge only from the text; quote sentences verbatim when you "
        "point at a problem.",
        "Story:\n{story}\n\n{history}Current question: "
        "{sub_question}\n\nGive your preliminary judgment on this question. " +
            std::string(kFindingSchema));

    add("self_reflect",
        "You are one of several independent reviewers of a machine-written "
        "story. Revise your own judgment in light of what the other "
        "reviewers said; keep what survives scrutiny, drop what does not.",
        "Story:\n{story}\n\nCurrent question: {sub_question}\n\nYour "
        "preliminary statement:\n{own_statement}\n\n{peer_statements}"
        "{history}Restate your judgment after weighing the peer statements. " +
            std::string(kFindingSchema));

    add("feedback",
        "You moderate a panel of reviewers discussing story quality. You do "
        "not judge the story yourself; you judge the discussion.",
        "Statements from the round that just finished:\n{history}\n\n"
        "{feedback}Assess the round: are the reviewers repeating themselves, "
        "talking past each other, or converging? Give short concrete "
        "guidance for the next round. End your reply with a final line that "
        "is exactly one of:\nVERDICT: CONSENSUS\nVERDICT: DISAGREEMENT\n"
        "VERDICT: INEFFICIENT");

    add("summarize_qa",
        "You write the final error report for a panel review of a "
        "machine-written story. Report only errors the discussion supports; "
        "merge duplicate mentions of the same error.",
        "Story:\n{story}\n\nFull discussion record:\n{history}\n\n"
        "Compile every confirmed error. " + std::string(kFindingSchema) +
            "\n" + kExplanationRequest);

    add("summarize_prose",
        "You write a plain-language quality report for the author of a "
        "machine-written story, based on a finished panel discussion.",
        "Story:\n{story}\n\nFull discussion record:\n{history}\n\n"
        "Write a readable report: what is wrong, where, and why it matters. "
        "Also include the findings as a fenced JSON block. " +
            std::string(kFindingSchema));

    add("single_agent_eval",
        "You review machine-written stories for quality problems. Judge "
        "only from the text; quote sentences verbatim when you point at a "
        "problem.",
        "Story:\n{story}\n\nCheck the story against every category "
        "below:\n{error_types}\n\nReport each error you find. " +
            std::string(kFindingSchema));

    add("one_by_one_turn",
        "You are one of several reviewers taking turns judging a "
        "machine-written story. Read what was said before your turn and add "
        "to it; do not repeat it.",
        "Story:\n{story}\n\nError categories:\n{error_types}\n\n{history}"
        "Take your turn: state new errors you see or respond to the "
        "statements above. " + std::string(kFindingSchema));

    add("consensus_probe",
        "You observe a panel of reviewers discussing story quality.",
        "Discussion so far:\n{history}\n\nQuestion under discussion: "
        "{sub_question}\n\nState whether the panel has converged on an "
        "answer, and if not, what still divides it. Answer with a fenced "
        "JSON block {\"converged\": true|false, \"open_points\": [<text>]}.");
}

const PromptTemplate& PromptCatalog::get(const std::string& name) const {
    auto it = templates_.find(name);
    if (it == templates_.end()) throw InvalidState("unknown template: " + name);
    return it->second;
}

bool PromptCatalog::contains(const std::string& name) const {
    return templates_.count(name) != 0;
}

std::vector<std::string> PromptCatalog::names() const {
    std::vector<std::string> out;
    for (const auto& [name, t] : templates_) out.push_back(name);
    return out;
}

PromptTemplate PromptCatalog::summarize_qa(bool with_explanations) const {
    PromptTemplate t = get("summarize_qa");
    if (!with_explanations) {
        auto pos = t.body.find(kExplanationRequest);
        if (pos != std::string::npos) {
            t.body.erase(pos, kExplanationRequest.size());
            while (!t.body.empty() && t.body.back() == '\n') t.body.pop_back();
        }
    }
    return t;
}

const std::string& PromptCatalog::explanation_request_section() {
    return kExplanationRequest;
}

}  // namespace mateval::gateway
