#include "mateval/report/report.hpp"

#include <algorithm>
#include <set>

#include "mateval/fenced_json.hpp"
#include "mateval/text.hpp"

namespace mateval::report {

namespace {

/// Locates an excerpt in the story under whitespace normalization.
/// Returns the index of the sentence containing the match start, or -1.
int locate_excerpt(const StoryText& story, const std::string& excerpt) {
    std::string needle = text::normalize_whitespace(excerpt);
    if (needle.empty()) return -1;
    auto spans = text::segment_sentences(story.body);
    // Prefer a sentence that contains the whole excerpt.
    for (std::size_t i = 0; i < spans.size(); ++i) {
        if (text::normalize_whitespace(spans[i].str(story.body)).find(needle) !=
            std::string::npos) {
            return static_cast<int>(i);
        }
    }
    // Excerpts spanning a sentence boundary: map the match position in the
    // normalized body back to a sentence by walking cumulative lengths.
    std::string norm_body = text::normalize_whitespace(story.body);
    auto pos = norm_body.find(needle);
    if (pos == std::string::npos) return -1;
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < spans.size(); ++i) {
        std::string norm_sentence =
            text::normalize_whitespace(spans[i].str(story.body));
        auto here = norm_body.find(norm_sentence, cursor);
        if (here == std::string::npos) break;
        if (pos < here + norm_sentence.size()) return static_cast<int>(i);
        cursor = here + norm_sentence.size();
    }
    return spans.empty() ? -1 : static_cast<int>(spans.size()) - 1;
}

ParseResult parse_block(const json& block, const StoryText& story) {
    ParseResult result;
    result.structured_block_found = true;

    const json* entries = &block;
    if (block.is_object() && block.contains("findings") &&
        block.at("findings").is_array()) {
        entries = &block.at("findings");
    }
    if (!entries->is_array()) {
        result.structured_block_found = false;
        result.warnings.push_back("structured block is not a findings array");
        return result;
    }

    auto spans = text::segment_sentences(story.body);
    const int sentence_count = static_cast<int>(spans.size());
    std::set<std::pair<ErrorType, int>> seen;  // dedup key

    std::size_t entry_no = 0;
    for (const auto& entry : *entries) {
        ++entry_no;
        auto warn = [&](const std::string& msg) {
            result.warnings.push_back("entry " + std::to_string(entry_no) + ": " +
                                      msg);
        };
        if (!entry.is_object()) {
            warn("not an object");
            continue;
        }
        if (!entry.contains("error_type") || !entry.at("error_type").is_string()) {
            warn("missing error_type");
            continue;
        }
        std::string type_tok = entry.at("error_type").get<std::string>();
        auto type = error_type_from_string(type_tok);
        if (!type) {
            warn("unknown error type \"" + type_tok + "\"");
            continue;
        }

        std::string excerpt;
        if (entry.contains("excerpt") && entry.at("excerpt").is_string()) {
            excerpt = entry.at("excerpt").get<std::string>();
        }
        int index = -1;
        if (entry.contains("sentence_index") &&
            entry.at("sentence_index").is_number_integer()) {
            index = entry.at("sentence_index").get<int>();
        }

        if (!excerpt.empty()) {
            int located = locate_excerpt(story, excerpt);
            if (located < 0) {
                warn("excerpt not found in story: \"" + excerpt + "\"");
                continue;
            }
            // A stated index wins when it is in range and the excerpt really
            // occurs; otherwise the located index stands in.
            if (index < 0 || index >= sentence_count) index = located;
        } else if (index >= 0 && index < sentence_count) {
            // Index-only entries adopt the full sentence as their excerpt so
            // the report never carries an unverifiable location.
            excerpt = spans[static_cast<std::size_t>(index)].str(story.body);
        } else {
            warn("no usable location (excerpt missing, index out of range)");
            continue;
        }
        if (index < 0 || index >= sentence_count) {
            warn("sentence_index " + std::to_string(index) + " out of range");
            continue;
        }
        if (!seen.insert({*type, index}).second) continue;  // duplicate mention

        Finding f;
        f.error_type = *type;
        f.sentence_index = index;
        f.excerpt = std::move(excerpt);
        if (entry.contains("explanation") && entry.at("explanation").is_string()) {
            f.explanation = entry.at("explanation").get<std::string>();
        }
        result.findings.push_back(std::move(f));
    }
    return result;
}

}  // namespace

ParseResult parse_findings(const std::string& raw_summary,
                           const StoryText& story) {
    auto block = extract_fenced_json(raw_summary);
    if (!block) {
        ParseResult result;
        result.warnings.push_back("no structured JSON block in summary");
        return result;
    }
    return parse_block(*block, story);
}

ParseResult parse_findings_with_repair(
    const std::string& raw_summary, const StoryText& story,
    const std::function<std::string(const std::string&)>& repair) {
    ParseResult first = parse_findings(raw_summary, story);
    if (first.structured_block_found || !repair) return first;

    std::string repaired = repair(raw_summary);
    ParseResult second = parse_findings(repaired, story);
    if (!second.structured_block_found) {
        second.warnings.push_back(
            "fatal: no structured block after one repair attempt; report "
            "carries zero deductions and is flagged unparsed");
    }
    return second;
}

ScoreCard score_findings(const std::vector<Finding>& findings) {
    ScoreCard card = ScoreCard::zeros();
    for (const auto& f : findings) card.per_type[f.error_type] -= 1;
    card.total = -static_cast<int>(findings.size());
    return card;
}

std::vector<std::pair<std::string, std::string>> render_qa_report(
    const std::vector<Finding>& findings, const ScoreCard& scorecard,
    const engine::EvaluationTask& task) {
    const bool explanations = task.strategy.qa_explanations_enabled;
    std::vector<std::pair<std::string, std::string>> qa;

    for (ErrorType t : task.rubric) {
        std::string question = "How many " + std::string(to_string(t)) +
                               " errors does the story contain, and where?";
        auto it = scorecard.per_type.find(t);
        int score = it == scorecard.per_type.end() ? 0 : it->second;
        std::string answer = "SCORE: " + std::to_string(score);
        if (explanations) {
            for (const auto& f : findings) {
                if (f.error_type != t) continue;
                answer += "\n- sentence " + std::to_string(f.sentence_index) +
                          ": \"" + f.excerpt + "\"";
                if (!f.explanation.empty()) answer += " - " + f.explanation;
            }
            if (score == 0) answer += "\nNo " + std::string(to_string(t)) +
                                      " errors found.";
        }
        qa.emplace_back(std::move(question), std::move(answer));
    }
    std::string total_q = "What is the total deduction score for the story?";
    std::string total_a = "SCORE: " + std::to_string(scorecard.total);
    if (explanations) {
        total_a += "\nEach confirmed error deducts one point from zero.";
    }
    qa.emplace_back(std::move(total_q), std::move(total_a));
    return qa;
}

std::string render_text_report(const std::vector<Finding>& findings,
                               const ScoreCard& scorecard,
                               const engine::DiscussionTranscript& transcript,
                               const engine::EvaluationTask& task) {
    std::string out;
    out += "Evaluation report for story '" + task.story.id + "'\n";
    out += "Strategy: " + task.strategy.label() + " (" +
           std::string(to_string(task.strategy.variant)) + ")\n";
    out += "Total score: " + std::to_string(scorecard.total) + "\n";
    out += "Per-type scores:";
    for (ErrorType t : kAllErrorTypes) {
        auto it = scorecard.per_type.find(t);
        int v = it == scorecard.per_type.end() ? 0 : it->second;
        out += " " + std::string(to_string(t)) + "=" + std::to_string(v);
    }
    out += "\n\n";

    if (findings.empty()) {
        out += "No issues detected.\n";
    } else {
        for (ErrorType t : task.rubric) {
            std::vector<const Finding*> of_type;
            for (const auto& f : findings) {
                if (f.error_type == t) of_type.push_back(&f);
            }
            if (of_type.empty()) continue;
            out += "## " + std::string(to_string(t)) + " - " +
                   std::string(describe(t)) + "\n";
            for (const Finding* f : of_type) {
                out += "- sentence " + std::to_string(f->sentence_index) +
                       ": \"" + f->excerpt + "\"\n";
                if (!f->explanation.empty()) {
                    out += "  " + f->explanation + "\n";
                }
            }
            out += "\n";
        }
    }

    out += "## Discussion appendix\n";
    if (transcript.history.feedback().empty()) {
        out += "No feedback rounds recorded.\n";
    } else {
        for (const auto& n : transcript.history.feedback()) {
            out += "- round " + std::to_string(n.round) + ": " +
                   std::string(to_string(n.verdict));
            if (n.parse_warning) out += " (verdict line missing, defaulted)";
            out += "\n";
        }
    }
    return out;
}

json report_to_json(const EvaluationReport& report, const Strategy& strategy) {
    json j = report;
    j["strategy"] = strategy;
    return j;
}

}  // namespace mateval::report
