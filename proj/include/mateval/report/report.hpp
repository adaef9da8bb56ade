#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mateval/engine/engine.hpp"
#include "mateval/types.hpp"

namespace mateval::report {

struct ParseResult {
    std::vector<Finding> findings;
    std::vector<std::string> warnings;
    bool structured_block_found = false;
};

/// Extracts the first fenced JSON block from a raw summary and turns its
/// entries into validated findings. Entries may locate an error by
/// sentence_index, by excerpt, or both; excerpt-only entries are located by
/// exact match after whitespace normalization. Entries with an unknown
/// error_type or an unlocatable excerpt become warnings, not findings.
/// Duplicate mentions of the same (error_type, sentence_index) collapse to
/// one finding — the scoring rule counts errors, not mentions.
ParseResult parse_findings(const std::string& raw_summary, const StoryText& story);

/// parse_findings with one automatic repair attempt: when no structured
/// block is found, `repair` is invoked (re-prompting the summarizer) and
/// its reply is parsed instead. Still unparseable output yields zero
/// findings plus a fatal warning; callers flag the report unparsed.
ParseResult parse_findings_with_repair(
    const std::string& raw_summary, const StoryText& story,
    const std::function<std::string(const std::string&)>& repair);

/// Deduction scoring: per_type[t] = -(count of findings of type t) for all
/// five types, total = -(finding count).
ScoreCard score_findings(const std::vector<Finding>& findings);

/// One Q&A pair per rubric error type plus a final total-score pair. Every
/// answer embeds its score in a fixed `SCORE: <int>` token so the harness
/// extracts it by pattern; explanations ride along when enabled.
std::vector<std::pair<std::string, std::string>> render_qa_report(
    const std::vector<Finding>& findings, const ScoreCard& scorecard,
    const engine::EvaluationTask& task);

/// Deterministic prose rendering: header (story id, strategy, scores), one
/// section per error type with located findings, and an appendix listing
/// the per-round feedback verdicts.
std::string render_text_report(const std::vector<Finding>& findings,
                               const ScoreCard& scorecard,
                               const engine::DiscussionTranscript& transcript,
                               const engine::EvaluationTask& task);

/// Canonical report JSON: {task_id, strategy, findings[], scorecard{},
/// qa[], prose, unparsed}.
json report_to_json(const EvaluationReport& report, const Strategy& strategy);

}  // namespace mateval::report
