#include "mateval/pipeline.hpp"

namespace mateval {

PipelineResult evaluate_story(const engine::DiscussionEngine& eng,
                              const engine::EvaluationTask& task,
                              const std::vector<engine::AgentHandle>& evaluators,
                              const engine::SupportAgents& support) {
    PipelineResult out;
    out.transcript = eng.run_discussion(task, evaluators, support);

    auto repair = [&](const std::string& bad_summary) {
        gateway::Conversation conv{
            gateway::Message::system(
                "You fix malformed report output. Reply with only the "
                "corrected content."),
            gateway::Message::user(
                "The report below must contain a fenced JSON array of "
                "findings, each {\"error_type\", \"sentence_index\", "
                "\"excerpt\", \"explanation\"}. Resend it with a valid "
                "block.\n\n" +
                bad_summary)};
        return gateway::complete(support.summarizer, conv);
    };
    report::ParseResult parsed = report::parse_findings_with_repair(
        out.transcript.raw_summary, task.story, repair);

    EvaluationReport rep;
    rep.task_id = task.task_id();
    rep.findings = std::move(parsed.findings);
    rep.scorecard = report::score_findings(rep.findings);
    rep.unparsed = !parsed.structured_block_found;
    rep.qa_items = report::render_qa_report(rep.findings, rep.scorecard, task);
    rep.prose =
        report::render_text_report(rep.findings, rep.scorecard, out.transcript,
                                   task);
    out.report = std::move(rep);
    out.parse_warnings = std::move(parsed.warnings);
    return out;
}

}  // namespace mateval
