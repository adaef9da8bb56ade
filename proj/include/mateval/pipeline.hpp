#pragma once

#include "mateval/engine/engine.hpp"
#include "mateval/report/report.hpp"
#include "mateval/types.hpp"

namespace mateval {

struct PipelineResult {
    engine::DiscussionTranscript transcript;
    EvaluationReport report;
    std::vector<std::string> parse_warnings;
};

/// Discussion -> parsed findings -> scores -> both report formats. The one
/// automatic parse-repair re-prompt goes back to the summarizer. Unparseable
/// summaries produce a zero-deduction report flagged unparsed instead of a
/// failure, so batch runs complete.
PipelineResult evaluate_story(const engine::DiscussionEngine& eng,
                              const engine::EvaluationTask& task,
                              const std::vector<engine::AgentHandle>& evaluators,
                              const engine::SupportAgents& support);

}  // namespace mateval
