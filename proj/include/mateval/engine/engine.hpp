#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mateval/gateway/backend.hpp"
#include "mateval/gateway/prompt.hpp"
#include "mateval/types.hpp"

namespace mateval::engine {

using gateway::AgentHandle;
using gateway::Conversation;
using gateway::PromptCatalog;

/// One story to evaluate under one strategy. The rubric lists the error
/// types the panel must check (non-empty, no duplicates).
struct EvaluationTask {
    StoryText story;
    std::vector<ErrorType> rubric;
    Strategy strategy;

    static EvaluationTask make(StoryText story, std::vector<ErrorType> rubric,
                               Strategy strategy);

    /// Stable identifier for checkpoints, reports, and history.
    std::string task_id() const { return story.id + "." + strategy.label(); }
};

/// What one round produced. Statements are also appended to the caller's
/// history / side log by run_round.
struct RoundOutcome {
    std::vector<Statement> accepted;       // entered H, one per agent
    std::vector<Statement> preliminaries;  // side log (reflection variants)
    std::optional<FeedbackNote> feedback;
};

/// Full record of one discussion. Statement total counts both the accepted
/// statements in H and the preliminary side log.
struct DiscussionTranscript {
    DiscussionHistory history;
    std::vector<Statement> side_log;
    std::vector<SubQuestion> sub_questions;
    std::string raw_summary;
    Strategy strategy;                        // config snapshot
    gateway::GenerationParams params;         // config snapshot
    std::vector<std::string> prompt_sequence; // template name per backend call
    int completed_rounds = 0;

    std::size_t total_statements() const {
        return history.statements().size() + side_log.size();
    }
};

void to_json(json& j, const DiscussionTranscript& t);
void from_json(const json& j, DiscussionTranscript& t);

/// The non-evaluator roles. They default to the same backend as the
/// evaluators but are distinct handles so they can be pointed at different
/// models.
struct SupportAgents {
    AgentHandle decomposer;
    AgentHandle feedback;
    AgentHandle summarizer;
};

struct EngineOptions {
    /// Rendered-history budget; above it, older rounds are condensed into a
    /// digest while the most recent round stays verbatim.
    std::size_t history_token_budget = 100000;
    /// Where abort checkpoints land.
    std::filesystem::path checkpoint_dir = ".";
};

/// Runs the discussion loop: question decomposition, per-round
/// preliminary/reflection turns, per-round feedback, final summary, for
/// every strategy variant. One discussion is strictly sequential; run
/// multiple discussions concurrently with separate backends.
class DiscussionEngine {
public:
    explicit DiscussionEngine(EngineOptions options = {});

    const PromptCatalog& catalog() const { return catalog_; }
    const EngineOptions& options() const { return options_; }

    /// CoT decomposition: asks the decomposer to split the task, parses the
    /// fenced JSON reply (one repair re-prompt on failure), drops targets
    /// outside the rubric, and appends a synthetic sub-question for every
    /// rubric type the agent omitted. Indices are contiguous from 0.
    std::vector<SubQuestion> decompose_question(
        const EvaluationTask& task, const AgentHandle& decomposer,
        std::vector<std::string>* prompt_log = nullptr) const;

    /// Preliminary statement for one agent. Does not mutate history; the
    /// caller appends after reflection.
    Statement formulate_idea(const AgentHandle& agent, const SubQuestion& sub_q,
                             int round, const DiscussionHistory& history,
                             const EvaluationTask& task,
                             std::vector<std::string>* prompt_log = nullptr) const;

    /// Reflection turn: the agent revises its preliminary statement given
    /// the peers' same-round preliminaries.
    Statement self_reflect(const AgentHandle& agent, const Statement& preliminary,
                           const SubQuestion& sub_q,
                           const std::vector<Statement>& peer_preliminaries,
                           const DiscussionHistory& history,
                           const EvaluationTask& task,
                           std::vector<std::string>* prompt_log = nullptr) const;

    /// One full round over all agents, appending exactly one accepted
    /// statement per agent to history (the reflected one when reflection is
    /// on) and a feedback note when feedback is enabled.
    RoundOutcome run_round(const SubQuestion& sub_q, int round,
                           const std::vector<AgentHandle>& agents,
                           DiscussionHistory& history,
                           std::vector<Statement>& side_log,
                           const EvaluationTask& task,
                           const AgentHandle& feedback_agent,
                           std::vector<std::string>* prompt_log = nullptr) const;

    /// Moderator verdict on a completed round. A missing VERDICT line never
    /// kills a run: the note comes back as inefficient with parse_warning.
    FeedbackNote give_feedback(const AgentHandle& feedback_agent,
                               const DiscussionHistory& history, int round_index,
                               std::vector<std::string>* prompt_log = nullptr) const;

    /// Final summary call over the whole (possibly condensed) history.
    /// Throws InvalidState on an empty history.
    std::string summarize(const AgentHandle& summarizer,
                          const DiscussionHistory& history,
                          const EvaluationTask& task,
                          std::vector<std::string>* prompt_log = nullptr) const;

    /// Executes the task's strategy end to end. On a backend failure the
    /// partial state is checkpointed and DiscussionAborted is thrown.
    DiscussionTranscript run_discussion(const EvaluationTask& task,
                                        const std::vector<AgentHandle>& evaluators,
                                        const SupportAgents& support) const;

    /// Continues an aborted discussion from its checkpoint file: finishes
    /// the interrupted round (skipping agents that already spoke), the
    /// remaining rounds, and the summary.
    DiscussionTranscript resume_discussion(const std::filesystem::path& checkpoint,
                                           const EvaluationTask& task,
                                           const std::vector<AgentHandle>& evaluators,
                                           const SupportAgents& support) const;

    /// Deterministic rendering of the history block used in evaluator
    /// prompts: empty string for an empty history, otherwise a labelled
    /// section listing accepted statements in utterance order. Above the
    /// token budget, rounds before the most recent one are condensed.
    std::string render_history_section(const DiscussionHistory& history) const;

    /// Raw statement lines (optionally with feedback verdict lines), no
    /// section header. Used for the feedback and summary prompts.
    std::string render_statement_block(const std::vector<Statement>& statements,
                                       const std::vector<FeedbackNote>& feedback)
        const;

    std::filesystem::path checkpoint_path(const EvaluationTask& task) const;

private:
    struct RunState;

    Conversation build_conversation(const gateway::PromptTemplate& tmpl,
                                    const gateway::Bindings& bindings,
                                    const DiscussionHistory& history,
                                    int round) const;
    DiscussionTranscript run_from(const EvaluationTask& task,
                                  const std::vector<AgentHandle>& evaluators,
                                  const SupportAgents& support,
                                  RunState state) const;
    void write_checkpoint(const EvaluationTask& task, const RunState& state) const;

    PromptCatalog catalog_;
    EngineOptions options_;
};

}  // namespace mateval::engine
