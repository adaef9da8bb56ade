#include "mateval/engine/engine.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "mateval/fenced_json.hpp"
#include "mateval/text.hpp"

namespace mateval::engine {

using gateway::Bindings;
using gateway::Message;
using gateway::PromptTemplate;
using gateway::render_error_types;
using gateway::render_prompt;

namespace {

constexpr std::size_t kCondensedChars = 100;

std::string statement_line(const Statement& s) {
    return "[round " + std::to_string(s.round) + " | " + s.agent_id + " | Q" +
           std::to_string(s.sub_question) + "] " + s.content;
}

std::string condensed_line(const Statement& s) {
    std::string content = s.content;
    if (content.size() > kCondensedChars) {
        content.resize(kCondensedChars);
        content += "...";
    }
    return "[round " + std::to_string(s.round) + " | " + s.agent_id + " | Q" +
           std::to_string(s.sub_question) + "] (condensed) " + content;
}

std::string feedback_line(const FeedbackNote& n) {
    return "[round " + std::to_string(n.round) + " | moderator] " +
           std::string(to_string(n.verdict)) +
           (n.guidance.empty() ? "" : " - " + n.guidance);
}

SubQuestion whole_rubric_question() {
    return SubQuestion{0,
                       "Evaluate the story against every error category in "
                       "the rubric and point at the exact sentences involved.",
                       std::nullopt};
}

void log_prompt(std::vector<std::string>* log, const std::string& name) {
    if (log != nullptr) log->push_back(name);
}

/// Last non-empty guidance issued for the round before `round`, if any.
std::optional<std::string> guidance_for_round(const DiscussionHistory& history,
                                              int round) {
    if (round <= 0) return std::nullopt;
    for (auto it = history.feedback().rbegin(); it != history.feedback().rend();
         ++it) {
        if (it->round == round - 1 && !it->guidance.empty()) return it->guidance;
    }
    return std::nullopt;
}

std::optional<std::vector<SubQuestion>> parse_decomposition(
    const std::string& reply, const std::vector<ErrorType>& rubric) {
    auto block = extract_fenced_json(reply);
    if (!block || !block->is_array()) return std::nullopt;

    std::set<ErrorType> rubric_set(rubric.begin(), rubric.end());
    std::vector<SubQuestion> out;
    for (const auto& entry : *block) {
        SubQuestion q;
        q.index = static_cast<int>(out.size());
        if (entry.is_string()) {
            q.text = entry.get<std::string>();
        } else if (entry.is_object() && entry.contains("question") &&
                   entry.at("question").is_string()) {
            q.text = entry.at("question").get<std::string>();
            if (entry.contains("target") && entry.at("target").is_string()) {
                std::string tok = entry.at("target").get<std::string>();
                for (auto& c : tok) c = c >= 'a' && c <= 'z' ? char(c - 32) : c;
                auto t = error_type_from_string(tok);
                // Targets outside the rubric are dropped, not rejected.
                if (t && rubric_set.count(*t)) q.target = t;
            }
        } else {
            continue;  // tolerate junk entries
        }
        if (!q.text.empty()) out.push_back(std::move(q));
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Task / transcript
// ---------------------------------------------------------------------------

EvaluationTask EvaluationTask::make(StoryText story, std::vector<ErrorType> rubric,
                                    Strategy strategy) {
    if (rubric.empty()) throw InvalidState("rubric must be non-empty");
    std::set<ErrorType> seen;
    for (ErrorType t : rubric) {
        if (!seen.insert(t).second) {
            throw InvalidState("duplicate rubric entry: " +
                               std::string(to_string(t)));
        }
    }
    if (strategy.variant == StrategyVariant::SA && strategy.num_agents != 1) {
        throw InvalidState("SA strategy forces num_agents=1");
    }
    auto violations = story.validate();
    if (!violations.empty()) throw InvalidState(violations.front());
    EvaluationTask t;
    t.story = std::move(story);
    t.rubric = std::move(rubric);
    t.strategy = strategy;
    return t;
}

void to_json(json& j, const DiscussionTranscript& t) {
    j = json{{"task_id", t.history.task_id()},
             {"history", t.history},
             {"side_log", t.side_log},
             {"sub_questions", t.sub_questions},
             {"raw_summary", t.raw_summary},
             {"config_snapshot", {{"strategy", t.strategy}, {"params", t.params}}},
             {"prompt_sequence", t.prompt_sequence},
             {"completed_rounds", t.completed_rounds}};
}

void from_json(const json& j, DiscussionTranscript& t) {
    j.at("history").get_to(t.history);
    t.side_log = j.at("side_log").get<std::vector<Statement>>();
    t.sub_questions = j.at("sub_questions").get<std::vector<SubQuestion>>();
    t.raw_summary = j.value("raw_summary", "");
    j.at("config_snapshot").at("strategy").get_to(t.strategy);
    j.at("config_snapshot").at("params").get_to(t.params);
    t.prompt_sequence = j.value("prompt_sequence", std::vector<std::string>{});
    t.completed_rounds = j.value("completed_rounds", 0);
}

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

DiscussionEngine::DiscussionEngine(EngineOptions options)
    : options_(std::move(options)) {}

std::string DiscussionEngine::render_statement_block(
    const std::vector<Statement>& statements,
    const std::vector<FeedbackNote>& feedback) const {
    std::string verbatim;
    for (const auto& s : statements) verbatim += statement_line(s) + "\n";

    if (text::estimate_tokens(verbatim) > options_.history_token_budget &&
        !statements.empty()) {
        // Condense everything before the most recent round; that round
        // always stays verbatim.
        int last_round = 0;
        for (const auto& s : statements) last_round = std::max(last_round, s.round);
        verbatim.clear();
        for (const auto& s : statements) {
            verbatim +=
                (s.round == last_round ? statement_line(s) : condensed_line(s)) +
                "\n";
        }
    }
    for (const auto& n : feedback) verbatim += feedback_line(n) + "\n";
    if (!verbatim.empty()) verbatim.pop_back();
    return verbatim;
}

std::string DiscussionEngine::render_history_section(
    const DiscussionHistory& history) const {
    if (history.statements().empty()) return "";
    return "Discussion so far:\n" +
           render_statement_block(history.statements(), {}) + "\n\n";
}

Conversation DiscussionEngine::build_conversation(const PromptTemplate& tmpl,
                                                  const Bindings& bindings,
                                                  const DiscussionHistory& history,
                                                  int round) const {
    Conversation conv = render_prompt(tmpl, bindings);
    if (auto guidance = guidance_for_round(history, round)) {
        conv.insert(conv.begin() + 1,
                    Message::system("Moderator feedback on the previous round:\n" +
                                    *guidance));
    }
    return conv;
}

std::vector<SubQuestion> DiscussionEngine::decompose_question(
    const EvaluationTask& task, const AgentHandle& decomposer,
    std::vector<std::string>* prompt_log) const {
    if (!task.strategy.uses_decomposition()) {
        throw InvalidState("decomposition applies only to CoT variants");
    }
    Bindings bindings{{"story", task.story.body},
                      {"error_types", render_error_types(task.rubric)}};
    Conversation conv = render_prompt(catalog_.get("decompose"), bindings);
    std::string reply = gateway::complete(decomposer, conv);
    log_prompt(prompt_log, "decompose");

    auto parsed = parse_decomposition(reply, task.rubric);
    if (!parsed) {
        conv.push_back(Message::assistant(reply));
        conv.push_back(Message::user(
            "Your previous reply had no parseable JSON. Resend the "
            "decomposition as a fenced JSON array of {\"question\", "
            "\"target\"} objects and nothing else."));
        reply = gateway::complete(decomposer, conv);
        log_prompt(prompt_log, "decompose");
        parsed = parse_decomposition(reply, task.rubric);
        if (!parsed) {
            throw UnparseableDecomposition("no JSON array after one repair");
        }
    }

    std::vector<SubQuestion> questions = std::move(*parsed);
    std::set<ErrorType> covered;
    for (const auto& q : questions) {
        if (q.target) covered.insert(*q.target);
    }
    // Rubric coverage is mandatory: synthesize a question per omitted type.
    for (ErrorType t : task.rubric) {
        if (covered.count(t)) continue;
        SubQuestion q;
        q.index = static_cast<int>(questions.size());
        q.text = "Check the story for " + std::string(to_string(t)) +
                 " issues - " + std::string(describe(t)) +
                 ". Quote the exact sentences involved.";
        q.target = t;
        questions.push_back(std::move(q));
    }
    return questions;
}

Statement DiscussionEngine::formulate_idea(
    const AgentHandle& agent, const SubQuestion& sub_q, int round,
    const DiscussionHistory& history, const EvaluationTask& task,
    std::vector<std::string>* prompt_log) const {
    const bool one_by_one = task.strategy.variant == StrategyVariant::ONE_BY_ONE;
    const PromptTemplate& tmpl =
        catalog_.get(one_by_one ? "one_by_one_turn" : "preliminary");
    Bindings bindings{{"story", task.story.body},
                      {"history", render_history_section(history)}};
    if (one_by_one) {
        bindings["error_types"] = render_error_types(task.rubric);
    } else {
        bindings["sub_question"] = sub_q.text;
    }
    Conversation conv = build_conversation(tmpl, bindings, history, round);
    std::string reply = gateway::complete(agent, conv);
    log_prompt(prompt_log, tmpl.name);
    return Statement{agent.agent_id, round, sub_q.index,
                     StatementKind::preliminary, reply};
}

Statement DiscussionEngine::self_reflect(
    const AgentHandle& agent, const Statement& preliminary,
    const SubQuestion& sub_q, const std::vector<Statement>& peer_preliminaries,
    const DiscussionHistory& history, const EvaluationTask& task,
    std::vector<std::string>* prompt_log) const {
    if (preliminary.kind != StatementKind::preliminary) {
        throw InvalidState("self_reflect expects a preliminary statement");
    }
    std::string peers;
    if (peer_preliminaries.empty()) {
        peers = "Peer statements: none (no peer statements).\n\n";
    } else {
        peers = "Peer statements:\n";
        for (const auto& p : peer_preliminaries) {
            peers += "[" + p.agent_id + "] " + p.content + "\n";
        }
        peers += "\n";
    }
    Bindings bindings{{"story", task.story.body},
                      {"sub_question", sub_q.text},
                      {"own_statement", preliminary.content},
                      {"peer_statements", peers},
                      {"history", render_history_section(history)}};
    Conversation conv =
        build_conversation(catalog_.get("self_reflect"), bindings, history,
                           preliminary.round);
    std::string reply = gateway::complete(agent, conv);
    log_prompt(prompt_log, "self_reflect");
    return Statement{agent.agent_id, preliminary.round, sub_q.index,
                     StatementKind::reflected, reply};
}

RoundOutcome DiscussionEngine::run_round(
    const SubQuestion& sub_q, int round, const std::vector<AgentHandle>& agents,
    DiscussionHistory& history, std::vector<Statement>& side_log,
    const EvaluationTask& task, const AgentHandle& feedback_agent,
    std::vector<std::string>* prompt_log) const {
    if (agents.empty()) throw InvalidState("run_round requires agents");
    RoundOutcome outcome;
    const bool reflect = task.strategy.uses_reflection();

    for (const auto& agent : agents) {
        // Resume support: an agent with an accepted statement for this round
        // already finished its turn in an earlier (aborted) run.
        bool done = std::any_of(
            history.statements().begin(), history.statements().end(),
            [&](const Statement& s) {
                return s.round == round && s.agent_id == agent.agent_id;
            });
        if (done) continue;
        // Drop stale half-turn leftovers before redoing the turn.
        side_log.erase(std::remove_if(side_log.begin(), side_log.end(),
                                      [&](const Statement& s) {
                                          return s.round == round &&
                                                 s.agent_id == agent.agent_id;
                                      }),
                       side_log.end());

        Statement prelim =
            formulate_idea(agent, sub_q, round, history, task, prompt_log);
        if (reflect) {
            std::vector<Statement> peers;
            for (const auto& s : side_log) {
                if (s.round == round && s.agent_id != agent.agent_id) {
                    peers.push_back(s);
                }
            }
            side_log.push_back(prelim);
            outcome.preliminaries.push_back(prelim);
            Statement reflected = self_reflect(agent, prelim, sub_q, peers,
                                               history, task, prompt_log);
            history.append_statement(reflected);
            outcome.accepted.push_back(std::move(reflected));
        } else {
            history.append_statement(prelim);
            outcome.accepted.push_back(std::move(prelim));
        }
    }

    if (task.strategy.feedback_enabled) {
        bool already = std::any_of(
            history.feedback().begin(), history.feedback().end(),
            [&](const FeedbackNote& n) { return n.round == round; });
        if (!already) {
            FeedbackNote note =
                give_feedback(feedback_agent, history, round, prompt_log);
            history.append_feedback(note);
            outcome.feedback = std::move(note);
        }
    }
    return outcome;
}

FeedbackNote DiscussionEngine::give_feedback(
    const AgentHandle& feedback_agent, const DiscussionHistory& history,
    int round_index, std::vector<std::string>* prompt_log) const {
    std::vector<Statement> round_statements;
    for (const auto& s : history.statements()) {
        if (s.round == round_index) round_statements.push_back(s);
    }
    if (round_statements.empty()) {
        throw InvalidState("feedback requires a completed round");
    }
    std::string prior;
    std::vector<FeedbackNote> earlier;
    for (const auto& n : history.feedback()) {
        if (n.round < round_index) earlier.push_back(n);
    }
    if (!earlier.empty()) {
        prior = "Earlier feedback:\n";
        for (const auto& n : earlier) prior += feedback_line(n) + "\n";
        prior += "\n";
    }
    Bindings bindings{{"history", render_statement_block(round_statements, {})},
                      {"feedback", prior}};
    Conversation conv = render_prompt(catalog_.get("feedback"), bindings);
    std::string reply = gateway::complete(feedback_agent, conv);
    log_prompt(prompt_log, "feedback");

    // Final line `VERDICT: CONSENSUS|DISAGREEMENT|INEFFICIENT`; everything
    // before it is the guidance. A missing verdict must not kill the run.
    FeedbackNote note;
    note.round = round_index;
    auto last_nl = reply.find_last_not_of(" \t\r\n");
    std::string trimmed = last_nl == std::string::npos
                              ? std::string()
                              : reply.substr(0, last_nl + 1);
    auto line_start = trimmed.find_last_of('\n');
    std::string last_line = line_start == std::string::npos
                                ? trimmed
                                : trimmed.substr(line_start + 1);
    auto first = last_line.find_first_not_of(" \t");
    if (first != std::string::npos) last_line = last_line.substr(first);

    const std::string kPrefix = "VERDICT:";
    if (last_line.rfind(kPrefix, 0) == 0) {
        std::string value = last_line.substr(kPrefix.size());
        auto b = value.find_first_not_of(" \t");
        auto e = value.find_last_not_of(" \t");
        value = b == std::string::npos ? "" : value.substr(b, e - b + 1);
        for (auto& c : value) c = c >= 'a' && c <= 'z' ? char(c - 32) : c;
        if (value == "CONSENSUS") {
            note.verdict = FeedbackVerdict::consensus;
        } else if (value == "DISAGREEMENT") {
            note.verdict = FeedbackVerdict::disagreement;
        } else if (value == "INEFFICIENT") {
            note.verdict = FeedbackVerdict::inefficient;
        } else {
            note.verdict = FeedbackVerdict::inefficient;
            note.parse_warning = true;
        }
        if (!note.parse_warning) {
            std::string guidance = line_start == std::string::npos
                                       ? std::string()
                                       : trimmed.substr(0, line_start);
            auto ge = guidance.find_last_not_of(" \t\r\n");
            note.guidance =
                ge == std::string::npos ? "" : guidance.substr(0, ge + 1);
        } else {
            note.guidance = trimmed;
        }
    } else {
        note.verdict = FeedbackVerdict::inefficient;
        note.parse_warning = true;
        note.guidance = trimmed;
    }
    return note;
}

std::string DiscussionEngine::summarize(const AgentHandle& summarizer,
                                        const DiscussionHistory& history,
                                        const EvaluationTask& task,
                                        std::vector<std::string>* prompt_log) const {
    if (history.statements().empty()) {
        throw InvalidState("summary requires at least one statement");
    }
    PromptTemplate tmpl =
        catalog_.summarize_qa(task.strategy.qa_explanations_enabled);
    Bindings bindings{
        {"story", task.story.body},
        {"history",
         render_statement_block(history.statements(), history.feedback())}};
    Conversation conv = render_prompt(tmpl, bindings);
    std::string reply = gateway::complete(summarizer, conv);
    log_prompt(prompt_log, "summarize_qa");
    return reply;
}

// ---------------------------------------------------------------------------
// Full runs and checkpoints
// ---------------------------------------------------------------------------

struct DiscussionEngine::RunState {
    DiscussionHistory history;
    std::vector<Statement> side_log;
    std::vector<SubQuestion> sub_questions;
    std::vector<std::string> prompt_sequence;
    int next_round = 0;
};

std::filesystem::path DiscussionEngine::checkpoint_path(
    const EvaluationTask& task) const {
    return options_.checkpoint_dir / (task.task_id() + ".checkpoint.json");
}

void DiscussionEngine::write_checkpoint(const EvaluationTask& task,
                                        const RunState& state) const {
    std::error_code ec;
    std::filesystem::create_directories(options_.checkpoint_dir, ec);
    json j{{"task_id", task.task_id()},
           {"strategy", task.strategy},
           {"history", state.history},
           {"side_log", state.side_log},
           {"sub_questions", state.sub_questions},
           {"next_sub_question_index", state.next_round}};
    auto path = checkpoint_path(task);
    std::ofstream out(path);
    out << j.dump(2) << '\n';
    if (!out) throw StorageFailure("cannot write checkpoint " + path.string());
}

DiscussionTranscript DiscussionEngine::run_discussion(
    const EvaluationTask& task, const std::vector<AgentHandle>& evaluators,
    const SupportAgents& support) const {
    RunState state;
    state.history = DiscussionHistory(task.task_id());
    return run_from(task, evaluators, support, std::move(state));
}

DiscussionTranscript DiscussionEngine::resume_discussion(
    const std::filesystem::path& checkpoint, const EvaluationTask& task,
    const std::vector<AgentHandle>& evaluators,
    const SupportAgents& support) const {
    std::ifstream in(checkpoint);
    if (!in) throw StorageFailure("cannot open checkpoint " + checkpoint.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) {
        throw StorageFailure("checkpoint is not valid JSON: " +
                             checkpoint.string());
    }
    if (j.value("task_id", "") != task.task_id()) {
        throw InvalidState("checkpoint task_id '" + j.value("task_id", "") +
                           "' does not match task '" + task.task_id() + "'");
    }
    RunState state;
    j.at("history").get_to(state.history);
    state.side_log = j.at("side_log").get<std::vector<Statement>>();
    state.sub_questions = j.at("sub_questions").get<std::vector<SubQuestion>>();
    state.next_round = j.value("next_sub_question_index", 0);
    return run_from(task, evaluators, support, std::move(state));
}

DiscussionTranscript DiscussionEngine::run_from(
    const EvaluationTask& task, const std::vector<AgentHandle>& evaluators,
    const SupportAgents& support, RunState state) const {
    const Strategy& strategy = task.strategy;
    if (static_cast<int>(evaluators.size()) != strategy.num_agents) {
        throw InvalidState("agent count " + std::to_string(evaluators.size()) +
                           " does not match strategy.num_agents " +
                           std::to_string(strategy.num_agents));
    }

    DiscussionTranscript transcript;
    transcript.strategy = strategy;
    transcript.params = evaluators.front().params;

    try {
        if (strategy.variant == StrategyVariant::SA) {
            // Single evaluator, one call, then summarize. Exactly two
            // backend calls; feedback never runs here.
            if (state.history.statements().empty()) {
                Bindings bindings{{"story", task.story.body},
                                  {"error_types", render_error_types(task.rubric)}};
                Conversation conv =
                    render_prompt(catalog_.get("single_agent_eval"), bindings);
                std::string reply = gateway::complete(evaluators.front(), conv);
                state.prompt_sequence.push_back("single_agent_eval");
                state.history.append_statement(
                    Statement{evaluators.front().agent_id, 0, 0,
                              StatementKind::preliminary, reply});
                state.next_round = 1;
            }
        } else {
            if (strategy.uses_decomposition()) {
                if (state.sub_questions.empty()) {
                    state.sub_questions = decompose_question(
                        task, support.decomposer, &state.prompt_sequence);
                }
            } else if (state.sub_questions.empty()) {
                state.sub_questions = {whole_rubric_question()};
            }

            const int total_rounds =
                strategy.uses_decomposition()
                    ? static_cast<int>(state.sub_questions.size())
                    : strategy.max_rounds;
            for (int round = state.next_round; round < total_rounds; ++round) {
                const SubQuestion& sub_q =
                    strategy.uses_decomposition()
                        ? state.sub_questions[static_cast<std::size_t>(round)]
                        : state.sub_questions.front();
                run_round(sub_q, round, evaluators, state.history,
                          state.side_log, task, support.feedback,
                          &state.prompt_sequence);
                state.next_round = round + 1;
            }
        }

        transcript.raw_summary = summarize(support.summarizer, state.history,
                                           task, &state.prompt_sequence);
    } catch (const Error& e) {
        write_checkpoint(task, state);
        throw DiscussionAborted(e.what(), checkpoint_path(task).string());
    }

    transcript.history = std::move(state.history);
    transcript.side_log = std::move(state.side_log);
    if (strategy.variant != StrategyVariant::SA) {
        transcript.sub_questions = std::move(state.sub_questions);
    }
    transcript.prompt_sequence = std::move(state.prompt_sequence);
    transcript.completed_rounds = state.next_round;
    return transcript;
}

}  // namespace mateval::engine
