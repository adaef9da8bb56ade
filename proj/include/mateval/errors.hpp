#pragma once

#include <stdexcept>
#include <string>

namespace mateval {

/// Root of the project's exception hierarchy. Everything thrown on purpose
/// derives from this so callers can catch one type at pipeline boundaries.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// agent-gateway
// ---------------------------------------------------------------------------

/// A prompt template referenced a placeholder with no binding.
class MissingBinding : public Error {
public:
    explicit MissingBinding(const std::string& placeholder)
        : Error("missing binding for placeholder {" + placeholder + "}"),
          placeholder_(placeholder) {}
    const std::string& placeholder() const { return placeholder_; }

private:
    std::string placeholder_;
};

/// The scripted backend ran out of replies for an agent. Signals a
/// test/orchestration mismatch, not a recoverable condition.
class ScriptUnderflow : public Error {
public:
    explicit ScriptUnderflow(const std::string& agent_id)
        : Error("scripted backend has no reply left for agent '" + agent_id + "'") {}
};

/// Live backend gave up after the configured retry attempts.
class BackendExhausted : public Error {
public:
    explicit BackendExhausted(const std::string& detail)
        : Error("backend exhausted retries: " + detail) {}
};

/// No credential configured for the live backend.
class AuthMissing : public Error {
public:
    explicit AuthMissing(const std::string& env_var)
        : Error("no credential configured: set " + env_var), env_var_(env_var) {}
    const std::string& env_var() const { return env_var_; }

private:
    std::string env_var_;
};

/// Replay backend has no recorded reply for the requested conversation.
class ReplayMiss : public Error {
public:
    explicit ReplayMiss(const std::string& detail)
        : Error("replay miss: " + detail) {}
};

/// Transcript persistence failed (disk full, bad path, ...).
class StorageFailure : public Error {
public:
    explicit StorageFailure(const std::string& detail)
        : Error("transcript storage failure: " + detail) {}
};

/// The per-run call budget was exceeded (cost guard).
class CallBudgetExceeded : public Error {
public:
    explicit CallBudgetExceeded(int budget)
        : Error("call budget of " + std::to_string(budget) + " requests exceeded") {}
};

// ---------------------------------------------------------------------------
// discussion-engine
// ---------------------------------------------------------------------------

/// Decomposer reply lacked the required JSON block even after one repair.
class UnparseableDecomposition : public Error {
public:
    explicit UnparseableDecomposition(const std::string& detail)
        : Error("unparseable decomposition: " + detail) {}
};

/// An operation was invoked in a state its precondition forbids.
class InvalidState : public Error {
public:
    explicit InvalidState(const std::string& detail) : Error(detail) {}
};

/// A discussion stopped mid-run after a backend failure; a resumable
/// checkpoint was written first.
class DiscussionAborted : public Error {
public:
    DiscussionAborted(const std::string& reason, const std::string& checkpoint_path)
        : Error("discussion aborted (" + reason + "); checkpoint: " + checkpoint_path),
          checkpoint_path_(checkpoint_path) {}
    const std::string& checkpoint_path() const { return checkpoint_path_; }

private:
    std::string checkpoint_path_;
};

// ---------------------------------------------------------------------------
// corpus-lab
// ---------------------------------------------------------------------------

/// A corpus line failed to parse or validate.
class MalformedLine : public Error {
public:
    MalformedLine(std::size_t line_number, const std::string& reason)
        : Error("corpus line " + std::to_string(line_number) + ": " + reason),
          line_number_(line_number) {}
    std::size_t line_number() const { return line_number_; }

private:
    std::size_t line_number_;
};

/// A requested injection cannot be applied to this story.
class InfeasiblePlan : public Error {
public:
    InfeasiblePlan(const std::string& error_type, const std::string& reason)
        : Error("infeasible plan for " + error_type + ": " + reason) {}
};

/// No lexical substitution target found and every fallback failed.
class NoLexicalTarget : public Error {
public:
    explicit NoLexicalTarget(const std::string& detail)
        : Error("no lexical target: " + detail) {}
};

// ---------------------------------------------------------------------------
// bench-harness
// ---------------------------------------------------------------------------

/// Correlation is undefined on the given input (constant list).
class DegenerateInput : public Error {
public:
    explicit DegenerateInput(const std::string& detail)
        : Error("degenerate correlation input: " + detail) {}
};

/// A report carries no extractable scores (unparsed or tampered).
class MissingScores : public Error {
public:
    explicit MissingScores(const std::string& detail)
        : Error("missing scores: " + detail) {}
};

}  // namespace mateval
