#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mateval/errors.hpp"

namespace mateval {

// ---------------------------------------------------------------------------
// Error taxonomy
// ---------------------------------------------------------------------------

/// The five error categories. Closed enumeration; serialized names are
/// exactly these tokens.
enum class ErrorType { REP, LINC, DCONT, ILC, FER };

/// Report/table column order.
inline constexpr std::array<ErrorType, 5> kAllErrorTypes = {
    ErrorType::REP, ErrorType::LINC, ErrorType::DCONT, ErrorType::ILC,
    ErrorType::FER};

std::string_view to_string(ErrorType t);
std::optional<ErrorType> error_type_from_string(std::string_view s);

/// Human-readable definition used in prompts and synthetic sub-questions.
std::string_view describe(ErrorType t);

// ---------------------------------------------------------------------------
// Text under evaluation
// ---------------------------------------------------------------------------

struct StoryText {
    std::string id;
    std::string body;
    std::string language = "en";  // BCP-47-ish tag; "zh" switches word counting
    std::size_t word_count = 0;

    /// Builds a story with word_count computed under the language rule.
    /// Throws InvalidState on empty body.
    static StoryText make(std::string id, std::string body,
                          std::string language = "en");

    /// Invariant check: body non-empty, word_count consistent with body.
    /// Returns violation descriptions (empty = valid).
    std::vector<std::string> validate() const;
};

// ---------------------------------------------------------------------------
// Discussion record
// ---------------------------------------------------------------------------

struct SubQuestion {
    int index = 0;  // 0-based, contiguous within a list
    std::string text;
    std::optional<ErrorType> target;
};

enum class StatementKind { preliminary, reflected };

std::string_view to_string(StatementKind k);
StatementKind statement_kind_from_string(std::string_view s);

struct Statement {
    std::string agent_id;
    int round = 0;
    int sub_question = 0;
    StatementKind kind = StatementKind::preliminary;
    std::string content;
};

enum class FeedbackVerdict { consensus, disagreement, inefficient };

std::string_view to_string(FeedbackVerdict v);
FeedbackVerdict feedback_verdict_from_string(std::string_view s);

struct FeedbackNote {
    int round = 0;
    FeedbackVerdict verdict = FeedbackVerdict::inefficient;
    std::string guidance;
    bool parse_warning = false;  // set when the verdict line was missing
};

/// The paper's H: append-only ordered record of accepted statements plus
/// per-round feedback notes. Statement order is the exact utterance order.
class DiscussionHistory {
public:
    DiscussionHistory() = default;
    explicit DiscussionHistory(std::string task_id)
        : task_id_(std::move(task_id)) {}

    void append_statement(Statement s) { statements_.push_back(std::move(s)); }
    void append_feedback(FeedbackNote n) { feedback_.push_back(std::move(n)); }

    const std::vector<Statement>& statements() const { return statements_; }
    const std::vector<FeedbackNote>& feedback() const { return feedback_; }
    const std::string& task_id() const { return task_id_; }
    bool empty() const { return statements_.empty(); }

private:
    std::vector<Statement> statements_;
    std::vector<FeedbackNote> feedback_;
    std::string task_id_;
};

// ---------------------------------------------------------------------------
// Findings and scores
// ---------------------------------------------------------------------------

/// The report atom: one localized error.
struct Finding {
    ErrorType error_type = ErrorType::REP;
    int sentence_index = 0;       // 0-based into the shared segmentation
    std::string excerpt;          // verbatim quote from the story body
    std::string explanation;
};

/// Deduction scores: starting from zero, each error deducts one point.
/// per_type always carries all five types (zero when absent).
struct ScoreCard {
    std::map<ErrorType, int> per_type;
    int total = 0;

    /// All-zero card with every type present.
    static ScoreCard zeros();
};

struct EvaluationReport {
    std::string task_id;
    std::vector<Finding> findings;
    ScoreCard scorecard;
    std::vector<std::pair<std::string, std::string>> qa_items;
    std::string prose;
    bool unparsed = false;  // summarizer output had no usable JSON block
};

// ---------------------------------------------------------------------------
// Strategy
// ---------------------------------------------------------------------------

enum class StrategyVariant { SA, ONE_BY_ONE, SR, COT, SR_COT };

std::string_view to_string(StrategyVariant v);
std::optional<StrategyVariant> strategy_variant_from_string(std::string_view s);

struct Strategy {
    StrategyVariant variant = StrategyVariant::SR_COT;
    bool feedback_enabled = true;
    bool qa_explanations_enabled = true;
    int num_agents = 2;
    int max_rounds = 2;  // used by non-CoT multi-round variants

    bool uses_decomposition() const {
        return variant == StrategyVariant::COT || variant == StrategyVariant::SR_COT;
    }
    bool uses_reflection() const {
        return variant == StrategyVariant::SR || variant == StrategyVariant::SR_COT;
    }

    /// The full framework configuration: SR+CoT, feedback and explanations
    /// on, two evaluator agents.
    static Strategy mateval();
    /// Ablation rows from the full configuration.
    static Strategy mateval_minus_feedback();
    static Strategy mateval_minus_qa();
    static Strategy mateval_minus_multi();  // single agent
    static Strategy single_agent();

    std::string label() const;
};

// ---------------------------------------------------------------------------
// Gold annotations
// ---------------------------------------------------------------------------

struct InjectedError {
    ErrorType error_type = ErrorType::REP;
    int sentence_index = 0;          // in the perturbed body
    std::string original_excerpt;    // occurs in the source body
    std::string perturbed_excerpt;   // occurs in the perturbed body
    std::string description;
};

struct AnnotatedStory {
    StoryText story;
    std::vector<InjectedError> gold_errors;
    ScoreCard gold_scores;
    std::optional<ScoreCard> human_scores;

    /// Invariant check: gold_scores consistent with gold_errors under the
    /// deduction rule, excerpts locate in the body.
    std::vector<std::string> validate() const;
};

// ---------------------------------------------------------------------------
// Correlation output
// ---------------------------------------------------------------------------

struct CorrCell {
    double rho = 0.0;
    double tau = 0.0;
    int n = 0;
};

/// One row of a Table-1-style matrix. Cells are absent when correlation is
/// undefined (constant column or too few samples).
struct CorrelationResult {
    std::map<ErrorType, std::optional<CorrCell>> per_type;
    std::optional<CorrCell> overall;
};

// ---------------------------------------------------------------------------
// JSON serialization (canonical snake_case schema)
// ---------------------------------------------------------------------------

using json = nlohmann::json;

void to_json(json& j, const StoryText& v);
void from_json(const json& j, StoryText& v);
void to_json(json& j, const SubQuestion& v);
void from_json(const json& j, SubQuestion& v);
void to_json(json& j, const Statement& v);
void from_json(const json& j, Statement& v);
void to_json(json& j, const FeedbackNote& v);
void from_json(const json& j, FeedbackNote& v);
void to_json(json& j, const DiscussionHistory& v);
void from_json(const json& j, DiscussionHistory& v);
void to_json(json& j, const Finding& v);
void from_json(const json& j, Finding& v);
void to_json(json& j, const ScoreCard& v);
void from_json(const json& j, ScoreCard& v);
void to_json(json& j, const EvaluationReport& v);
void from_json(const json& j, EvaluationReport& v);
void to_json(json& j, const Strategy& v);
void from_json(const json& j, Strategy& v);
void to_json(json& j, const InjectedError& v);
void from_json(const json& j, InjectedError& v);
void to_json(json& j, const AnnotatedStory& v);
void from_json(const json& j, AnnotatedStory& v);
void to_json(json& j, const CorrelationResult& v);
void from_json(const json& j, CorrelationResult& v);

}  // namespace mateval
