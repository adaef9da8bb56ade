#include "mateval/types.hpp"

#include "mateval/text.hpp"

namespace mateval {

// ---------------------------------------------------------------------------
// Enum names
// ---------------------------------------------------------------------------

std::string_view to_string(ErrorType t) {
    switch (t) {
        case ErrorType::REP: return "REP";
        case ErrorType::LINC: return "LINC";
        case ErrorType::DCONT: return "DCONT";
        case ErrorType::ILC: return "ILC";
        case ErrorType::FER: return "FER";
    }
    return "REP";
}

std::optional<ErrorType> error_type_from_string(std::string_view s) {
    for (ErrorType t : kAllErrorTypes) {
        if (s == to_string(t)) return t;
    }
    return std::nullopt;
}

std::string_view describe(ErrorType t) {
    switch (t) {
        case ErrorType::REP:
            return "repetition: redundant sentences or excessive word use";
        case ErrorType::LINC:
            return "logical inconsistency: antonym substitution or polarity "
                   "shifts inside a sentence";
        case ErrorType::DCONT:
            return "discontinuity: sequencing errors or unrelated content";
        case ErrorType::ILC:
            return "inappropriate lexical choice: misused quantifiers or "
                   "pronouns";
        case ErrorType::FER:
            return "factual error: contradictions with established knowledge";
    }
    return "";
}

std::string_view to_string(StatementKind k) {
    return k == StatementKind::preliminary ? "preliminary" : "reflected";
}

StatementKind statement_kind_from_string(std::string_view s) {
    if (s == "preliminary") return StatementKind::preliminary;
    if (s == "reflected") return StatementKind::reflected;
    throw InvalidState("unknown statement kind: " + std::string(s));
}

std::string_view to_string(FeedbackVerdict v) {
    switch (v) {
        case FeedbackVerdict::consensus: return "consensus";
        case FeedbackVerdict::disagreement: return "disagreement";
        case FeedbackVerdict::inefficient: return "inefficient";
    }
    return "inefficient";
}

FeedbackVerdict feedback_verdict_from_string(std::string_view s) {
    if (s == "consensus") return FeedbackVerdict::consensus;
    if (s == "disagreement") return FeedbackVerdict::disagreement;
    if (s == "inefficient") return FeedbackVerdict::inefficient;
    throw InvalidState("unknown feedback verdict: " + std::string(s));
}

std::string_view to_string(StrategyVariant v) {
    switch (v) {
        case StrategyVariant::SA: return "SA";
        case StrategyVariant::ONE_BY_ONE: return "ONE_BY_ONE";
        case StrategyVariant::SR: return "SR";
        case StrategyVariant::COT: return "COT";
        case StrategyVariant::SR_COT: return "SR_COT";
    }
    return "SR_COT";
}

std::optional<StrategyVariant> strategy_variant_from_string(std::string_view s) {
    std::string up;
    up.reserve(s.size());
    for (char c : s) up.push_back(c >= 'a' && c <= 'z' ? char(c - 32) : c);
    if (up == "SA") return StrategyVariant::SA;
    if (up == "ONE_BY_ONE" || up == "O_B_O") return StrategyVariant::ONE_BY_ONE;
    if (up == "SR") return StrategyVariant::SR;
    if (up == "COT") return StrategyVariant::COT;
    if (up == "SR_COT" || up == "SR+COT") return StrategyVariant::SR_COT;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// StoryText
// ---------------------------------------------------------------------------

StoryText StoryText::make(std::string id, std::string body, std::string language) {
    if (body.empty()) throw InvalidState("story body must be non-empty");
    StoryText s;
    s.id = std::move(id);
    s.body = std::move(body);
    s.language = std::move(language);
    s.word_count = text::count_words(s.body, s.language);
    return s;
}

std::vector<std::string> StoryText::validate() const {
    std::vector<std::string> out;
    if (body.empty()) out.push_back("story '" + id + "': body is empty");
    std::size_t expect = text::count_words(body, language);
    if (word_count != expect) {
        out.push_back("story '" + id + "': word_count " +
                      std::to_string(word_count) + " inconsistent with body (" +
                      std::to_string(expect) + " under rule '" + language + "')");
    }
    return out;
}

// ---------------------------------------------------------------------------
// ScoreCard / Strategy
// ---------------------------------------------------------------------------

ScoreCard ScoreCard::zeros() {
    ScoreCard c;
    for (ErrorType t : kAllErrorTypes) c.per_type[t] = 0;
    c.total = 0;
    return c;
}

Strategy Strategy::mateval() { return Strategy{}; }

Strategy Strategy::mateval_minus_feedback() {
    Strategy s;
    s.feedback_enabled = false;
    return s;
}

Strategy Strategy::mateval_minus_qa() {
    Strategy s;
    s.qa_explanations_enabled = false;
    return s;
}

Strategy Strategy::mateval_minus_multi() { return single_agent(); }

Strategy Strategy::single_agent() {
    Strategy s;
    s.variant = StrategyVariant::SA;
    s.num_agents = 1;  // SA forces a single agent
    s.max_rounds = 1;
    return s;
}

std::string Strategy::label() const {
    if (variant == StrategyVariant::SR_COT) {
        if (!feedback_enabled) return "MATEval-FB";
        if (!qa_explanations_enabled) return "MATEval-QA";
        return "MATEval";
    }
    return std::string(to_string(variant));
}

// ---------------------------------------------------------------------------
// AnnotatedStory
// ---------------------------------------------------------------------------

std::vector<std::string> AnnotatedStory::validate() const {
    std::vector<std::string> out = story.validate();
    std::map<ErrorType, int> counts;
    for (ErrorType t : kAllErrorTypes) counts[t] = 0;
    for (const auto& e : gold_errors) {
        counts[e.error_type]++;
        if (!text::contains_normalized(story.body, e.perturbed_excerpt)) {
            out.push_back("story '" + story.id + "': gold " +
                          std::string(to_string(e.error_type)) +
                          " excerpt not found in body: \"" + e.perturbed_excerpt +
                          "\"");
        }
    }
    for (ErrorType t : kAllErrorTypes) {
        auto it = gold_scores.per_type.find(t);
        int have = it == gold_scores.per_type.end() ? 0 : it->second;
        if (have != -counts[t]) {
            out.push_back("story '" + story.id + "': gold_scores[" +
                          std::string(to_string(t)) + "]=" + std::to_string(have) +
                          " but gold_errors imply " + std::to_string(-counts[t]));
        }
    }
    if (gold_scores.total != -static_cast<int>(gold_errors.size())) {
        out.push_back("story '" + story.id + "': gold total " +
                      std::to_string(gold_scores.total) + " != -" +
                      std::to_string(gold_errors.size()));
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

json score_map_to_json(const std::map<ErrorType, int>& m) {
    json j = json::object();
    for (const auto& [t, v] : m) j[std::string(to_string(t))] = v;
    return j;
}

std::map<ErrorType, int> score_map_from_json(const json& j) {
    std::map<ErrorType, int> m;
    for (ErrorType t : kAllErrorTypes) m[t] = 0;
    for (auto it = j.begin(); it != j.end(); ++it) {
        auto t = error_type_from_string(it.key());
        if (!t) throw InvalidState("unknown error type key: " + it.key());
        m[*t] = it.value().get<int>();
    }
    return m;
}

}  // namespace

void to_json(json& j, const StoryText& v) {
    j = json{{"id", v.id},
             {"body", v.body},
             {"language", v.language},
             {"word_count", v.word_count}};
}

void from_json(const json& j, StoryText& v) {
    j.at("id").get_to(v.id);
    j.at("body").get_to(v.body);
    v.language = j.value("language", "en");
    if (j.contains("word_count")) {
        j.at("word_count").get_to(v.word_count);
    } else {
        v.word_count = text::count_words(v.body, v.language);
    }
}

void to_json(json& j, const SubQuestion& v) {
    j = json{{"index", v.index}, {"text", v.text}};
    j["target"] = v.target ? json(std::string(to_string(*v.target))) : json();
}

void from_json(const json& j, SubQuestion& v) {
    j.at("index").get_to(v.index);
    j.at("text").get_to(v.text);
    v.target.reset();
    if (j.contains("target") && !j.at("target").is_null()) {
        v.target = error_type_from_string(j.at("target").get<std::string>());
    }
}

void to_json(json& j, const Statement& v) {
    j = json{{"agent_id", v.agent_id},
             {"round", v.round},
             {"sub_question", v.sub_question},
             {"kind", std::string(to_string(v.kind))},
             {"content", v.content}};
}

void from_json(const json& j, Statement& v) {
    j.at("agent_id").get_to(v.agent_id);
    j.at("round").get_to(v.round);
    j.at("sub_question").get_to(v.sub_question);
    v.kind = statement_kind_from_string(j.at("kind").get<std::string>());
    j.at("content").get_to(v.content);
}

void to_json(json& j, const FeedbackNote& v) {
    j = json{{"round", v.round},
             {"verdict", std::string(to_string(v.verdict))},
             {"guidance", v.guidance},
             {"parse_warning", v.parse_warning}};
}

void from_json(const json& j, FeedbackNote& v) {
    j.at("round").get_to(v.round);
    v.verdict = feedback_verdict_from_string(j.at("verdict").get<std::string>());
    j.at("guidance").get_to(v.guidance);
    v.parse_warning = j.value("parse_warning", false);
}

void to_json(json& j, const DiscussionHistory& v) {
    j = json{{"task_id", v.task_id()},
             {"statements", v.statements()},
             {"feedback", v.feedback()}};
}

void from_json(const json& j, DiscussionHistory& v) {
    DiscussionHistory h(j.value("task_id", ""));
    for (const auto& s : j.at("statements")) h.append_statement(s.get<Statement>());
    for (const auto& n : j.at("feedback")) h.append_feedback(n.get<FeedbackNote>());
    v = std::move(h);
}

void to_json(json& j, const Finding& v) {
    j = json{{"error_type", std::string(to_string(v.error_type))},
             {"sentence_index", v.sentence_index},
             {"excerpt", v.excerpt},
             {"explanation", v.explanation}};
}

void from_json(const json& j, Finding& v) {
    auto t = error_type_from_string(j.at("error_type").get<std::string>());
    if (!t) {
        throw InvalidState("unknown error type: " +
                           j.at("error_type").get<std::string>());
    }
    v.error_type = *t;
    j.at("sentence_index").get_to(v.sentence_index);
    j.at("excerpt").get_to(v.excerpt);
    v.explanation = j.value("explanation", "");
}

void to_json(json& j, const ScoreCard& v) {
    j = json{{"per_type", score_map_to_json(v.per_type)}, {"total", v.total}};
}

void from_json(const json& j, ScoreCard& v) {
    v.per_type = score_map_from_json(j.at("per_type"));
    j.at("total").get_to(v.total);
}

void to_json(json& j, const EvaluationReport& v) {
    json qa = json::array();
    for (const auto& [q, a] : v.qa_items) {
        qa.push_back(json{{"question", q}, {"answer", a}});
    }
    j = json{{"task_id", v.task_id}, {"findings", v.findings},
             {"scorecard", v.scorecard}, {"qa", std::move(qa)},
             {"prose", v.prose}, {"unparsed", v.unparsed}};
}

void from_json(const json& j, EvaluationReport& v) {
    j.at("task_id").get_to(v.task_id);
    v.findings = j.at("findings").get<std::vector<Finding>>();
    j.at("scorecard").get_to(v.scorecard);
    v.qa_items.clear();
    for (const auto& item : j.at("qa")) {
        v.qa_items.emplace_back(item.at("question").get<std::string>(),
                                item.at("answer").get<std::string>());
    }
    v.prose = j.value("prose", "");
    v.unparsed = j.value("unparsed", false);
}

void to_json(json& j, const Strategy& v) {
    j = json{{"variant", std::string(to_string(v.variant))},
             {"feedback_enabled", v.feedback_enabled},
             {"qa_explanations_enabled", v.qa_explanations_enabled},
             {"num_agents", v.num_agents},
             {"max_rounds", v.max_rounds}};
}

void from_json(const json& j, Strategy& v) {
    auto var = strategy_variant_from_string(j.at("variant").get<std::string>());
    if (!var) {
        throw InvalidState("unknown strategy variant: " +
                           j.at("variant").get<std::string>());
    }
    v.variant = *var;
    v.feedback_enabled = j.value("feedback_enabled", true);
    v.qa_explanations_enabled = j.value("qa_explanations_enabled", true);
    v.num_agents = j.value("num_agents", v.variant == StrategyVariant::SA ? 1 : 2);
    v.max_rounds = j.value("max_rounds", 2);
}

void to_json(json& j, const InjectedError& v) {
    j = json{{"error_type", std::string(to_string(v.error_type))},
             {"sentence_index", v.sentence_index},
             {"original_excerpt", v.original_excerpt},
             {"perturbed_excerpt", v.perturbed_excerpt},
             {"description", v.description}};
}

void from_json(const json& j, InjectedError& v) {
    auto t = error_type_from_string(j.at("error_type").get<std::string>());
    if (!t) {
        throw InvalidState("unknown error type: " +
                           j.at("error_type").get<std::string>());
    }
    v.error_type = *t;
    j.at("sentence_index").get_to(v.sentence_index);
    j.at("original_excerpt").get_to(v.original_excerpt);
    j.at("perturbed_excerpt").get_to(v.perturbed_excerpt);
    v.description = j.value("description", "");
}

void to_json(json& j, const AnnotatedStory& v) {
    j = json{{"id", v.story.id},
             {"body", v.story.body},
             {"language", v.story.language},
             {"word_count", v.story.word_count},
             {"gold_errors", v.gold_errors},
             {"gold_scores", v.gold_scores}};
    if (v.human_scores) j["human_scores"] = *v.human_scores;
}

void from_json(const json& j, AnnotatedStory& v) {
    from_json(j, v.story);
    v.gold_errors.clear();
    if (j.contains("gold_errors")) {
        v.gold_errors = j.at("gold_errors").get<std::vector<InjectedError>>();
    }
    if (j.contains("gold_scores")) {
        j.at("gold_scores").get_to(v.gold_scores);
    } else {
        v.gold_scores = ScoreCard::zeros();
    }
    v.human_scores.reset();
    if (j.contains("human_scores") && !j.at("human_scores").is_null()) {
        v.human_scores = j.at("human_scores").get<ScoreCard>();
    }
}

void to_json(json& j, const CorrelationResult& v) {
    json per = json::object();
    for (const auto& [t, cell] : v.per_type) {
        if (cell) {
            per[std::string(to_string(t))] =
                json{{"rho", cell->rho}, {"tau", cell->tau}, {"n", cell->n}};
        } else {
            per[std::string(to_string(t))] = nullptr;
        }
    }
    j = json{{"per_type", std::move(per)}};
    if (v.overall) {
        j["overall"] = json{{"rho", v.overall->rho},
                            {"tau", v.overall->tau},
                            {"n", v.overall->n}};
    } else {
        j["overall"] = nullptr;
    }
}

void from_json(const json& j, CorrelationResult& v) {
    v.per_type.clear();
    for (auto it = j.at("per_type").begin(); it != j.at("per_type").end(); ++it) {
        auto t = error_type_from_string(it.key());
        if (!t) throw InvalidState("unknown error type key: " + it.key());
        if (it.value().is_null()) {
            v.per_type[*t] = std::nullopt;
        } else {
            v.per_type[*t] = CorrCell{it.value().at("rho").get<double>(),
                                      it.value().at("tau").get<double>(),
                                      it.value().at("n").get<int>()};
        }
    }
    v.overall.reset();
    if (j.contains("overall") && !j.at("overall").is_null()) {
        v.overall = CorrCell{j.at("overall").at("rho").get<double>(),
                             j.at("overall").at("tau").get<double>(),
                             j.at("overall").at("n").get<int>()};
    }
}

}  // namespace mateval
