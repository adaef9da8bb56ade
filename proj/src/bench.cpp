#include "mateval/bench/bench.hpp"

#include <atomic>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

namespace mateval::bench {

// ---------------------------------------------------------------------------
// Score extraction
// ---------------------------------------------------------------------------

namespace {

/// Parses the integer after the first `SCORE:` token; nullopt when the
/// token is absent, MissingScores when it is present but not an integer.
std::optional<int> parse_score_token(const std::string& answer) {
    auto pos = answer.find("SCORE:");
    if (pos == std::string::npos) return std::nullopt;
    std::size_t i = pos + 6;
    while (i < answer.size() && (answer[i] == ' ' || answer[i] == '\t')) ++i;
    std::size_t start = i;
    if (i < answer.size() && answer[i] == '-') ++i;
    std::size_t digits_start = i;
    while (i < answer.size() && std::isdigit(static_cast<unsigned char>(answer[i]))) {
        ++i;
    }
    if (i == digits_start) {
        throw MissingScores("SCORE token is not an integer: \"" +
                            answer.substr(pos, 16) + "...\"");
    }
    return std::stoi(answer.substr(start, i - start));
}

}  // namespace

ScoreCard extract_scores(const EvaluationReport& report) {
    if (report.unparsed) {
        throw MissingScores("report is flagged unparsed");
    }
    if (report.qa_items.empty()) return report.scorecard;  // documented fallback

    ScoreCard card = ScoreCard::zeros();
    bool total_seen = false;
    for (const auto& [question, answer] : report.qa_items) {
        auto score = parse_score_token(answer);
        if (!score) {
            throw MissingScores("Q&A answer lacks a SCORE token: \"" + question +
                                "\"");
        }
        bool matched = false;
        for (ErrorType t : kAllErrorTypes) {
            if (question.find(std::string(to_string(t)) + " errors") !=
                std::string::npos) {
                card.per_type[t] = *score;
                matched = true;
                break;
            }
        }
        if (!matched && question.find("total") != std::string::npos) {
            card.total = *score;
            total_seen = true;
        }
    }
    if (!total_seen) {
        card.total = 0;
        for (const auto& [t, v] : card.per_type) card.total += v;
    }
    return card;
}

// ---------------------------------------------------------------------------
// Table rendering
// ---------------------------------------------------------------------------

void to_json(json& j, const StoryScore& s) {
    j = json{{"story_id", s.story_id},
             {"strategy", s.strategy_label},
             {"engine_scores", s.engine_scores},
             {"reference_scores", s.reference_scores},
             {"excluded", s.excluded},
             {"note", s.note}};
}

namespace {

std::string format_cell(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

std::string CorrelationTable::to_csv() const {
    std::string out = "strategy";
    for (ErrorType t : kAllErrorTypes) {
        std::string name(to_string(t));
        out += "," + name + "_rho," + name + "_tau";
    }
    out += ",overall_rho,overall_tau,n,excluded\n";
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out += row_labels[r];
        for (ErrorType t : kAllErrorTypes) {
            auto it = rows[r].per_type.find(t);
            if (it != rows[r].per_type.end() && it->second) {
                out += "," + format_cell(it->second->rho) + "," +
                       format_cell(it->second->tau);
            } else {
                out += ",—,—";  // absent, not zero
            }
        }
        if (rows[r].overall) {
            out += "," + format_cell(rows[r].overall->rho) + "," +
                   format_cell(rows[r].overall->tau) + "," +
                   std::to_string(rows[r].overall->n);
        } else {
            out += ",—,—,0";
        }
        out += "," + std::to_string(excluded_counts[r]) + "\n";
    }
    return out;
}

json CorrelationTable::to_json() const {
    json rows_json = json::array();
    for (std::size_t r = 0; r < rows.size(); ++r) {
        rows_json.push_back(json{{"strategy", row_labels[r]},
                                 {"excluded", excluded_counts[r]},
                                 {"correlation", rows[r]}});
    }
    return json{{"reference", reference}, {"rows", std::move(rows_json)}};
}

void write_story_scores(const CorrelationTable& table,
                        const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) throw StorageFailure("cannot write scores file " + path.string());
    for (const auto& row : table.per_story) {
        for (const auto& score : row) out << json(score).dump() << '\n';
    }
}

// ---------------------------------------------------------------------------
// Benchmark runner
// ---------------------------------------------------------------------------

namespace {

std::optional<CorrCell> correlate(const std::vector<double>& xs,
                                  const std::vector<double>& ys) {
    if (xs.size() < 2) return std::nullopt;
    try {
        CorrCell cell;
        cell.rho = spearman(xs, ys);
        cell.tau = kendall(xs, ys);
        cell.n = static_cast<int>(xs.size());
        return cell;
    } catch (const DegenerateInput&) {
        return std::nullopt;  // undefined, reported as absent
    }
}

CorrelationResult correlate_row(const std::vector<StoryScore>& scores) {
    CorrelationResult result;
    for (ErrorType t : kAllErrorTypes) {
        std::vector<double> xs, ys;
        for (const auto& s : scores) {
            if (s.excluded) continue;
            xs.push_back(s.engine_scores.per_type.at(t));
            ys.push_back(s.reference_scores.per_type.at(t));
        }
        result.per_type[t] = correlate(xs, ys);
    }
    std::vector<double> xs, ys;
    for (const auto& s : scores) {
        if (s.excluded) continue;
        xs.push_back(s.engine_scores.total);
        ys.push_back(s.reference_scores.total);
    }
    result.overall = correlate(xs, ys);
    return result;
}

}  // namespace

CorrelationTable run_benchmark(const engine::DiscussionEngine& eng,
                               const std::vector<AnnotatedStory>& corpus,
                               const std::vector<Strategy>& strategies,
                               const AgentFactory& agents,
                               const BenchConfig& config) {
    CorrelationTable table;
    bool any_human = false, all_human = !corpus.empty();
    for (const auto& s : corpus) {
        any_human = any_human || s.human_scores.has_value();
        all_human = all_human && s.human_scores.has_value();
    }
    table.reference = all_human ? "human_scores"
                     : any_human ? "human_scores_when_present_else_gold"
                                 : "gold_scores";

    std::ofstream progress;
    std::mutex progress_mu;
    if (!config.progress_path.empty()) {
        progress.open(config.progress_path, std::ios::app);
    }

    const std::vector<ErrorType> rubric(kAllErrorTypes.begin(),
                                        kAllErrorTypes.end());
    for (const auto& strategy : strategies) {
        std::vector<StoryScore> scores(corpus.size());

        auto evaluate_one = [&](std::size_t i) {
            const AnnotatedStory& story = corpus[i];
            StoryScore s;
            s.story_id = story.story.id;
            s.strategy_label = strategy.label();
            s.reference_scores =
                story.human_scores ? *story.human_scores : story.gold_scores;
            try {
                AgentBundle bundle = agents(story, strategy);
                auto task =
                    engine::EvaluationTask::make(story.story, rubric, strategy);
                PipelineResult result = evaluate_story(
                    eng, task, bundle.evaluators, bundle.support);
                s.engine_scores = extract_scores(result.report);
            } catch (const Error& e) {
                s.excluded = true;
                s.note = e.what();
                s.engine_scores = ScoreCard::zeros();
            }
            if (progress.is_open()) {
                // Completion order; tolerant of out-of-order finishes.
                std::lock_guard<std::mutex> lock(progress_mu);
                progress << json(s).dump() << '\n';
                progress.flush();
            }
            scores[i] = std::move(s);
        };

        if (config.parallel <= 1 || corpus.size() < 2) {
            for (std::size_t i = 0; i < corpus.size(); ++i) evaluate_one(i);
        } else {
            std::atomic<std::size_t> next{0};
            std::vector<std::thread> workers;
            std::size_t n = std::min(config.parallel, corpus.size());
            for (std::size_t w = 0; w < n; ++w) {
                workers.emplace_back([&] {
                    for (std::size_t i = next.fetch_add(1); i < corpus.size();
                         i = next.fetch_add(1)) {
                        evaluate_one(i);
                    }
                });
            }
            for (auto& t : workers) t.join();
        }

        int excluded = 0;
        for (const auto& s : scores) excluded += s.excluded ? 1 : 0;
        table.row_labels.push_back(strategy.label());
        table.rows.push_back(correlate_row(scores));
        table.excluded_counts.push_back(excluded);
        table.per_story.push_back(std::move(scores));
    }
    return table;
}

CorrelationTable run_ablation(const engine::DiscussionEngine& eng,
                              const std::vector<AnnotatedStory>& corpus,
                              const Strategy& base, const AgentFactory& agents,
                              const BenchConfig& config) {
    Strategy minus_fb = base;
    minus_fb.feedback_enabled = false;
    Strategy minus_qa = base;
    minus_qa.qa_explanations_enabled = false;
    Strategy minus_multi = Strategy::mateval_minus_multi();
    minus_multi.feedback_enabled = base.feedback_enabled;
    minus_multi.qa_explanations_enabled = base.qa_explanations_enabled;

    CorrelationTable table = run_benchmark(
        eng, corpus, {base, minus_fb, minus_qa, minus_multi}, agents, config);
    table.row_labels = {"MATEval", "MATEval-FB", "MATEval-QA", "MATEval-multi"};
    for (std::size_t r = 0; r < table.per_story.size(); ++r) {
        for (auto& score : table.per_story[r]) {
            score.strategy_label = table.row_labels[r];
        }
    }
    return table;
}

// ---------------------------------------------------------------------------
// Gold-perfect scripted agents
// ---------------------------------------------------------------------------

AgentFactory gold_script_factory() {
    return [](const AnnotatedStory& story, const Strategy& strategy) {
        auto backend = std::make_shared<gateway::ScriptedBackend>();
        gateway::GenerationParams params;  // scripted runs ignore the model

        const std::vector<ErrorType> rubric(kAllErrorTypes.begin(),
                                            kAllErrorTypes.end());
        // Decomposition: one sub-question per rubric type, in rubric order.
        if (strategy.uses_decomposition()) {
            json questions = json::array();
            for (ErrorType t : rubric) {
                questions.push_back(
                    json{{"question", "Does the story contain " +
                                          std::string(to_string(t)) +
                                          " problems?"},
                         {"target", std::string(to_string(t))}});
            }
            backend->push_reply("decomposer",
                                "```json\n" + questions.dump() + "\n```");
        }

        const int rounds =
            strategy.variant == StrategyVariant::SA ? 1
            : strategy.uses_decomposition() ? static_cast<int>(rubric.size())
                                            : strategy.max_rounds;
        const int replies_per_round = strategy.uses_reflection() ? 2 : 1;
        for (int agent = 0; agent < strategy.num_agents; ++agent) {
            std::string id = "eval-" + std::to_string(agent + 1);
            for (int r = 0; r < rounds; ++r) {
                for (int k = 0; k < replies_per_round; ++k) {
                    backend->push_reply(
                        id, (k == 0 ? "Preliminary view for round "
                                    : "Reflected view for round ") +
                                std::to_string(r) +
                                ": the gold annotations say what they say.");
                }
            }
        }
        if (strategy.feedback_enabled &&
            strategy.variant != StrategyVariant::SA) {
            for (int r = 0; r < rounds; ++r) {
                backend->push_reply("moderator",
                                    "Reviewers agree on round " +
                                        std::to_string(r) +
                                        ".\nVERDICT: CONSENSUS");
            }
        }

        // Summary: exactly the gold errors as the findings block.
        json findings = json::array();
        for (const auto& e : story.gold_errors) {
            findings.push_back(
                json{{"error_type", std::string(to_string(e.error_type))},
                     {"sentence_index", e.sentence_index},
                     {"excerpt", e.perturbed_excerpt},
                     {"explanation", e.description.empty() ? "injected error"
                                                           : e.description}});
        }
        backend->push_reply("summarizer",
                            "Panel summary follows.\n```json\n" +
                                findings.dump() + "\n```");

        AgentBundle bundle;
        for (int agent = 0; agent < strategy.num_agents; ++agent) {
            bundle.evaluators.push_back(engine::AgentHandle{
                "eval-" + std::to_string(agent + 1), backend, params});
        }
        bundle.support.decomposer =
            engine::AgentHandle{"decomposer", backend, params};
        bundle.support.feedback =
            engine::AgentHandle{"moderator", backend, params};
        bundle.support.summarizer =
            engine::AgentHandle{"summarizer", backend, params};
        return bundle;
    };
}

}  // namespace mateval::bench
