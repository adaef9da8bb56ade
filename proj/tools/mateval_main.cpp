// mateval: multi-agent story evaluation CLI.
//
// Subcommands: evaluate, build-corpus, bench, replay. All outputs land
// under the --out directory. Config precedence: flags > environment >
// config file (INI via --config).

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mateval/bench/bench.hpp"
#include "mateval/corpus/corpus.hpp"
#include "mateval/gateway/http_backend.hpp"
#include "mateval/gateway/transcript.hpp"
#include "mateval/pipeline.hpp"
#include "mateval/report/report.hpp"

namespace fs = std::filesystem;
using namespace mateval;

namespace {

constexpr const char* kApiKeyEnv = "MATEVAL_API_KEY";

struct CommonOpts {
    std::string backend = "scripted";
    std::string base_url = "https://api.openai.com/v1";
    std::string model = "gpt-4";
    double temperature = 0.0;
    int max_tokens = 1024;
    std::string strategy = "sr_cot";
    bool feedback = true;
    bool qa_explanations = true;
    int num_agents = 2;
    int max_rounds = 2;
    std::string out_dir = "out";
    int parallel = 1;
    int max_calls = 0;  // 0 = unlimited
    std::string script_path;
    std::string transcript_path;
};

void add_common_flags(CLI::App* cmd, CommonOpts& o, bool with_backend = true) {
    if (with_backend) {
        cmd->add_option("--backend", o.backend,
                        "scripted | live | replay (scripted agents report the "
                        "gold annotations when a corpus carries them)")
            ->envname("MATEVAL_BACKEND");
        cmd->add_option("--base-url", o.base_url,
                        "chat-completion endpoint base URL")
            ->envname("MATEVAL_BASE_URL");
        cmd->add_option("--model", o.model, "model name sent to the backend")
            ->envname("MATEVAL_MODEL");
        cmd->add_option("--temperature", o.temperature, "sampling temperature");
        cmd->add_option("--max-tokens", o.max_tokens, "reply token cap");
        cmd->add_option("--script", o.script_path,
                        "scripted-backend reply file (JSONL: {agent_id, reply})");
        cmd->add_option("--transcript", o.transcript_path,
                        "transcript file for --backend replay");
        cmd->add_option("--max-calls", o.max_calls,
                        "abort (with checkpoints) after this many backend calls");
    }
    cmd->add_option("--strategy", o.strategy, "sa | o_b_o | sr | cot | sr_cot");
    cmd->add_flag("--feedback,!--no-feedback", o.feedback,
                  "run the feedback agent after each round");
    cmd->add_flag("--qa-explanations,!--no-qa-explanations", o.qa_explanations,
                  "request explanations in the Q&A report");
    cmd->add_option("--num-agents", o.num_agents, "evaluator agent count");
    cmd->add_option("--max-rounds", o.max_rounds,
                    "rounds for non-CoT multi-round variants");
    cmd->add_option("--out", o.out_dir, "output directory for all files");
    cmd->add_option("--parallel", o.parallel,
                    "concurrent discussions (default 1 for reproducible logs)");
}

Strategy make_strategy(const CommonOpts& o) {
    auto variant = strategy_variant_from_string(o.strategy);
    if (!variant) {
        throw InvalidState("unknown strategy '" + o.strategy +
                           "' (use sa, o_b_o, sr, cot, sr_cot)");
    }
    Strategy s;
    s.variant = *variant;
    s.feedback_enabled = o.feedback;
    s.qa_explanations_enabled = o.qa_explanations;
    s.num_agents = *variant == StrategyVariant::SA ? 1 : o.num_agents;
    s.max_rounds = o.max_rounds;
    return s;
}

gateway::GenerationParams make_params(const CommonOpts& o) {
    gateway::GenerationParams p;
    p.model = o.model;
    p.temperature = o.temperature;
    p.max_tokens = o.max_tokens;
    return p;
}

std::shared_ptr<gateway::ChatBackend> wrap_budget(
    std::shared_ptr<gateway::ChatBackend> inner, const CommonOpts& o,
    const std::shared_ptr<std::atomic<int>>& budget) {
    if (o.max_calls <= 0) return inner;
    return std::make_shared<gateway::BudgetedBackend>(inner, budget, o.max_calls);
}

std::shared_ptr<gateway::ScriptedBackend> load_script_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidState("cannot open script file " + path.string());
    auto backend = std::make_shared<gateway::ScriptedBackend>();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.contains("agent_id") || !j.contains("reply")) {
            throw MalformedLine(line_no,
                                "script lines must be {\"agent_id\", \"reply\"}");
        }
        backend->push_reply(j.at("agent_id").get<std::string>(),
                            j.at("reply").get<std::string>());
    }
    return backend;
}

/// Builds the per-story agent factory for the chosen backend. Live and
/// replay backends are shared across stories; scripted backends are
/// per-story (gold scripts) or single-shot (script file).
bench::AgentFactory make_factory(const CommonOpts& o,
                                 const fs::path& out_dir,
                                 const std::shared_ptr<std::atomic<int>>& budget) {
    gateway::GenerationParams params = make_params(o);

    auto bundle_from = [params](std::shared_ptr<gateway::ChatBackend> backend,
                                const Strategy& strategy) {
        bench::AgentBundle b;
        for (int i = 0; i < strategy.num_agents; ++i) {
            b.evaluators.push_back(engine::AgentHandle{
                "eval-" + std::to_string(i + 1), backend, params});
        }
        b.support.decomposer = engine::AgentHandle{"decomposer", backend, params};
        b.support.feedback = engine::AgentHandle{"moderator", backend, params};
        b.support.summarizer = engine::AgentHandle{"summarizer", backend, params};
        return b;
    };

    if (o.backend == "scripted" || o.backend == "gold") {
        if (!o.script_path.empty()) {
            // One explicit script serves one discussion.
            auto scripted = load_script_file(o.script_path);
            return [bundle_from, scripted](const AnnotatedStory&,
                                           const Strategy& strategy) {
                return bundle_from(scripted, strategy);
            };
        }
        return bench::gold_script_factory();
    }
    if (o.backend == "replay") {
        if (o.transcript_path.empty()) {
            throw InvalidState("--backend replay requires --transcript");
        }
        auto replay = gateway::ReplayBackend::load(o.transcript_path);
        auto shared = wrap_budget(replay, o, budget);
        return [bundle_from, shared](const AnnotatedStory&,
                                     const Strategy& strategy) {
            return bundle_from(shared, strategy);
        };
    }
    if (o.backend == "live") {
        gateway::HttpChatBackend::Options opts;
        opts.base_url = o.base_url;
        opts.api_key_env = kApiKeyEnv;
        auto live = std::make_shared<gateway::HttpChatBackend>(opts);
        auto writer = std::make_shared<gateway::TranscriptWriter>(
            out_dir / "transcript.jsonl");
        auto recorded =
            std::make_shared<gateway::RecordingBackend>(live, writer);
        auto shared = wrap_budget(recorded, o, budget);
        return [bundle_from, shared](const AnnotatedStory&,
                                     const Strategy& strategy) {
            return bundle_from(shared, strategy);
        };
    }
    throw InvalidState("unknown backend '" + o.backend +
                       "' (use scripted, live, replay)");
}

StoryText load_story_file(const fs::path& path, std::string id,
                          const std::string& language) {
    std::ifstream in(path);
    if (!in) throw InvalidState("cannot open story file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    if (id.empty()) id = path.stem().string();
    return StoryText::make(std::move(id), buffer.str(), language);
}

std::string sanitize_filename(std::string name) {
    for (auto& c : name) {
        if (c == '/' || c == '\\' || c == ':') c = '_';
    }
    return name;
}

// -----------------------------------------------------------------------
// evaluate / replay
// -----------------------------------------------------------------------

int run_evaluate(const CommonOpts& o, const std::string& story_path,
                 const std::string& story_id, const std::string& language,
                 const std::string& corpus_path) {
    fs::path out_dir(o.out_dir);
    fs::create_directories(out_dir);

    std::vector<AnnotatedStory> stories;
    if (!story_path.empty()) {
        AnnotatedStory s;
        s.story = load_story_file(story_path, story_id, language);
        s.gold_scores = ScoreCard::zeros();
        stories.push_back(std::move(s));
    } else if (!corpus_path.empty()) {
        stories = corpus::load_corpus(corpus_path);
    } else {
        std::cerr << "evaluate: provide --story or --corpus\n";
        return 1;
    }

    Strategy strategy = make_strategy(o);
    engine::EngineOptions eng_opts;
    eng_opts.checkpoint_dir = out_dir / "checkpoints";
    engine::DiscussionEngine eng(eng_opts);
    auto budget = std::make_shared<std::atomic<int>>(o.max_calls);
    bench::AgentFactory factory = make_factory(o, out_dir, budget);

    const std::vector<ErrorType> rubric(kAllErrorTypes.begin(),
                                        kAllErrorTypes.end());
    int failures = 0;
    for (const auto& story : stories) {
        try {
            auto task = engine::EvaluationTask::make(story.story, rubric,
                                                     strategy);
            bench::AgentBundle bundle = factory(story, strategy);
            PipelineResult result =
                evaluate_story(eng, task, bundle.evaluators, bundle.support);

            std::string base = sanitize_filename(task.task_id());
            {
                std::ofstream rj(out_dir / (base + ".report.json"));
                rj << report::report_to_json(result.report, strategy).dump(2)
                   << '\n';
            }
            {
                std::ofstream rp(out_dir / (base + ".report.md"));
                rp << result.report.prose;
            }
            {
                std::ofstream tj(out_dir / (base + ".discussion.json"));
                tj << json(result.transcript).dump(2) << '\n';
            }
            if (result.report.unparsed) {
                std::cerr << "warning: summary for '" << story.story.id
                          << "' was unparsable; report carries zero "
                             "deductions\n";
                ++failures;
            }
            std::cout << "evaluated '" << story.story.id << "' -> " << base
                      << ".report.json (total "
                      << result.report.scorecard.total << ")\n";
        } catch (const DiscussionAborted& e) {
            std::cerr << "aborted '" << story.story.id
                      << "': " << e.what() << "\n";
            std::cerr << "checkpoint: " << e.checkpoint_path() << "\n";
            ++failures;
        }
    }
    return failures == 0 ? 0 : 2;
}

// -----------------------------------------------------------------------
// build-corpus
// -----------------------------------------------------------------------

int run_build_corpus(const std::string& in_path, const std::string& out_dir_s,
                     std::uint64_t seed, const std::string& plan_spec,
                     std::size_t word_limit, bool truncate,
                     const std::string& lexicon_path, int parallel) {
    fs::path out_dir(out_dir_s);
    fs::create_directories(out_dir);

    std::vector<AnnotatedStory> raw = corpus::load_corpus(in_path);
    if (truncate) {
        for (auto& s : raw) {
            auto outcome = corpus::truncate_text_ex(s.story, word_limit);
            if (outcome.over_limit) {
                std::cerr << "note: story '" << s.story.id
                          << "' kept whole over the word limit (single "
                             "sentence)\n";
            }
            s.story = std::move(outcome.story);
        }
    }

    corpus::InjectionPlan plan = corpus::parse_plan(plan_spec);
    std::optional<corpus::Lexicons> lex;
    if (!lexicon_path.empty()) {
        lex = corpus::Lexicons::load(lexicon_path,
                                     raw.empty() ? "en" : raw.front().story.language);
    }
    corpus::BenchmarkBuild build = corpus::build_benchmark(
        raw, plan, seed, lex ? &*lex : nullptr,
        static_cast<std::size_t>(std::max(parallel, 1)));

    corpus::write_benchmark(build, out_dir / "corpus.jsonl",
                            out_dir / "manifest.json");
    std::cout << "wrote " << build.stories.size() << " stories to "
              << (out_dir / "corpus.jsonl").string() << "\n";
    if (!build.manifest.skipped_ids.empty()) {
        std::cout << "skipped " << build.manifest.skipped_ids.size()
                  << " infeasible stories (listed in manifest)\n";
    }
    return 0;
}

// -----------------------------------------------------------------------
// bench
// -----------------------------------------------------------------------

int run_bench(const CommonOpts& o, const std::string& corpus_path,
              const std::string& strategies_csv, bool ablation,
              const std::string& reference) {
    fs::path out_dir(o.out_dir);
    fs::create_directories(out_dir);

    std::vector<AnnotatedStory> corpus = corpus::load_corpus(corpus_path);
    if (reference == "gold") {
        for (auto& s : corpus) s.human_scores.reset();
    } else if (reference == "human") {
        for (const auto& s : corpus) {
            if (!s.human_scores) {
                std::cerr << "bench: --reference human requires human_scores "
                             "on every story (missing on '"
                          << s.story.id << "')\n";
                return 1;
            }
        }
    }

    engine::EngineOptions eng_opts;
    eng_opts.checkpoint_dir = out_dir / "checkpoints";
    engine::DiscussionEngine eng(eng_opts);
    auto budget = std::make_shared<std::atomic<int>>(o.max_calls);
    bench::AgentFactory factory = make_factory(o, out_dir, budget);

    bench::BenchConfig config;
    config.parallel = static_cast<std::size_t>(std::max(o.parallel, 1));
    config.progress_path = out_dir / "progress.jsonl";

    bench::CorrelationTable table;
    if (ablation) {
        Strategy base = make_strategy(o);
        if (base.variant != StrategyVariant::SR_COT) {
            base = Strategy::mateval();
        }
        table = bench::run_ablation(eng, corpus, base, factory, config);
    } else {
        std::vector<Strategy> strategies;
        std::stringstream ss(strategies_csv);
        std::string token;
        while (std::getline(ss, token, ',')) {
            if (token.empty()) continue;
            auto v = strategy_variant_from_string(token);
            if (!v) {
                std::cerr << "bench: unknown strategy '" << token << "'\n";
                return 1;
            }
            CommonOpts per = o;
            per.strategy = token;
            strategies.push_back(make_strategy(per));
        }
        if (strategies.empty()) {
            std::cerr << "bench: no strategies given\n";
            return 1;
        }
        table = bench::run_benchmark(eng, corpus, strategies, factory, config);
    }

    {
        std::ofstream csv(out_dir / "correlations.csv");
        csv << table.to_csv();
    }
    {
        std::ofstream js(out_dir / "correlations.json");
        js << table.to_json().dump(2) << '\n';
    }
    bench::write_story_scores(table, out_dir / "story_scores.jsonl");

    std::cout << table.to_csv();
    int excluded_total = 0;
    for (int e : table.excluded_counts) excluded_total += e;
    if (excluded_total > 0) {
        std::cout << "excluded samples: " << excluded_total
                  << " (see story_scores.jsonl)\n";
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "mateval: multi-agent discussion engine for open-ended story "
        "evaluation"};
    app.set_config("--config", "", "INI config file (lowest precedence)");
    app.require_subcommand(1);

    CommonOpts opts;

    // evaluate
    auto* evaluate = app.add_subcommand(
        "evaluate", "run discussions over a story or corpus, write reports");
    std::string story_path, story_id, language = "en", corpus_path;
    evaluate->add_option("--story", story_path, "plain-text story file");
    evaluate->add_option("--id", story_id, "story id (default: file stem)");
    evaluate->add_option("--language", language, "language tag (en, zh)");
    evaluate->add_option("--corpus", corpus_path, "JSONL corpus to evaluate");
    add_common_flags(evaluate, opts);

    // build-corpus
    auto* build = app.add_subcommand(
        "build-corpus", "truncate stories and inject seeded gold errors");
    std::string in_path, plan_spec = "rep=1", lexicon_path, build_out = "out";
    std::uint64_t seed = 0;
    std::size_t word_limit = 200;
    bool truncate = true;
    int build_parallel = 1;
    build->add_option("--in", in_path, "raw JSONL corpus")->required();
    build->add_option("--seed", seed, "injection seed");
    build->add_option("--plan", plan_spec, "plan, e.g. rep=1,fer=2");
    build->add_option("--word-limit", word_limit, "truncation word limit");
    build->add_flag("--truncate,!--no-truncate", truncate,
                    "apply sentence-safe truncation first");
    build->add_option("--lexicons", lexicon_path, "lexicon override JSON");
    build->add_option("--out", build_out, "output directory");
    build->add_option("--parallel", build_parallel, "worker threads");

    // bench
    auto* bench_cmd = app.add_subcommand(
        "bench", "correlation benchmark over strategies or ablations");
    std::string bench_corpus, strategies_csv = "sa,o_b_o,sr,cot,sr_cot";
    std::string reference = "auto";
    bool ablation = false;
    bench_cmd->add_option("--corpus", bench_corpus, "annotated JSONL corpus")
        ->required();
    bench_cmd->add_option("--strategies", strategies_csv,
                          "comma list: sa,o_b_o,sr,cot,sr_cot");
    bench_cmd->add_flag("--ablation", ablation,
                        "run the MATEval ablation rows instead");
    bench_cmd->add_option("--reference", reference,
                          "auto | gold | human reference column");
    add_common_flags(bench_cmd, opts);

    // replay
    auto* replay = app.add_subcommand(
        "replay", "re-run an evaluation served from a recorded transcript");
    std::string rp_story, rp_id, rp_language = "en", rp_corpus;
    replay->add_option("--story", rp_story, "plain-text story file");
    replay->add_option("--id", rp_id, "story id (default: file stem)");
    replay->add_option("--language", rp_language, "language tag");
    replay->add_option("--corpus", rp_corpus, "JSONL corpus to evaluate");
    replay->add_option("--transcript", opts.transcript_path, "transcript file")
        ->required();
    add_common_flags(replay, opts, /*with_backend=*/false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the message; bad flags are exit 1, not 109
        return 1;
    }

    try {
        if (evaluate->parsed()) {
            return run_evaluate(opts, story_path, story_id, language,
                                corpus_path);
        }
        if (build->parsed()) {
            return run_build_corpus(in_path, build_out, seed, plan_spec,
                                    word_limit, truncate, lexicon_path,
                                    build_parallel);
        }
        if (bench_cmd->parsed()) {
            return run_bench(opts, bench_corpus, strategies_csv, ablation,
                             reference);
        }
        if (replay->parsed()) {
            CommonOpts ro = opts;
            ro.backend = "replay";
            return run_evaluate(ro, rp_story, rp_id, rp_language, rp_corpus);
        }
    } catch (const AuthMissing& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
