// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one pass/fail line per criterion. Exit code 0 iff all pass.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <thread>

#include <httplib.h>

#include "helpers.hpp"
#include "mateval/bench/bench.hpp"
#include "mateval/corpus/corpus.hpp"
#include "mateval/gateway/http_backend.hpp"
#include "mateval/gateway/transcript.hpp"
#include "mateval/pipeline.hpp"
#include "mateval/text.hpp"
#include "oracles.hpp"

using namespace mateval;
using Clock = std::chrono::steady_clock;

namespace {

struct CheckFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& what) {
    if (!cond) throw CheckFailed(what);
}

// --------------------------------------------------------------------------
// Scripted-run scaffolding
// --------------------------------------------------------------------------

struct Rig {
    std::shared_ptr<gateway::ScriptedBackend> backend;
    std::vector<engine::AgentHandle> evaluators;
    engine::SupportAgents support;

    explicit Rig(int num_agents)
        : backend(std::make_shared<gateway::ScriptedBackend>()) {
        gateway::GenerationParams params;
        for (int a = 1; a <= num_agents; ++a) {
            evaluators.push_back(engine::AgentHandle{
                "eval-" + std::to_string(a), backend, params});
        }
        support.decomposer = engine::AgentHandle{"decomposer", backend, params};
        support.feedback = engine::AgentHandle{"moderator", backend, params};
        support.summarizer = engine::AgentHandle{"summarizer", backend, params};
    }
};

std::string decomposition_reply(int n) {
    json arr = json::array();
    for (int i = 0; i < n; ++i) {
        json q{{"question", "sub-question " + std::to_string(i)}};
        q["target"] = i < 5 ? json(std::string(to_string(kAllErrorTypes[
                                static_cast<std::size_t>(i)])))
                            : json();
        arr.push_back(q);
    }
    return "```json\n" + arr.dump() + "\n```";
}

void load_scripts(gateway::ScriptedBackend& backend, const Strategy& strategy,
                  int rounds, const std::vector<std::string>& guidance) {
    if (strategy.uses_decomposition()) {
        backend.push_reply("decomposer", decomposition_reply(rounds));
    }
    for (int a = 1; a <= strategy.num_agents; ++a) {
        std::string id = "eval-" + std::to_string(a);
        for (int r = 0; r < rounds; ++r) {
            backend.push_reply(id, "p-" + id + "-r" + std::to_string(r));
            if (strategy.uses_reflection()) {
                backend.push_reply(id, "x-" + id + "-r" + std::to_string(r));
            }
        }
    }
    if (strategy.feedback_enabled && strategy.variant != StrategyVariant::SA) {
        for (int r = 0; r < rounds; ++r) {
            std::string g = r < static_cast<int>(guidance.size())
                                ? guidance[static_cast<std::size_t>(r)]
                                : "carry on";
            backend.push_reply("moderator", g + "\nVERDICT: DISAGREEMENT");
        }
    }
    backend.push_reply("summarizer", "panel summary\n```json\n[]\n```");
}

StoryText demo_story() {
    return StoryText::make(
        "demo",
        "Tom walked to the market. He bought three apples. The sun was warm. "
        "A dog followed him home. Tom shared the apples.",
        "en");
}

std::vector<ErrorType> full_rubric() {
    return {kAllErrorTypes.begin(), kAllErrorTypes.end()};
}

bool mentions(const gateway::Conversation& conv, const std::string& text) {
    for (const auto& m : conv) {
        if (m.content.find(text) != std::string::npos) return true;
    }
    return false;
}

std::vector<AnnotatedStory> seeded_varied_corpus(int n_stories,
                                                 std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<AnnotatedStory> raw;
    for (int i = 0; i < n_stories; ++i) {
        AnnotatedStory s;
        s.story = testutil::random_story(rng, "a" + std::to_string(i), 8, 12);
        s.gold_scores = ScoreCard::zeros();
        raw.push_back(std::move(s));
    }
    std::vector<corpus::InjectionPlan> plans = {
        {},
        {{ErrorType::REP, 1}},
        {{ErrorType::REP, 1}, {ErrorType::LINC, 1}},
        {{ErrorType::REP, 1},
         {ErrorType::LINC, 1},
         {ErrorType::DCONT, 1},
         {ErrorType::ILC, 1},
         {ErrorType::FER, 1}},
    };
    std::vector<AnnotatedStory> out;
    for (std::size_t g = 0; g < plans.size(); ++g) {
        std::vector<AnnotatedStory> group;
        for (std::size_t i = g; i < raw.size(); i += plans.size()) {
            group.push_back(raw[i]);
        }
        auto build = corpus::build_benchmark(group, plans[g], seed + g);
        for (auto& s : build.stories) out.push_back(std::move(s));
    }
    require(out.size() == static_cast<std::size_t>(n_stories),
            "corpus builder skipped stories unexpectedly");
    return out;
}

// --------------------------------------------------------------------------
// Criteria
// --------------------------------------------------------------------------

void criterion_01_orchestration_determinism() {
    engine::DiscussionEngine eng;
    auto run = [&] {
        Rig rig(2);
        load_scripts(*rig.backend, Strategy::mateval(), 5,
                     {"g0", "g1", "g2", "g3", "g4"});
        auto task = engine::EvaluationTask::make(demo_story(), full_rubric(),
                                                 Strategy::mateval());
        auto t = eng.run_discussion(task, rig.evaluators, rig.support);
        return json(t).dump();
    };
    std::string dump1 = run();
    std::string dump2 = run();
    require(dump1 == dump2, "two runs are not byte-identical");

    Rig rig(2);
    load_scripts(*rig.backend, Strategy::mateval(), 5, {});
    auto task = engine::EvaluationTask::make(demo_story(), full_rubric(),
                                             Strategy::mateval());
    auto t = eng.run_discussion(task, rig.evaluators, rig.support);
    require(t.total_statements() == 20,
            "expected 20 statements (5x2x2), got " +
                std::to_string(t.total_statements()));
    require(t.history.feedback().size() == 5,
            "expected 5 feedback notes, got " +
                std::to_string(t.history.feedback().size()));
    require(!t.raw_summary.empty(), "missing summary");
}

void criterion_02_algorithm_structure() {
    engine::DiscussionEngine eng;
    std::mt19937_64 rng(21);
    for (StrategyVariant variant : {StrategyVariant::COT, StrategyVariant::SR_COT}) {
        for (int n = 1; n <= 8; ++n) {
            Strategy s;
            s.variant = variant;
            s.num_agents = 1 + static_cast<int>(rng() % 3);
            s.feedback_enabled = rng() % 2 == 0;
            Rig rig(s.num_agents);
            load_scripts(*rig.backend, s, n, {});
            auto task = engine::EvaluationTask::make(
                demo_story(), {ErrorType::REP}, s);
            auto t = eng.run_discussion(task, rig.evaluators, rig.support);
            require(t.completed_rounds == n,
                    "rounds " + std::to_string(t.completed_rounds) +
                        " != decomposition length " + std::to_string(n));
            require(t.sub_questions.size() == static_cast<std::size_t>(n),
                    "sub-question count mismatch");
        }
    }
    // SA: exactly two backend calls.
    Rig rig(1);
    rig.backend->push_reply("eval-1", "one pass");
    rig.backend->push_reply("summarizer", "sum\n```json\n[]\n```");
    auto task = engine::EvaluationTask::make(demo_story(), full_rubric(),
                                             Strategy::single_agent());
    engine::DiscussionEngine eng2;
    eng2.run_discussion(task, rig.evaluators, rig.support);
    require(rig.backend->call_count() == 2,
            "SA made " + std::to_string(rig.backend->call_count()) +
                " calls, expected 2");
}

void criterion_03_feedback_plumbing() {
    engine::DiscussionEngine eng;
    std::mt19937_64 rng(99);
    auto random_guidance = [&] {
        static const char alphabet[] =
            "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 ";
        std::string g = "guidance-";
        std::size_t len = 8 + rng() % 40;
        for (std::size_t i = 0; i < len; ++i) {
            g += alphabet[rng() % (sizeof(alphabet) - 2)];
        }
        return g;
    };

    for (int trial = 0; trial < 10; ++trial) {
        const int rounds = 5;
        std::vector<std::string> guidance;
        for (int r = 0; r < rounds; ++r) guidance.push_back(random_guidance());
        Rig rig(2);
        load_scripts(*rig.backend, Strategy::mateval(), rounds, guidance);
        auto task = engine::EvaluationTask::make(demo_story(), full_rubric(),
                                                 Strategy::mateval());
        eng.run_discussion(task, rig.evaluators, rig.support);

        // Call layout: decompose, then per round 4 evaluator calls + 1
        // feedback call, then the summary.
        const auto& calls = rig.backend->calls();
        require(calls.size() == 27, "unexpected call count");
        for (int r = 1; r < rounds; ++r) {
            for (int offset = 0; offset < 4; ++offset) {
                std::size_t index =
                    1 + static_cast<std::size_t>(r) * 5 +
                    static_cast<std::size_t>(offset);
                require(mentions(calls[index].conversation,
                                 guidance[static_cast<std::size_t>(r - 1)]),
                        "round " + std::to_string(r) +
                            " conversation lacks round-" +
                            std::to_string(r - 1) + " guidance");
            }
        }
        // Round 0 must not see any guidance.
        for (std::size_t index = 1; index <= 4; ++index) {
            require(!mentions(calls[index].conversation, "guidance-"),
                    "round 0 conversation unexpectedly carries guidance");
        }
    }
}

void criterion_04_correlation_oracle_equivalence() {
    std::mt19937_64 rng(20240717);
    int checked = 0;
    while (checked < 1000) {
        std::size_t n = 2 + rng() % 7;
        std::vector<double> xs(n), ys(n);
        for (auto& v : xs) v = static_cast<double>(static_cast<int>(rng() % 4));
        for (auto& v : ys) v = static_cast<double>(static_cast<int>(rng() % 4));
        if (oracles::all_equal(xs) || oracles::all_equal(ys)) continue;
        ++checked;
        double rho = bench::spearman(xs, ys);
        double tau = bench::kendall(xs, ys);
        double rho_oracle = oracles::spearman_oracle(xs, ys);
        double tau_oracle = oracles::kendall_oracle(xs, ys);
        require(std::abs(rho - rho_oracle) <= 1e-12,
                "spearman deviates from oracle by " +
                    std::to_string(std::abs(rho - rho_oracle)));
        require(std::abs(tau - tau_oracle) <= 1e-12,
                "kendall deviates from oracle by " +
                    std::to_string(std::abs(tau - tau_oracle)));
    }
}

void criterion_05_known_values() {
    std::vector<double> xs{1, 2, 3, 4}, ys{2, 1, 4, 3};
    require(bench::spearman(xs, ys) == 0.6,
            "spearman([1,2,3,4],[2,1,4,3]) != 0.6 exactly");
    std::vector<double> ks{1, 2, 3}, kt{1, 3, 2};
    require(bench::kendall(ks, kt) == 1.0 / 3.0,
            "kendall([1,2,3],[1,3,2]) != 1/3 exactly");
}

void criterion_06_perfect_agreement_pipeline() {
    auto corpus = seeded_varied_corpus(20, 8800);
    engine::DiscussionEngine eng;
    auto table = bench::run_benchmark(eng, corpus, {Strategy::mateval()},
                                      bench::gold_script_factory());
    require(table.excluded_counts.at(0) == 0, "stories were excluded");
    int defined = 0;
    for (ErrorType t : kAllErrorTypes) {
        const auto& cell = table.rows.at(0).per_type.at(t);
        if (!cell) continue;
        ++defined;
        require(std::abs(cell->rho - 1.0) <= 1e-12,
                std::string(to_string(t)) + " rho != 1.0");
        require(std::abs(cell->tau - 1.0) <= 1e-12,
                std::string(to_string(t)) + " tau != 1.0");
    }
    require(defined >= 3, "too many degenerate columns in the built corpus");
    require(table.rows.at(0).overall.has_value(), "overall column degenerate");
    require(std::abs(table.rows.at(0).overall->rho - 1.0) <= 1e-12,
            "overall rho != 1.0");
    require(std::abs(table.rows.at(0).overall->tau - 1.0) <= 1e-12,
            "overall tau != 1.0");
}

void criterion_07_scoring_rule() {
    std::mt19937_64 rng(70707);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<Finding> findings;
        std::size_t n = rng() % 16;
        std::array<int, 5> counts{};
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t k = rng() % 5;
            Finding f;
            f.error_type = kAllErrorTypes[k];
            counts[k]++;
            findings.push_back(f);
        }
        ScoreCard card = report::score_findings(findings);
        require(card.total == -static_cast<int>(n), "total != -|findings|");
        for (std::size_t k = 0; k < 5; ++k) {
            require(card.per_type.at(kAllErrorTypes[k]) == -counts[k],
                    "per-type deduction mismatch");
        }
    }
}

void criterion_08_truncation() {
    std::mt19937_64 rng(808);
    for (int trial = 0; trial < 100; ++trial) {
        auto story = testutil::random_story(
            rng, "t" + std::to_string(trial), 15, 45);
        auto outcome = corpus::truncate_text_ex(story, 200);
        const StoryText& out = outcome.story;
        if (!outcome.over_limit) {
            require(out.word_count <= 200,
                    "word count " + std::to_string(out.word_count) +
                        " exceeds the limit without the exception");
        }
        require(story.body.rfind(out.body, 0) == 0,
                "output is not a prefix of the input");
        auto again = corpus::truncate_text(out, 200);
        require(again.body == out.body, "truncation is not idempotent");
    }
}

void criterion_09_injection_soundness() {
    for (ErrorType type : kAllErrorTypes) {
        std::mt19937_64 rng(static_cast<std::uint64_t>(type) * 31 + 9);
        int performed = 0;
        for (int i = 0; performed < 100 && i < 140; ++i) {
            auto story = testutil::random_story(
                rng,
                std::string(to_string(type)) + "-" + std::to_string(i), 6, 10);
            corpus::InjectionResult result;
            try {
                result = corpus::inject_errors(story, {{type, 1}},
                                               7000 + static_cast<std::uint64_t>(i));
            } catch (const NoLexicalTarget&) {
                continue;
            }
            ++performed;
            require(result.errors.size() == 1, "gold count != plan count");
            const auto& e = result.errors.at(0);
            require(text::contains_normalized(result.story.body,
                                              e.perturbed_excerpt),
                    "perturbed excerpt does not locate");
            require(text::contains_normalized(story.body, e.original_excerpt),
                    "original excerpt does not locate");
            auto replay = corpus::inject_errors(
                story, {{type, 1}}, 7000 + static_cast<std::uint64_t>(i));
            require(replay.story.body == result.story.body,
                    "injection is not deterministic under a fixed seed");
            if (type == ErrorType::REP) {
                require(testutil::has_adjacent_duplicate_sentence(
                            result.story.body),
                        "independent scanner finds no adjacent duplicate");
            }
        }
        require(performed == 100,
                std::string(to_string(type)) +
                    ": fewer than 100 feasible injections");
    }
}

void criterion_10_ablation_identities() {
    engine::DiscussionEngine eng;

    // MATEval-multi is structurally SA: same calls, same template names.
    auto run_single = [&](const Strategy& s) {
        Rig rig(1);
        rig.backend->push_reply("eval-1", "one shot");
        rig.backend->push_reply("summarizer", "sum\n```json\n[]\n```");
        auto task =
            engine::EvaluationTask::make(demo_story(), full_rubric(), s);
        auto t = eng.run_discussion(task, rig.evaluators, rig.support);
        return std::make_pair(t.prompt_sequence, rig.backend->call_count());
    };
    auto [seq_multi, calls_multi] = run_single(Strategy::mateval_minus_multi());
    auto [seq_sa, calls_sa] = run_single(Strategy::single_agent());
    require(seq_multi == seq_sa && calls_multi == calls_sa,
            "MATEval-multi is not structurally identical to SA");

    // MATEval-FB: zero feedback notes.
    {
        Rig rig(2);
        load_scripts(*rig.backend, Strategy::mateval_minus_feedback(), 5, {});
        auto task = engine::EvaluationTask::make(
            demo_story(), full_rubric(), Strategy::mateval_minus_feedback());
        auto t = eng.run_discussion(task, rig.evaluators, rig.support);
        require(t.history.feedback().empty(),
                "MATEval-FB transcript contains feedback notes");
    }

    // MATEval-QA: the summarize prompt omits the explanation section.
    {
        Rig rig(2);
        load_scripts(*rig.backend, Strategy::mateval_minus_qa(), 5, {});
        auto task = engine::EvaluationTask::make(demo_story(), full_rubric(),
                                                 Strategy::mateval_minus_qa());
        eng.run_discussion(task, rig.evaluators, rig.support);
        const auto& calls = rig.backend->calls();
        const auto& summary_call = calls.back();
        require(summary_call.agent_id == "summarizer", "unexpected call order");
        require(!mentions(summary_call.conversation,
                          gateway::PromptCatalog::explanation_request_section()),
                "MATEval-QA summary prompt still requests explanations");
    }
    {
        Rig rig(2);
        load_scripts(*rig.backend, Strategy::mateval(), 5, {});
        auto task = engine::EvaluationTask::make(demo_story(), full_rubric(),
                                                 Strategy::mateval());
        eng.run_discussion(task, rig.evaluators, rig.support);
        require(mentions(rig.backend->calls().back().conversation,
                         gateway::PromptCatalog::explanation_request_section()),
                "full MATEval summary prompt lacks the explanation request");
    }
}

void criterion_11_report_round_trip() {
    std::mt19937_64 rng(1111);
    auto story = demo_story();
    auto task = engine::EvaluationTask::make(story, full_rubric(),
                                             Strategy::mateval());
    auto sentences = text::sentence_list(story.body);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<Finding> findings;
        std::size_t n = rng() % 12;
        for (std::size_t i = 0; i < n; ++i) {
            Finding f;
            f.error_type = kAllErrorTypes[rng() % 5];
            f.sentence_index = static_cast<int>(rng() % sentences.size());
            f.excerpt = sentences[static_cast<std::size_t>(f.sentence_index)];
            findings.push_back(f);
        }
        ScoreCard card = report::score_findings(findings);
        EvaluationReport rep;
        rep.findings = findings;
        rep.scorecard = card;
        rep.qa_items = report::render_qa_report(findings, card, task);
        ScoreCard extracted = bench::extract_scores(rep);
        require(extracted.total == card.total, "total does not round-trip");
        for (ErrorType t : kAllErrorTypes) {
            require(extracted.per_type.at(t) == card.per_type.at(t),
                    "per-type score does not round-trip");
        }
    }
}

void criterion_12_live_backend_protocol() {
    setenv("MATEVAL_API_KEY", "acceptance-key", 1);

    struct Stub {
        httplib::Server server;
        std::thread thread;
        std::atomic<int> hits{0};
        int port = 0;
        explicit Stub(std::function<void(int, httplib::Response&)> handler) {
            server.Post("/v1/chat/completions",
                        [this, handler = std::move(handler)](
                            const httplib::Request&, httplib::Response& res) {
                            handler(hits.fetch_add(1), res);
                        });
            port = server.bind_to_any_port("127.0.0.1");
            thread = std::thread([this] { server.listen_after_bind(); });
            server.wait_until_ready();
        }
        ~Stub() {
            server.stop();
            thread.join();
        }
    };
    auto ok_body = [](const std::string& content) {
        json j = {{"choices",
                   {{{"message",
                      {{"role", "assistant"}, {"content", content}}}}}}};
        return j.dump();
    };
    gateway::HttpChatBackend::Options opts;
    opts.retry.max_attempts = 4;
    opts.retry.initial_delay = std::chrono::milliseconds(5);
    opts.retry.max_delay = std::chrono::milliseconds(500);
    gateway::Conversation conv{gateway::Message::system("sys"),
                               gateway::Message::user("hello")};

    // 429,429,200 -> success with strictly increasing backoff delays.
    {
        Stub stub([&](int hit, httplib::Response& res) {
            if (hit < 2) {
                res.status = 429;
                res.set_content("slow down", "text/plain");
            } else {
                res.set_content(ok_body("ok"), "application/json");
            }
        });
        opts.base_url = "http://127.0.0.1:" + std::to_string(stub.port) + "/v1";
        gateway::HttpChatBackend backend(opts);
        require(backend.complete("eval-1", conv, {}) == "ok",
                "429,429,200 did not succeed");
        auto delays = backend.last_retry_delays();
        require(delays.size() == 2, "expected two recorded backoff delays");
        require(delays[0] < delays[1], "backoff delays are not increasing");
    }

    // Persistent failure -> BackendExhausted.
    {
        Stub stub([](int, httplib::Response& res) {
            res.status = 503;
            res.set_content("unavailable", "text/plain");
        });
        opts.base_url = "http://127.0.0.1:" + std::to_string(stub.port) + "/v1";
        gateway::HttpChatBackend backend(opts);
        bool exhausted = false;
        try {
            backend.complete("eval-1", conv, {});
        } catch (const BackendExhausted&) {
            exhausted = true;
        }
        require(exhausted, "persistent 5xx did not raise BackendExhausted");
    }

    // Transcript replay serves recorded replies byte-identically.
    {
        Stub stub([&](int, httplib::Response& res) {
            res.set_content(ok_body("recorded reply"), "application/json");
        });
        opts.base_url = "http://127.0.0.1:" + std::to_string(stub.port) + "/v1";
        auto live = std::make_shared<gateway::HttpChatBackend>(opts);
        auto dir = std::filesystem::temp_directory_path() / "mateval_acceptance";
        std::filesystem::create_directories(dir);
        auto path = dir / "replay.jsonl";
        std::filesystem::remove(path);
        auto writer = std::make_shared<gateway::TranscriptWriter>(path);
        gateway::RecordingBackend recording(live, writer);
        std::string first = recording.complete("eval-1", conv, {});
        auto replay = gateway::ReplayBackend::load(path);
        require(replay->complete("eval-1", conv, {}) == first,
                "replay is not byte-identical");
        bool missed = false;
        try {
            gateway::Conversation other{gateway::Message::system("sys"),
                                        gateway::Message::user("unseen")};
            replay->complete("eval-1", other, {});
        } catch (const ReplayMiss&) {
            missed = true;
        }
        require(missed, "unrecorded conversation did not raise ReplayMiss");
    }
}

struct Criterion {
    int id;
    const char* title;
    std::function<void()> fn;
    double budget_seconds;  // 0 = no budget
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "orchestration determinism (SR+CoT, 20 statements, 5 notes)",
         criterion_01_orchestration_determinism, 1.0},
        {2, "Algorithm 1 structure (rounds = |D(Q)|; SA = 2 calls)",
         criterion_02_algorithm_structure, 0.0},
        {3, "feedback plumbing (guidance reaches round k+1 verbatim)",
         criterion_03_feedback_plumbing, 0.0},
        {4, "correlation oracle equivalence (1000 vectors, 1e-12)",
         criterion_04_correlation_oracle_equivalence, 5.0},
        {5, "known values (spearman 0.6, kendall 1/3, exact)",
         criterion_05_known_values, 0.0},
        {6, "perfect-agreement pipeline (20-story corpus, rho=tau=1)",
         criterion_06_perfect_agreement_pipeline, 10.0},
        {7, "scoring rule (1000 random finding multisets)",
         criterion_07_scoring_rule, 0.0},
        {8, "truncation (bound, prefix, idempotence on 100 stories)",
         criterion_08_truncation, 0.0},
        {9, "injection soundness (100 seeded injections per type)",
         criterion_09_injection_soundness, 0.0},
        {10, "ablation identities (-multi = SA, -FB no notes, -QA prompt)",
         criterion_10_ablation_identities, 0.0},
        {11, "report round-trip (SCORE tokens reconstruct the scorecard)",
         criterion_11_report_round_trip, 0.0},
        {12, "live-backend protocol (429 backoff, exhaustion, replay)",
         criterion_12_live_backend_protocol, 0.0},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        auto start = Clock::now();
        std::string failure;
        try {
            c.fn();
        } catch (const std::exception& e) {
            failure = e.what();
        }
        double seconds =
            std::chrono::duration<double>(Clock::now() - start).count();
        if (failure.empty() && c.budget_seconds > 0 &&
            seconds > c.budget_seconds) {
            failure = "runtime " + std::to_string(seconds) + "s exceeds " +
                      std::to_string(c.budget_seconds) + "s budget";
        }
        if (failure.empty()) {
            std::printf("PASS criterion %2d (%.3fs): %s\n", c.id, seconds,
                        c.title);
        } else {
            ++failures;
            std::printf("FAIL criterion %2d (%.3fs): %s -- %s\n", c.id, seconds,
                        c.title, failure.c_str());
        }
    }
    if (failures > 0) {
        std::printf("%d of %zu criteria failed\n", failures, criteria.size());
        return 1;
    }
    std::printf("all %zu criteria passed\n", criteria.size());
    return 0;
}
