#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "mateval/bench/bench.hpp"
#include "mateval/corpus/corpus.hpp"
#include "mateval/text.hpp"
#include "oracles.hpp"

using namespace mateval;
using namespace mateval::bench;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n,
                                  int value_range) {
    // Small integer range makes ties pervasive, like deduction scores.
    std::vector<double> v(n);
    for (auto& x : v) {
        x = static_cast<double>(static_cast<int>(rng() % value_range)) -
            value_range / 2;
    }
    return v;
}

/// A seeded benchmark corpus with per-type count variation across stories,
/// so no correlation column is constant.
std::vector<AnnotatedStory> varied_corpus(int n_stories, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<AnnotatedStory> raw;
    for (int i = 0; i < n_stories; ++i) {
        AnnotatedStory s;
        s.story = testutil::random_story(rng, "v" + std::to_string(i), 8, 12);
        s.gold_scores = ScoreCard::zeros();
        raw.push_back(std::move(s));
    }
    // Four plan groups of increasing severity.
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
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// spearman / kendall
// ---------------------------------------------------------------------------

TEST_CASE("known correlation values") {
    SUBCASE("identical rankings") {
        std::vector<double> xs{1, 2, 3}, ys{10, 20, 30};
        CHECK(spearman(xs, ys) == 1.0);
        CHECK(kendall(xs, ys) == 1.0);
    }
    SUBCASE("reversed rankings") {
        std::vector<double> xs{1, 2, 3}, ys{3, 2, 1};
        CHECK(spearman(xs, ys) == -1.0);
        CHECK(kendall(xs, ys) == -1.0);
    }
    SUBCASE("spearman([1,2,3,4],[2,1,4,3]) is exactly 0.6") {
        std::vector<double> xs{1, 2, 3, 4}, ys{2, 1, 4, 3};
        CHECK(spearman(xs, ys) == 0.6);
        CHECK(spearman(xs, ys) ==
              doctest::Approx(oracles::spearman_tie_free_oracle(xs, ys))
                  .epsilon(1e-15));
    }
    SUBCASE("kendall([1,2,3],[1,3,2]) is exactly 1/3") {
        std::vector<double> xs{1, 2, 3}, ys{1, 3, 2};
        CHECK(kendall(xs, ys) == 1.0 / 3.0);
    }
    SUBCASE("degenerate inputs throw instead of faking zero") {
        std::vector<double> constant{2, 2, 2}, varied{1, 2, 3};
        CHECK_THROWS_AS(spearman(constant, varied), DegenerateInput);
        CHECK_THROWS_AS(spearman(varied, constant), DegenerateInput);
        CHECK_THROWS_AS(kendall(constant, varied), DegenerateInput);
        std::vector<double> one{1}, one2{2};
        CHECK_THROWS_AS(spearman(one, one2), DegenerateInput);
    }
}

TEST_CASE("rank statistics match the brute-force oracles on random vectors") {
    std::mt19937_64 rng(4242);
    int checked = 0;
    while (checked < 1000) {
        std::size_t n = 2 + rng() % 7;  // n <= 8
        auto xs = random_vector(rng, n, 4);
        auto ys = random_vector(rng, n, 4);
        if (oracles::all_equal(xs) || oracles::all_equal(ys)) continue;
        ++checked;
        CAPTURE(checked);
        double rho = spearman(xs, ys);
        double tau = kendall(xs, ys);
        CHECK(rho == doctest::Approx(oracles::spearman_oracle(xs, ys))
                         .epsilon(0)
                         .scale(1)
                         .epsilon(1e-12));
        CHECK(tau == doctest::Approx(oracles::kendall_oracle(xs, ys))
                         .epsilon(0)
                         .scale(1)
                         .epsilon(1e-12));
        CHECK(std::abs(rho) <= 1.0 + 1e-12);
        CHECK(std::abs(tau) <= 1.0 + 1e-12);
    }
}

TEST_CASE("rank statistics are symmetric and rank-invariant") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 3 + rng() % 6;
        auto xs = random_vector(rng, n, 5);
        auto ys = random_vector(rng, n, 5);
        if (oracles::all_equal(xs) || oracles::all_equal(ys)) continue;

        // Symmetry under argument exchange.
        CHECK(spearman(xs, ys) == doctest::Approx(spearman(ys, xs)));
        CHECK(kendall(xs, ys) == doctest::Approx(kendall(ys, xs)));

        // Invariance under a strictly increasing transform.
        auto tx = xs;
        for (auto& v : tx) v = 3.0 * v + 100.0;
        CHECK(spearman(tx, ys) == doctest::Approx(spearman(xs, ys)));
        CHECK(kendall(tx, ys) == doctest::Approx(kendall(xs, ys)));
    }
}

TEST_CASE("negation antisymmetry on tie-free data") {
    std::mt19937_64 rng(13);
    int done = 0;
    while (done < 100) {
        std::size_t n = 3 + rng() % 6;
        // Build tie-free vectors by shuffling distinct values.
        std::vector<double> xs(n), ys(n);
        for (std::size_t i = 0; i < n; ++i) {
            xs[i] = static_cast<double>(i);
            ys[i] = static_cast<double>(i);
        }
        for (std::size_t i = n; i > 1; --i) {
            std::swap(xs[i - 1], xs[rng() % i]);
            std::swap(ys[i - 1], ys[rng() % i]);
        }
        ++done;
        auto neg = ys;
        for (auto& v : neg) v = -v;
        CHECK(kendall(xs, neg) == doctest::Approx(-kendall(xs, ys)));
        CHECK(spearman(xs, neg) == doctest::Approx(-spearman(xs, ys)));
    }
}

// ---------------------------------------------------------------------------
// extract_scores
// ---------------------------------------------------------------------------

TEST_CASE("extract_scores") {
    SUBCASE("reads SCORE tokens per type and total") {
        EvaluationReport report;
        report.qa_items = {
            {"How many REP errors does the story contain, and where?",
             "SCORE: -2\n- sentence 1: \"x\""},
            {"How many FER errors does the story contain, and where?",
             "SCORE: 0"},
            {"What is the total deduction score for the story?", "SCORE: -2"}};
        ScoreCard card = extract_scores(report);
        CHECK(card.per_type.at(ErrorType::REP) == -2);
        CHECK(card.per_type.at(ErrorType::FER) == 0);
        CHECK(card.total == -2);
    }
    SUBCASE("unparsed reports are excluded via MissingScores") {
        EvaluationReport report;
        report.unparsed = true;
        CHECK_THROWS_AS(extract_scores(report), MissingScores);
    }
    SUBCASE("tampered token raises MissingScores with a diagnostic") {
        EvaluationReport report;
        report.qa_items = {{"How many REP errors does the story contain?",
                            "SCORE: x"}};
        try {
            extract_scores(report);
            FAIL("expected MissingScores");
        } catch (const MissingScores& e) {
            CHECK(std::string(e.what()).find("SCORE") != std::string::npos);
        }
    }
    SUBCASE("falls back to the scorecard without qa items") {
        EvaluationReport report;
        report.scorecard = ScoreCard::zeros();
        report.scorecard.per_type[ErrorType::ILC] = -3;
        report.scorecard.total = -3;
        ScoreCard card = extract_scores(report);
        CHECK(card.per_type.at(ErrorType::ILC) == -3);
    }
}

// ---------------------------------------------------------------------------
// run_benchmark / run_ablation
// ---------------------------------------------------------------------------

TEST_CASE("perfect-agreement benchmark yields rho = tau = 1 everywhere") {
    auto corpus = varied_corpus(16, 555);
    engine::DiscussionEngine eng;
    auto table = run_benchmark(eng, corpus, {Strategy::mateval()},
                               gold_script_factory());
    REQUIRE(table.rows.size() == 1);
    CHECK(table.excluded_counts[0] == 0);
    CHECK(table.reference == "gold_scores");
    int defined_cells = 0;
    for (ErrorType t : kAllErrorTypes) {
        const auto& cell = table.rows[0].per_type.at(t);
        if (!cell) continue;
        ++defined_cells;
        CHECK(cell->rho == doctest::Approx(1.0));
        CHECK(cell->tau == doctest::Approx(1.0));
    }
    CHECK(defined_cells >= 3);  // the varied corpus de-degenerates columns
    REQUIRE(table.rows[0].overall.has_value());
    CHECK(table.rows[0].overall->rho == doctest::Approx(1.0));
    CHECK(table.rows[0].overall->tau == doctest::Approx(1.0));
}

TEST_CASE("constant engine scores produce absent cells, not zeros") {
    auto corpus = varied_corpus(8, 556);
    engine::DiscussionEngine eng;
    // Scripted agents that report nothing: SA, empty findings summary.
    AgentFactory silent = [](const AnnotatedStory&, const Strategy& strategy) {
        auto backend = std::make_shared<gateway::ScriptedBackend>();
        gateway::GenerationParams params;
        backend->push_reply("eval-1", "nothing found");
        if (strategy.uses_decomposition()) {
            backend->push_reply("decomposer", "```json\n[]\n```");
        }
        backend->push_reply("summarizer", "```json\n[]\n```");
        AgentBundle b;
        b.evaluators.push_back(engine::AgentHandle{"eval-1", backend, params});
        b.support.decomposer = engine::AgentHandle{"decomposer", backend, params};
        b.support.feedback = engine::AgentHandle{"moderator", backend, params};
        b.support.summarizer = engine::AgentHandle{"summarizer", backend, params};
        return b;
    };
    auto table =
        run_benchmark(eng, corpus, {Strategy::single_agent()}, silent);
    REQUIRE(table.rows.size() == 1);
    for (ErrorType t : kAllErrorTypes) {
        CHECK_FALSE(table.rows[0].per_type.at(t).has_value());
    }
    CHECK_FALSE(table.rows[0].overall.has_value());
    // CSV renders the absent cells as em-dashes.
    CHECK(table.to_csv().find("—") != std::string::npos);
}

TEST_CASE("benchmark is deterministic end-to-end with scripted agents") {
    auto corpus = varied_corpus(8, 557);
    engine::DiscussionEngine eng;
    auto t1 = run_benchmark(eng, corpus, {Strategy::mateval()},
                            gold_script_factory());
    auto t2 = run_benchmark(eng, corpus, {Strategy::mateval()},
                            gold_script_factory());
    CHECK(t1.to_csv() == t2.to_csv());
    CHECK(t1.to_json().dump() == t2.to_json().dump());
}

TEST_CASE("parallel benchmark equals the serial run") {
    auto corpus = varied_corpus(8, 558);
    engine::DiscussionEngine eng;
    BenchConfig serial_cfg;
    BenchConfig parallel_cfg;
    parallel_cfg.parallel = 4;
    auto serial = run_benchmark(eng, corpus, {Strategy::mateval()},
                                gold_script_factory(), serial_cfg);
    auto parallel = run_benchmark(eng, corpus, {Strategy::mateval()},
                                  gold_script_factory(), parallel_cfg);
    CHECK(serial.to_csv() == parallel.to_csv());
}

TEST_CASE("hand-ranked five-story oracle for the overall column") {
    // Engine totals [-1,-2,-3,0,-2] vs reference [-1,-3,-2,0,-2]; the
    // overall rho/tau must match the counting oracles on the same data.
    std::vector<double> engine_totals{-1, -2, -3, 0, -2};
    std::vector<double> reference_totals{-1, -3, -2, 0, -2};

    std::mt19937_64 rng(31337);
    std::vector<AnnotatedStory> corpus;
    for (int i = 0; i < 5; ++i) {
        AnnotatedStory s;
        s.story = testutil::random_story(rng, "h" + std::to_string(i), 8, 10);
        s.gold_scores = ScoreCard::zeros();
        // Reference arrives via human_scores (no gold-consistency coupling).
        ScoreCard human = ScoreCard::zeros();
        human.per_type[ErrorType::REP] =
            static_cast<int>(reference_totals[i]);
        human.total = static_cast<int>(reference_totals[i]);
        s.human_scores = human;
        corpus.push_back(std::move(s));
    }

    // SA agents whose summary lists exactly -total findings, each on a
    // distinct sentence.
    AgentFactory factory = [&](const AnnotatedStory& story,
                               const Strategy& strategy) {
        auto backend = std::make_shared<gateway::ScriptedBackend>();
        gateway::GenerationParams params;
        int story_index = story.story.id.back() - '0';
        int count = -static_cast<int>(engine_totals[story_index]);
        auto sentences = text::sentence_list(story.story.body);
        json findings = json::array();
        for (int k = 0; k < count; ++k) {
            findings.push_back(json{{"error_type", "REP"},
                                    {"sentence_index", k},
                                    {"excerpt", sentences[k]},
                                    {"explanation", "scripted"}});
        }
        backend->push_reply("eval-1", "single pass");
        backend->push_reply("summarizer",
                            "```json\n" + findings.dump() + "\n```");
        AgentBundle b;
        for (int i = 0; i < strategy.num_agents; ++i) {
            b.evaluators.push_back(
                engine::AgentHandle{"eval-1", backend, params});
        }
        b.support.decomposer = engine::AgentHandle{"decomposer", backend, params};
        b.support.feedback = engine::AgentHandle{"moderator", backend, params};
        b.support.summarizer = engine::AgentHandle{"summarizer", backend, params};
        return b;
    };

    engine::DiscussionEngine eng;
    auto table =
        run_benchmark(eng, corpus, {Strategy::single_agent()}, factory);
    CHECK(table.reference == "human_scores");
    REQUIRE(table.rows[0].overall.has_value());
    CHECK(table.rows[0].overall->rho ==
          doctest::Approx(oracles::spearman_oracle(engine_totals,
                                                   reference_totals))
              .epsilon(1e-12));
    CHECK(table.rows[0].overall->tau ==
          doctest::Approx(oracles::kendall_oracle(engine_totals,
                                                  reference_totals))
              .epsilon(1e-12));
}

TEST_CASE("ablation table has the four canonical rows") {
    auto corpus = varied_corpus(8, 559);
    engine::DiscussionEngine eng;
    auto table = run_ablation(eng, corpus, Strategy::mateval(),
                              gold_script_factory());
    REQUIRE(table.row_labels.size() == 4);
    CHECK(table.row_labels[0] == "MATEval");
    CHECK(table.row_labels[1] == "MATEval-FB");
    CHECK(table.row_labels[2] == "MATEval-QA");
    CHECK(table.row_labels[3] == "MATEval-multi");

    SUBCASE("MATEval-multi row equals a direct SA run cell-for-cell") {
        auto sa_table = run_benchmark(eng, corpus, {Strategy::single_agent()},
                                      gold_script_factory());
        CHECK(json(table.rows[3]).dump() == json(sa_table.rows[0]).dump());
    }
}

TEST_CASE("aborting stories are excluded and counted") {
    auto corpus = varied_corpus(6, 560);
    engine::DiscussionEngine eng;
    // Underflow on the second story only.
    AgentFactory flaky = [&](const AnnotatedStory& story,
                             const Strategy& strategy) {
        AgentBundle b = gold_script_factory()(story, strategy);
        if (story.story.id == corpus[1].story.id) {
            // Fresh empty backend: first call underflows, discussion aborts.
            auto empty = std::make_shared<gateway::ScriptedBackend>();
            for (auto& e : b.evaluators) e.backend = empty;
            b.support.decomposer.backend = empty;
            b.support.feedback.backend = empty;
            b.support.summarizer.backend = empty;
        }
        return b;
    };
    engine::EngineOptions opts;
    opts.checkpoint_dir =
        std::filesystem::temp_directory_path() / "mateval_bench_ckpt";
    engine::DiscussionEngine eng2(opts);
    auto table =
        run_benchmark(eng2, corpus, {Strategy::mateval()}, flaky);
    CHECK(table.excluded_counts[0] == 1);
    int excluded = 0;
    for (const auto& s : table.per_story[0]) excluded += s.excluded ? 1 : 0;
    CHECK(excluded == 1);
}
