#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "mateval/bench/rank_stats.hpp"
#include "mateval/pipeline.hpp"
#include "mateval/types.hpp"

namespace mateval::bench {

/// Reads the SCORE tokens out of a report's Q&A answers (falling back to
/// the scorecard field when there are no Q&A items). Throws MissingScores
/// for unparsed reports and tampered tokens; callers exclude and count the
/// sample.
ScoreCard extract_scores(const EvaluationReport& report);

/// One evaluated story, as persisted to the per-story scores file.
struct StoryScore {
    std::string story_id;
    std::string strategy_label;
    ScoreCard engine_scores;
    ScoreCard reference_scores;
    bool excluded = false;
    std::string note;  // exclusion reason
};

void to_json(json& j, const StoryScore& s);

/// Table-1-style matrix: rows = strategies, column pairs = rho/tau per
/// error type plus overall. Absent cells mark undefined correlations.
struct CorrelationTable {
    std::vector<std::string> row_labels;
    std::vector<CorrelationResult> rows;
    std::vector<int> excluded_counts;
    std::vector<std::vector<StoryScore>> per_story;  // aligned with rows
    std::string reference;  // which score column served as ground truth

    std::string to_csv() const;
    json to_json() const;
};

/// The agents a single discussion will use. A fresh bundle is requested per
/// (story, strategy) so scripted backends stay confined to one discussion.
struct AgentBundle {
    std::vector<engine::AgentHandle> evaluators;
    engine::SupportAgents support;
};

using AgentFactory =
    std::function<AgentBundle(const AnnotatedStory&, const Strategy&)>;

struct BenchConfig {
    std::size_t parallel = 1;
    /// Incremental per-story persistence (JSONL, completion order); empty
    /// disables it.
    std::filesystem::path progress_path;
};

/// For each strategy x story: run the discussion pipeline, extract engine
/// scores, and correlate them against the reference column (human_scores
/// when a story carries one, else gold_scores), per error type and overall.
/// Aborted or score-less stories are excluded and counted.
CorrelationTable run_benchmark(const engine::DiscussionEngine& eng,
                               const std::vector<AnnotatedStory>& corpus,
                               const std::vector<Strategy>& strategies,
                               const AgentFactory& agents,
                               const BenchConfig& config = {});

/// Ablation sweep: MATEval (the base), MATEval-FB, MATEval-QA,
/// MATEval-multi, over the same corpus and metric machinery.
CorrelationTable run_ablation(const engine::DiscussionEngine& eng,
                              const std::vector<AnnotatedStory>& corpus,
                              const Strategy& base, const AgentFactory& agents,
                              const BenchConfig& config = {});

/// Scripted-agent factory whose agents report exactly the gold errors:
/// decomposition covers the rubric one type per sub-question, statements are
/// canned, and the summary lists the story's gold errors as the findings
/// block. Offline perfect-agreement runs and demos.
AgentFactory gold_script_factory();

/// Writes per-story scores of every row as JSON Lines (story order).
void write_story_scores(const CorrelationTable& table,
                        const std::filesystem::path& path);

}  // namespace mateval::bench
