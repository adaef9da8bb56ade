#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "mateval/corpus/lexicons.hpp"
#include "mateval/types.hpp"

namespace mateval::corpus {

// ---------------------------------------------------------------------------
// Deterministic seeding helpers (documented in the README: mt19937_64 with
// modulo-bounded draws; per-story seeds via splitmix64(seed ^ fnv1a64(id))).
// ---------------------------------------------------------------------------

std::uint64_t fnv1a64(std::string_view data);
std::uint64_t splitmix64(std::uint64_t x);

// ---------------------------------------------------------------------------
// Corpus I/O (JSON Lines, one story per line)
// ---------------------------------------------------------------------------

/// Parses and validates every line. Stories without annotations load with
/// empty gold fields. Throws MalformedLine (naming the line and story) on
/// parse or invariant failures, and on duplicate ids. An empty file is an
/// empty corpus, not an error.
std::vector<AnnotatedStory> load_corpus(const std::filesystem::path& path);

void save_corpus(const std::vector<AnnotatedStory>& corpus,
                 const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Truncation
// ---------------------------------------------------------------------------

struct TruncationOutcome {
    StoryText story;
    bool over_limit = false;  // single-sentence exception fired
};

/// Longest prefix of whole sentences whose word count stays within the
/// limit. When the first sentence alone exceeds the limit it is kept whole
/// (integrity beats the limit) and over_limit is set. The output body is a
/// character prefix of the input body.
TruncationOutcome truncate_text_ex(const StoryText& story,
                                   std::size_t word_limit = 200);

StoryText truncate_text(const StoryText& story, std::size_t word_limit = 200);

// ---------------------------------------------------------------------------
// Error injection
// ---------------------------------------------------------------------------

using InjectionPlan = std::vector<std::pair<ErrorType, int>>;

struct InjectionResult {
    StoryText story;  // perturbed
    std::vector<InjectedError> errors;
};

/// Applies the plan's rule-based perturbations. Deterministic under
/// (story, plan, seed). Requires >= 3 sentences for non-empty plans; an
/// empty plan returns the story untouched. Throws InfeasiblePlan or
/// NoLexicalTarget when a rule cannot fire.
///
/// Rules: REP duplicates a sentence immediately after itself; LINC swaps a
/// word for its antonym or negates a verb; DCONT swaps two non-adjacent
/// sentences or splices in an off-topic sentence; ILC swaps a pronoun or
/// quantifier from a closed table; FER flips a fact word or rewrites a
/// number.
InjectionResult inject_errors(const StoryText& story, const InjectionPlan& plan,
                              std::uint64_t seed,
                              const Lexicons* lexicons = nullptr);

// ---------------------------------------------------------------------------
// Benchmark corpus builder
// ---------------------------------------------------------------------------

struct BenchmarkManifest {
    std::uint64_t seed = 0;
    InjectionPlan distribution;  // fixed per-story plan
    std::vector<std::string> skipped_ids;
    std::string source_checksum;  // fnv1a64 over canonical story JSON, hex
};

void to_json(json& j, const BenchmarkManifest& m);
void from_json(const json& j, BenchmarkManifest& m);

struct BenchmarkBuild {
    std::vector<AnnotatedStory> stories;
    BenchmarkManifest manifest;
};

/// Per story: inject the plan, derive gold scores by the deduction rule.
/// Infeasible stories are skipped and listed in the manifest. Per-story
/// seeds derive from (seed, story id), so rebuilding from the manifest is
/// exact regardless of parallelism.
BenchmarkBuild build_benchmark(const std::vector<AnnotatedStory>& corpus,
                               const InjectionPlan& distribution,
                               std::uint64_t seed,
                               const Lexicons* lexicons = nullptr,
                               std::size_t parallel = 1);

void write_benchmark(const BenchmarkBuild& build,
                     const std::filesystem::path& corpus_path,
                     const std::filesystem::path& manifest_path);

/// Gold scorecard for a set of injected errors under the deduction rule.
ScoreCard score_injected(const std::vector<InjectedError>& errors);

/// Parses "rep=1,fer=2" style plan syntax (case-insensitive type codes).
InjectionPlan parse_plan(const std::string& spec);

}  // namespace mateval::corpus
