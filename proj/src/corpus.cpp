#include "mateval/corpus/corpus.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <thread>

#include "mateval/text.hpp"

namespace mateval::corpus {

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

namespace {

/// Bounded draw via modulo: bias is irrelevant at our range sizes and the
/// result is identical on every standard library (uniform_int_distribution
/// is not specified bit-for-bit; mt19937_64 is).
std::size_t bounded(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
}

}  // namespace

// ---------------------------------------------------------------------------
// Corpus I/O
// ---------------------------------------------------------------------------

std::vector<AnnotatedStory> load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidState("cannot open corpus " + path.string());
    std::vector<AnnotatedStory> corpus;
    std::set<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        AnnotatedStory story;
        try {
            story = json::parse(line).get<AnnotatedStory>();
        } catch (const std::exception& e) {
            throw MalformedLine(line_no, e.what());
        }
        auto violations = story.validate();
        if (!violations.empty()) throw MalformedLine(line_no, violations.front());
        if (!ids.insert(story.story.id).second) {
            throw MalformedLine(line_no, "duplicate id '" + story.story.id + "'");
        }
        corpus.push_back(std::move(story));
    }
    return corpus;
}

void save_corpus(const std::vector<AnnotatedStory>& corpus,
                 const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) throw InvalidState("cannot write corpus " + path.string());
    for (const auto& story : corpus) out << json(story).dump() << '\n';
}

// ---------------------------------------------------------------------------
// Truncation
// ---------------------------------------------------------------------------

TruncationOutcome truncate_text_ex(const StoryText& story,
                                   std::size_t word_limit) {
    if (word_limit < 1) throw InvalidState("word_limit must be >= 1");
    auto spans = text::segment_sentences(story.body);
    if (spans.empty()) return {story, false};

    std::size_t words = 0;
    std::size_t end_offset = 0;
    bool over_limit = false;
    for (const auto& span : spans) {
        std::size_t w = text::count_words(
            story.body.substr(span.offset, span.length), story.language);
        if (words + w <= word_limit) {
            words += w;
            end_offset = span.offset + span.length;
        } else {
            break;
        }
    }
    if (end_offset == 0) {
        // First sentence alone exceeds the limit: keep it whole.
        end_offset = spans.front().offset + spans.front().length;
        over_limit = true;
    }
    if (end_offset >= story.body.size()) return {story, over_limit};

    StoryText out;
    out.id = story.id;
    out.language = story.language;
    out.body = story.body.substr(0, end_offset);
    out.word_count = text::count_words(out.body, out.language);
    return {std::move(out), over_limit};
}

StoryText truncate_text(const StoryText& story, std::size_t word_limit) {
    return truncate_text_ex(story, word_limit).story;
}

// ---------------------------------------------------------------------------
// Injection engine
// ---------------------------------------------------------------------------

namespace {

struct TokenHit {
    std::size_t sentence;  // index into the working sentence list
    std::size_t offset;    // byte offset of the token inside the sentence
    std::size_t length;
    std::string replacement;
    std::string token;
};

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

/// Case-preserving replacement: "Happy" -> "Sad" when the table maps
/// happy -> sad.
std::string match_case(const std::string& original, std::string replacement) {
    if (!original.empty() && !replacement.empty() &&
        std::isupper(static_cast<unsigned char>(original.front()))) {
        replacement.front() = static_cast<char>(
            std::toupper(static_cast<unsigned char>(replacement.front())));
    }
    return replacement;
}

/// Whole-word table hits inside one sentence (ASCII tokenization; CJK keys
/// match as plain substrings since they carry no word boundaries).
void collect_hits(const std::string& sentence, std::size_t sentence_index,
                  const std::map<std::string, std::string>& table,
                  std::vector<TokenHit>& hits) {
    // ASCII word tokens.
    std::size_t i = 0;
    while (i < sentence.size()) {
        if (!is_word_char(sentence[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < sentence.size() && is_word_char(sentence[j])) ++j;
        std::string token = sentence.substr(i, j - i);
        std::string lower = token;
        for (auto& c : lower) {
            c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
        auto it = table.find(lower);
        if (it != table.end()) {
            hits.push_back(TokenHit{sentence_index, i, j - i,
                                    match_case(token, it->second), token});
        }
        i = j;
    }
    // Multibyte keys (CJK) by substring scan.
    for (const auto& [key, value] : table) {
        if (static_cast<unsigned char>(key.front()) < 0x80) continue;
        std::size_t pos = 0;
        while ((pos = sentence.find(key, pos)) != std::string::npos) {
            hits.push_back(TokenHit{sentence_index, pos, key.size(), value, key});
            pos += key.size();
        }
    }
}

/// Digit runs usable as FER targets.
void collect_digit_hits(const std::string& sentence, std::size_t sentence_index,
                        std::vector<TokenHit>& hits) {
    std::size_t i = 0;
    while (i < sentence.size()) {
        if (!std::isdigit(static_cast<unsigned char>(sentence[i]))) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < sentence.size() &&
               std::isdigit(static_cast<unsigned char>(sentence[j]))) {
            ++j;
        }
        hits.push_back(
            TokenHit{sentence_index, i, j - i, "", sentence.substr(i, j - i)});
        i = j;
    }
}

class Injector {
public:
    Injector(const StoryText& story, std::uint64_t seed, const Lexicons& lex)
        : source_(story), rng_(seed), lex_(lex) {
        for (const auto& span : text::segment_sentences(story.body)) {
            sentences_.push_back(span.str(story.body));
        }
    }

    std::size_t sentence_count() const { return sentences_.size(); }

    InjectionResult run(const InjectionPlan& plan) {
        // Canonical application order: in-place lexical edits first, then
        // reordering edits, then duplication. Later passes only target
        // sentences whose text still occurs in the source, which keeps
        // every original_excerpt anchored there.
        std::vector<ErrorType> tasks;
        for (ErrorType phase : {ErrorType::LINC, ErrorType::ILC, ErrorType::FER,
                                ErrorType::DCONT, ErrorType::REP}) {
            for (const auto& [type, count] : plan) {
                if (type != phase) continue;
                if (count < 0) {
                    throw InfeasiblePlan(std::string(to_string(type)),
                                         "negative count");
                }
                for (int k = 0; k < count; ++k) tasks.push_back(type);
            }
        }
        for (ErrorType t : tasks) apply_one(t);

        InjectionResult result;
        std::string body;
        for (const auto& s : sentences_) {
            if (!body.empty()) body += ' ';
            body += s;
        }
        result.story.id = source_.id;
        result.story.language = source_.language;
        result.story.body = std::move(body);
        result.story.word_count =
            text::count_words(result.story.body, result.story.language);
        result.errors = std::move(errors_);
        relocate_indices(result);
        return result;
    }

private:
    void apply_one(ErrorType type) {
        switch (type) {
            case ErrorType::REP: inject_rep(); break;
            case ErrorType::LINC:
                inject_lexical(type, lex_.antonyms, &lex_.negations);
                break;
            case ErrorType::ILC:
                inject_lexical(type, lex_.pronoun_swaps, nullptr);
                break;
            case ErrorType::FER: inject_fer(); break;
            case ErrorType::DCONT: inject_dcont(); break;
        }
    }

    bool pristine(std::size_t index) const {
        return text::contains_normalized(source_.body, sentences_[index]);
    }

    std::vector<std::size_t> pristine_indices() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < sentences_.size(); ++i) {
            if (pristine(i)) out.push_back(i);
        }
        return out;
    }

    void record(ErrorType type, std::size_t index, std::string original,
                std::string perturbed, std::string description) {
        InjectedError e;
        e.error_type = type;
        e.sentence_index = static_cast<int>(index);
        e.original_excerpt = std::move(original);
        e.perturbed_excerpt = std::move(perturbed);
        e.description = std::move(description);
        errors_.push_back(std::move(e));
    }

    void inject_rep() {
        auto eligible = pristine_indices();
        if (eligible.empty()) {
            throw InfeasiblePlan("REP", "no pristine sentence to duplicate");
        }
        std::size_t i = eligible[bounded(rng_, eligible.size())];
        std::string sentence = sentences_[i];
        sentences_.insert(sentences_.begin() + static_cast<long>(i) + 1, sentence);
        record(ErrorType::REP, i, sentence, sentence,
               "sentence duplicated immediately after itself");
    }

    void inject_lexical(ErrorType type,
                        const std::map<std::string, std::string>& primary,
                        const std::map<std::string, std::string>* fallback) {
        std::vector<TokenHit> hits;
        for (std::size_t i : pristine_indices()) {
            collect_hits(sentences_[i], i, primary, hits);
        }
        const char* route = "primary";
        if (hits.empty() && fallback != nullptr) {
            for (std::size_t i : pristine_indices()) {
                collect_hits(sentences_[i], i, *fallback, hits);
            }
            route = "negation";
        }
        if (hits.empty()) {
            throw NoLexicalTarget(std::string(to_string(type)) +
                                  ": no table hit in any untouched sentence");
        }
        const TokenHit& hit = hits[bounded(rng_, hits.size())];
        apply_hit(type, hit,
                  std::string(route) == "negation"
                      ? "negated '" + hit.token + "' to '" + hit.replacement + "'"
                      : "replaced '" + hit.token + "' with '" + hit.replacement +
                            "'");
    }

    void inject_fer() {
        std::vector<TokenHit> hits;
        for (std::size_t i : pristine_indices()) {
            collect_hits(sentences_[i], i, lex_.fact_flips, hits);
        }
        if (!hits.empty()) {
            const TokenHit& hit = hits[bounded(rng_, hits.size())];
            apply_hit(ErrorType::FER, hit,
                      "flipped fact word '" + hit.token + "' to '" +
                          hit.replacement + "'");
            return;
        }
        // Fallback: rewrite a number so it contradicts the source.
        std::vector<TokenHit> digits;
        for (std::size_t i : pristine_indices()) {
            collect_digit_hits(sentences_[i], i, digits);
        }
        if (digits.empty()) {
            throw NoLexicalTarget(
                "FER: no fact-flip word and no number in any untouched "
                "sentence");
        }
        TokenHit hit = digits[bounded(rng_, digits.size())];
        unsigned long long value = 0;
        bool overflow = hit.token.size() > 12;
        if (!overflow) value = std::stoull(hit.token);
        hit.replacement = overflow
                              ? "9" + hit.token.substr(1)
                              : std::to_string(value + 13 + bounded(rng_, 87));
        apply_hit(ErrorType::FER, hit,
                  "rewrote number " + hit.token + " as " + hit.replacement);
    }

    void apply_hit(ErrorType type, const TokenHit& hit, std::string description) {
        std::string original = sentences_[hit.sentence];
        std::string perturbed = original;
        perturbed.replace(hit.offset, hit.length, hit.replacement);
        sentences_[hit.sentence] = perturbed;
        record(type, hit.sentence, std::move(original), std::move(perturbed),
               std::move(description));
    }

    void inject_dcont() {
        // Mode choice is random, but a swap needs two pristine sentences at
        // distance >= 2; fall back to a splice when none exist.
        bool try_swap = bounded(rng_, 2) == 0;
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        auto eligible = pristine_indices();
        for (std::size_t a = 0; a < eligible.size(); ++a) {
            for (std::size_t b = a + 1; b < eligible.size(); ++b) {
                if (eligible[b] >= eligible[a] + 2) {
                    pairs.emplace_back(eligible[a], eligible[b]);
                }
            }
        }
        if (try_swap && !pairs.empty()) {
            auto [i, j] = pairs[bounded(rng_, pairs.size())];
            std::string original = sentences_[i];
            std::swap(sentences_[i], sentences_[j]);
            record(ErrorType::DCONT, i, original, sentences_[i],
                   "swapped sentences " + std::to_string(i) + " and " +
                       std::to_string(j));
            return;
        }
        // Splice an off-topic sentence after a pristine anchor.
        if (lex_.off_topic.empty()) {
            throw InfeasiblePlan("DCONT", "off-topic pool is empty");
        }
        if (eligible.empty()) {
            throw InfeasiblePlan("DCONT", "no pristine anchor sentence");
        }
        std::string spliced;
        std::size_t pick = bounded(rng_, lex_.off_topic.size());
        for (std::size_t k = 0; k < lex_.off_topic.size(); ++k) {
            const std::string& candidate =
                lex_.off_topic[(pick + k) % lex_.off_topic.size()];
            if (!text::contains_normalized(source_.body, candidate)) {
                spliced = candidate;
                break;
            }
        }
        if (spliced.empty()) {
            throw InfeasiblePlan("DCONT",
                                 "every off-topic sentence already occurs in "
                                 "the story");
        }
        std::size_t anchor = eligible[bounded(rng_, eligible.size())];
        std::string anchor_text = sentences_[anchor];
        sentences_.insert(sentences_.begin() + static_cast<long>(anchor) + 1,
                          spliced);
        record(ErrorType::DCONT, anchor + 1, std::move(anchor_text), spliced,
               "spliced an off-topic sentence into the flow");
    }

    /// Structural edits shift sentence positions, so indices are finalized
    /// against the reassembled body: each error points at the occurrence of
    /// its perturbed excerpt closest to the provisional index.
    void relocate_indices(InjectionResult& result) const {
        auto final_sentences = text::sentence_list(result.story.body);
        std::vector<std::string> normalized;
        normalized.reserve(final_sentences.size());
        for (const auto& s : final_sentences) {
            normalized.push_back(text::normalize_whitespace(s));
        }
        for (auto& e : result.errors) {
            std::string needle = text::normalize_whitespace(e.perturbed_excerpt);
            int best = -1;
            long best_dist = -1;
            for (std::size_t i = 0; i < normalized.size(); ++i) {
                if (normalized[i].find(needle) == std::string::npos) continue;
                long dist = std::labs(static_cast<long>(i) - e.sentence_index);
                if (best < 0 || dist < best_dist) {
                    best = static_cast<int>(i);
                    best_dist = dist;
                }
            }
            if (best >= 0) e.sentence_index = best;
        }
    }

    const StoryText& source_;
    std::mt19937_64 rng_;
    const Lexicons& lex_;
    std::vector<std::string> sentences_;
    std::vector<InjectedError> errors_;
};

}  // namespace

InjectionResult inject_errors(const StoryText& story, const InjectionPlan& plan,
                              std::uint64_t seed, const Lexicons* lexicons) {
    int total = 0;
    for (const auto& [type, count] : plan) total += count;
    if (total == 0) return {story, {}};

    const Lexicons& lex =
        lexicons != nullptr ? *lexicons : Lexicons::builtin(story.language);
    Injector injector(story, seed, lex);
    if (injector.sentence_count() < 3) {
        throw InfeasiblePlan(std::string(to_string(plan.front().first)),
                             "story has fewer than 3 sentences");
    }
    return injector.run(plan);
}

// ---------------------------------------------------------------------------
// Benchmark builder
// ---------------------------------------------------------------------------

ScoreCard score_injected(const std::vector<InjectedError>& errors) {
    ScoreCard card = ScoreCard::zeros();
    for (const auto& e : errors) card.per_type[e.error_type] -= 1;
    card.total = -static_cast<int>(errors.size());
    return card;
}

void to_json(json& j, const BenchmarkManifest& m) {
    json dist = json::array();
    for (const auto& [type, count] : m.distribution) {
        dist.push_back(json{{"error_type", std::string(to_string(type))},
                            {"count", count}});
    }
    j = json{{"seed", m.seed},
             {"distribution", std::move(dist)},
             {"skipped_ids", m.skipped_ids},
             {"source_checksum", m.source_checksum}};
}

void from_json(const json& j, BenchmarkManifest& m) {
    m.seed = j.at("seed").get<std::uint64_t>();
    m.distribution.clear();
    for (const auto& entry : j.at("distribution")) {
        auto t = error_type_from_string(entry.at("error_type").get<std::string>());
        if (!t) {
            throw InvalidState("unknown error type in manifest: " +
                               entry.at("error_type").get<std::string>());
        }
        m.distribution.emplace_back(*t, entry.at("count").get<int>());
    }
    m.skipped_ids = j.value("skipped_ids", std::vector<std::string>{});
    m.source_checksum = j.value("source_checksum", "");
}

BenchmarkBuild build_benchmark(const std::vector<AnnotatedStory>& corpus,
                               const InjectionPlan& distribution,
                               std::uint64_t seed, const Lexicons* lexicons,
                               std::size_t parallel) {
    std::string canonical;
    for (const auto& s : corpus) canonical += json(s.story).dump() + "\n";

    struct Slot {
        std::optional<AnnotatedStory> story;
        std::string skipped_id;
    };
    std::vector<Slot> slots(corpus.size());

    auto process = [&](std::size_t i) {
        const AnnotatedStory& in = corpus[i];
        std::uint64_t story_seed = splitmix64(seed ^ fnv1a64(in.story.id));
        try {
            InjectionResult injected =
                inject_errors(in.story, distribution, story_seed, lexicons);
            AnnotatedStory out;
            out.story = std::move(injected.story);
            out.gold_errors = std::move(injected.errors);
            out.gold_scores = score_injected(out.gold_errors);
            out.human_scores = in.human_scores;
            slots[i].story = std::move(out);
        } catch (const Error&) {
            slots[i].skipped_id = in.story.id;
        }
    };

    if (parallel <= 1 || corpus.size() < 2) {
        for (std::size_t i = 0; i < corpus.size(); ++i) process(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        std::size_t n_workers = std::min(parallel, corpus.size());
        for (std::size_t w = 0; w < n_workers; ++w) {
            workers.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < corpus.size();
                     i = next.fetch_add(1)) {
                    process(i);
                }
            });
        }
        for (auto& t : workers) t.join();
    }

    BenchmarkBuild build;
    build.manifest.seed = seed;
    build.manifest.distribution = distribution;
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonical)));
    build.manifest.source_checksum = hex;
    for (auto& slot : slots) {
        if (slot.story) {
            build.stories.push_back(std::move(*slot.story));
        } else if (!slot.skipped_id.empty()) {
            build.manifest.skipped_ids.push_back(std::move(slot.skipped_id));
        }
    }
    return build;
}

void write_benchmark(const BenchmarkBuild& build,
                     const std::filesystem::path& corpus_path,
                     const std::filesystem::path& manifest_path) {
    save_corpus(build.stories, corpus_path);
    if (manifest_path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(manifest_path.parent_path(), ec);
    }
    std::ofstream out(manifest_path);
    if (!out) throw InvalidState("cannot write manifest " + manifest_path.string());
    out << json(build.manifest).dump(2) << '\n';
}

InjectionPlan parse_plan(const std::string& spec) {
    InjectionPlan plan;
    std::size_t pos = 0;
    while (pos < spec.size()) {
        auto comma = spec.find(',', pos);
        std::string item = spec.substr(
            pos, comma == std::string::npos ? std::string::npos : comma - pos);
        pos = comma == std::string::npos ? spec.size() : comma + 1;
        if (item.empty()) continue;
        auto eq = item.find('=');
        std::string name = item.substr(0, eq);
        for (auto& c : name) c = c >= 'a' && c <= 'z' ? char(c - 32) : c;
        auto type = error_type_from_string(name);
        if (!type) throw InvalidState("unknown error type in plan: " + item);
        int count = 1;
        if (eq != std::string::npos) count = std::stoi(item.substr(eq + 1));
        plan.emplace_back(*type, count);
    }
    return plan;
}

}  // namespace mateval::corpus
