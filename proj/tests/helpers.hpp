// Shared fixtures for the test suites: a synthetic story generator whose
// vocabulary guarantees injector targets, and an adjacent-duplicate scanner
// kept independent of the library's segmenter.
#pragma once

#include <random>
#include <string>
#include <vector>

#include "mateval/types.hpp"

namespace testutil {

/// Deterministic synthetic story. The vocabulary deliberately contains
/// antonym-table words, negatable verbs, pronouns, fact words, and numbers
/// so every injector can fire.
inline mateval::StoryText random_story(std::mt19937_64& rng, std::string id,
                                       int sentences_min = 5,
                                       int sentences_max = 9) {
    static const char* subjects[] = {"Tom",        "Mia",      "The farmer",
                                     "A sailor",   "Lena",     "The teacher",
                                     "His friend", "The baker"};
    static const char* verbs[] = {"was", "seemed", "felt", "looked"};
    static const char* adjectives[] = {"happy", "big",    "good", "warm",
                                       "strong", "bright", "rich", "tall"};
    static const char* actions[] = {
        "walked to the market",      "counted three coins",
        "watched the sun rise",      "waited for the summer rain",
        "carried water up the hill", "sang near the old mill",
        "fixed the fence at dawn",   "read by the fire"};
    static const char* tails[] = {"before breakfast", "after the long day",
                                  "in the quiet village", "near the river",
                                  "with a steady hand", "under the open sky"};

    auto pick = [&](auto& arr) {
        return arr[rng() % (sizeof(arr) / sizeof(arr[0]))];
    };
    int n = sentences_min +
            static_cast<int>(rng() % (sentences_max - sentences_min + 1));
    std::string body;
    for (int i = 0; i < n; ++i) {
        std::string sentence;
        switch (rng() % 3) {
            case 0:
                sentence = std::string(pick(subjects)) + " " + pick(verbs) + " " +
                           pick(adjectives) + " " + pick(tails) + ".";
                break;
            case 1:
                sentence = std::string(pick(subjects)) + " " + pick(actions) +
                           " " + pick(tails) + ".";
                break;
            default:
                sentence = std::string("He ") + pick(actions) + " and " +
                           pick(verbs) + " " + pick(adjectives) + ".";
                break;
        }
        // A per-sentence marker keeps sentences distinct so accidental
        // adjacent duplicates cannot occur in the source.
        sentence.insert(sentence.size() - 1,
                        " on day " + std::to_string(i + 1));
        if (!body.empty()) body += ' ';
        body += sentence;
    }
    return mateval::StoryText::make(std::move(id), body, "en");
}

/// Independent adjacent-duplicate detector: naive split on .!? followed by
/// a space, whitespace-squeezed comparison of neighbors. Shares no code
/// with the library segmenter.
inline bool has_adjacent_duplicate_sentence(const std::string& body) {
    std::vector<std::string> sentences;
    std::string current;
    for (std::size_t i = 0; i < body.size(); ++i) {
        current += body[i];
        bool terminator = body[i] == '.' || body[i] == '!' || body[i] == '?';
        bool at_end = i + 1 == body.size();
        if (terminator && (at_end || body[i + 1] == ' ')) {
            sentences.push_back(current);
            current.clear();
        }
    }
    if (!current.empty()) sentences.push_back(current);

    auto squeeze = [](const std::string& s) {
        std::string out;
        bool space = false;
        for (char c : s) {
            if (c == ' ' || c == '\t' || c == '\n') {
                space = !out.empty();
                continue;
            }
            if (space) out += ' ';
            space = false;
            out += c;
        }
        return out;
    };
    for (std::size_t i = 0; i + 1 < sentences.size(); ++i) {
        if (!sentences[i].empty() &&
            squeeze(sentences[i]) == squeeze(sentences[i + 1])) {
            return true;
        }
    }
    return false;
}

}  // namespace testutil
