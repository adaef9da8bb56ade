#include "mateval/validate.hpp"

#include "mateval/text.hpp"

namespace mateval {

std::vector<std::string> validate_report(const EvaluationReport& report,
                                         const StoryText& story) {
    std::vector<std::string> violations;
    const auto sentences = text::segment_sentences(story.body);
    const int sentence_count = static_cast<int>(sentences.size());

    for (const auto& f : report.findings) {
        if (!text::contains_normalized(story.body, f.excerpt)) {
            violations.push_back("finding excerpt not found in story body: \"" +
                                 f.excerpt + "\"");
        }
        if (f.sentence_index < 0 || f.sentence_index >= sentence_count) {
            violations.push_back(
                "finding sentence_index " + std::to_string(f.sentence_index) +
                " out of range [0, " + std::to_string(sentence_count) + ")");
        }
    }

    std::map<ErrorType, int> counts;
    for (ErrorType t : kAllErrorTypes) counts[t] = 0;
    for (const auto& f : report.findings) counts[f.error_type]++;
    for (ErrorType t : kAllErrorTypes) {
        auto it = report.scorecard.per_type.find(t);
        int have = it == report.scorecard.per_type.end() ? 0 : it->second;
        if (have != -counts[t]) {
            violations.push_back("scorecard mismatch for " +
                                 std::string(to_string(t)) + ": have " +
                                 std::to_string(have) + ", findings imply " +
                                 std::to_string(-counts[t]));
        }
    }
    int sum = 0;
    for (const auto& [t, v] : report.scorecard.per_type) sum += v;
    if (report.scorecard.total != sum) {
        violations.push_back("scorecard total " +
                             std::to_string(report.scorecard.total) +
                             " != sum of per-type values " + std::to_string(sum));
    }
    if (report.scorecard.total != -static_cast<int>(report.findings.size())) {
        violations.push_back(
            "scorecard total " + std::to_string(report.scorecard.total) +
            " != -(finding count) " +
            std::to_string(-static_cast<int>(report.findings.size())));
    }
    return violations;
}

}  // namespace mateval
