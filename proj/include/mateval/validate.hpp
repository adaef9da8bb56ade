#pragma once

#include <string>
#include <vector>

#include "mateval/types.hpp"

namespace mateval {

/// Checks a report against its story: every finding excerpt must occur in
/// the body (whitespace-normalized exact match), sentence indices must be
/// in range, and the scorecard must match the findings under the deduction
/// rule. Violations are returned, never thrown; empty result = valid.
std::vector<std::string> validate_report(const EvaluationReport& report,
                                         const StoryText& story);

}  // namespace mateval
