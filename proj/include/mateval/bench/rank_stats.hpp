#pragma once

#include <span>
#include <vector>

#include "mateval/errors.hpp"

namespace mateval::bench {

/// Spearman rank correlation, tie-safe general form: average ranks are
/// assigned to ties and the result is the Pearson correlation of the rank
/// vectors. Throws DegenerateInput when either list is constant or shorter
/// than 2 — the coefficient is undefined there, not zero.
double spearman(std::span<const double> xs, std::span<const double> ys);

/// Kendall correlation, tau-b (tie corrected in both rankings). Equals
/// (concordant - discordant) / (n(n-1)/2) on tie-free data. Same
/// degenerate-input contract as spearman.
double kendall(std::span<const double> xs, std::span<const double> ys);

/// Average ranks (1-based, ties share their mean rank). Exposed for tests.
std::vector<double> average_ranks(std::span<const double> xs);

}  // namespace mateval::bench
