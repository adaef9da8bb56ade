#include "mateval/bench/rank_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mateval::bench {

namespace {

void require_usable(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) {
        throw InvalidState("correlation inputs must have equal length");
    }
    if (xs.size() < 2) throw DegenerateInput("fewer than 2 samples");
    auto constant = [](std::span<const double> v) {
        for (double x : v) {
            if (x != v.front()) return false;
        }
        return true;
    };
    if (constant(xs)) throw DegenerateInput("xs is constant");
    if (constant(ys)) throw DegenerateInput("ys is constant");
}

/// Counts strictly-decreasing pairs in `values` by merge sort.
long long count_inversions(std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<double> buffer(n);
    long long inversions = 0;
    for (std::size_t width = 1; width < n; width *= 2) {
        for (std::size_t lo = 0; lo + width < n; lo += 2 * width) {
            std::size_t mid = lo + width;
            std::size_t hi = std::min(lo + 2 * width, n);
            std::size_t i = lo, j = mid, k = lo;
            while (i < mid && j < hi) {
                if (values[j] < values[i]) {
                    inversions += static_cast<long long>(mid - i);
                    buffer[k++] = values[j++];
                } else {
                    buffer[k++] = values[i++];
                }
            }
            while (i < mid) buffer[k++] = values[i++];
            while (j < hi) buffer[k++] = values[j++];
            std::copy(buffer.begin() + static_cast<long>(lo),
                      buffer.begin() + static_cast<long>(hi),
                      values.begin() + static_cast<long>(lo));
        }
    }
    return inversions;
}

long long tie_pair_count(std::vector<double> sorted) {
    std::sort(sorted.begin(), sorted.end());
    long long pairs = 0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        long long g = static_cast<long long>(j - i);
        pairs += g * (g - 1) / 2;
        i = j;
    }
    return pairs;
}

}  // namespace

std::vector<double> average_ranks(std::span<const double> xs) {
    const std::size_t n = xs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && xs[order[j]] == xs[order[i]]) ++j;
        // 1-based ranks i+1 .. j share their mean.
        double mean = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = mean;
        i = j;
    }
    return ranks;
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
    require_usable(xs, ys);
    std::vector<double> rx = average_ranks(xs);
    std::vector<double> ry = average_ranks(ys);

    const std::size_t n = rx.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double cov = 0.0, vx = 0.0, vy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = rx[i] - mx;
        double dy = ry[i] - my;
        cov += dx * dy;
        vx += dx * dx;
        vy += dy * dy;
    }
    return cov / std::sqrt(vx * vy);
}

double kendall(std::span<const double> xs, std::span<const double> ys) {
    require_usable(xs, ys);
    const std::size_t n = xs.size();

    // Sort by (x, y); discordant pairs are then exactly the strict
    // inversions of the y sequence (Knight's method).
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (xs[a] != xs[b]) return xs[a] < xs[b];
        return ys[a] < ys[b];
    });
    std::vector<double> y_sorted(n);
    for (std::size_t i = 0; i < n; ++i) y_sorted[i] = ys[order[i]];
    long long discordant = count_inversions(y_sorted);

    const long long n0 = static_cast<long long>(n) *
                         static_cast<long long>(n - 1) / 2;
    long long n1 = tie_pair_count({xs.begin(), xs.end()});
    long long n2 = tie_pair_count({ys.begin(), ys.end()});

    // Pairs tied in both coordinates.
    std::vector<std::pair<double, double>> xy(n);
    for (std::size_t i = 0; i < n; ++i) xy[i] = {xs[i], ys[i]};
    std::sort(xy.begin(), xy.end());
    long long n3 = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && xy[j] == xy[i]) ++j;
        long long g = static_cast<long long>(j - i);
        n3 += g * (g - 1) / 2;
        i = j;
    }

    long long concordant = n0 - n1 - n2 + n3 - discordant;
    // Single sqrt of the product keeps perfect squares exact (tie-free
    // 3-sample case must yield 1/3 to the last bit).
    double denom = std::sqrt(static_cast<double>(n0 - n1) *
                             static_cast<double>(n0 - n2));
    return static_cast<double>(concordant - discordant) / denom;
}

}  // namespace mateval::bench
