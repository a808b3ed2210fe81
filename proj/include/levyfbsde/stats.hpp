#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace levyfbsde {

// Pairwise (cascade) summation. The reduction tree depends only on the
// length, so results are identical no matter how the work is scheduled.
inline double pairwise_sum(std::span<const double> v) {
    const std::size_t n = v.size();
    if (n <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

inline double mean(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("mean: empty sample");
    return pairwise_sum(v) / static_cast<double>(v.size());
}

// Unbiased sample variance (two-pass).
inline double variance(std::span<const double> v) {
    if (v.size() < 2) throw std::invalid_argument("variance: need at least 2 samples");
    const double m = mean(v);
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double d = v[i] - m;
        sq[i] = d * d;
    }
    return pairwise_sum(sq) / static_cast<double>(v.size() - 1);
}

inline double std_error_of_mean(std::span<const double> v) {
    return std::sqrt(variance(v) / static_cast<double>(v.size()));
}

struct BatchStats {
    double mean = 0.0;
    double se = 0.0;      // standard error of the batch means
    int batches = 0;
};

// Batch-means estimate: robust to the heavy tails jump samples produce.
inline BatchStats batch_means(std::span<const double> v, int batches = 20) {
    if (batches < 2) throw std::invalid_argument("batch_means: need >= 2 batches");
    if (v.size() < static_cast<std::size_t>(2 * batches))
        throw std::invalid_argument("batch_means: sample too small for batch count");
    std::vector<double> bm(static_cast<std::size_t>(batches));
    const std::size_t n = v.size();
    for (int b = 0; b < batches; ++b) {
        const std::size_t lo = n * static_cast<std::size_t>(b) / static_cast<std::size_t>(batches);
        const std::size_t hi = n * static_cast<std::size_t>(b + 1) / static_cast<std::size_t>(batches);
        bm[static_cast<std::size_t>(b)] = mean(v.subspan(lo, hi - lo));
    }
    BatchStats out;
    out.batches = batches;
    out.mean = mean(bm);
    out.se = std::sqrt(variance(bm) / static_cast<double>(batches));
    return out;
}

}  // namespace levyfbsde
