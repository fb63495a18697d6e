#pragma once

#include <span>
#include <stdexcept>
#include <vector>

namespace persuasion {

// n evenly spaced points from a to b inclusive.
inline std::vector<double> linspace(double a, double b, std::size_t n) {
    if (n == 0) {
        throw std::invalid_argument("linspace: n must be positive");
    }
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = a;
        return out;
    }
    const double step = (b - a) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = a + step * static_cast<double>(i);
    }
    out.back() = b;
    return out;
}

// Pairwise summation; the reduction order depends only on the length, so
// results are reproducible regardless of how values were produced.
inline double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 8) {
        double s = 0.0;
        for (double x : xs) {
            s += x;
        }
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

} // namespace persuasion
