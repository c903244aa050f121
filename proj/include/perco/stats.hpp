#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>

namespace perco {

struct Summary {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;  // sample variance (n - 1 denominator)

    double stderr_() const { return n > 1 ? std::sqrt(variance / static_cast<double>(n)) : 0.0; }
    double ci_lo() const { return mean - 1.959963984540054 * stderr_(); }
    double ci_hi() const { return mean + 1.959963984540054 * stderr_(); }
};

/// Two-pass mean and variance over values in index order.
inline Summary summarize(std::span<const double> xs) {
    Summary s;
    s.n = xs.size();
    if (s.n == 0) return s;
    double sum = 0.0;
    for (double x : xs) sum += x;
    s.mean = sum / static_cast<double>(s.n);
    if (s.n > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.variance = ss / static_cast<double>(s.n - 1);
    }
    return s;
}

/// Wilson score interval for k successes out of n at 95%.
inline std::pair<double, double> wilson_interval(std::size_t k, std::size_t n) {
    if (n == 0) return {0.0, 1.0};
    const double z = 1.959963984540054;
    const double nn = static_cast<double>(n);
    const double phat = static_cast<double>(k) / nn;
    const double denom = 1 + z * z / nn;
    const double center = (phat + z * z / (2 * nn)) / denom;
    const double half = z * std::sqrt(phat * (1 - phat) / nn + z * z / (4 * nn * nn)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

}  // namespace perco
