#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "ergolab/errors.hpp"

namespace ergolab::stats {

inline double mean(std::span<const double> v) {
    if (v.empty()) throw ParameterError("mean of empty sample");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

/// Unbiased sample standard deviation.
inline double stddev(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

inline double standard_error(std::span<const double> v) {
    return stddev(v) / std::sqrt(static_cast<double>(v.size()));
}

/// Linear-interpolation quantile (type 7).
inline double quantile(std::span<const double> v, double q) {
    if (v.empty()) throw ParameterError("quantile of empty sample");
    std::vector<double> s(v.begin(), v.end());
    std::sort(s.begin(), s.end());
    const double pos = q * static_cast<double>(s.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, s.size() - 1);
    return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

inline double median(std::span<const double> v) { return quantile(v, 0.5); }

inline double fraction_at_most(std::span<const double> v, double bound) {
    if (v.empty()) return 0.0;
    const auto n = std::count_if(v.begin(), v.end(), [bound](double x) { return x <= bound; });
    return static_cast<double>(n) / static_cast<double>(v.size());
}

}  // namespace ergolab::stats
