#pragma once

// Empirical checks of the standing hypotheses on the coefficients and on V.
// The hypotheses are asymptotic; these routines only sample them and report.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "ergolab/models.hpp"
#include "ergolab/oracle.hpp"
#include "ergolab/rng.hpp"

namespace ergolab {

struct GrowthReport {
    double c_hat = 0.0;               // max ratio over every probe
    std::vector<double> ring_ratios;  // max ratio on each probe ring
    bool pass = false;
};

namespace detail {

// Deterministic probe points on the sphere of radius r in R^dim.
inline std::vector<std::vector<double>> ring_points(std::size_t dim, double r, std::size_t samples,
                                                    std::uint64_t ring) {
    if (dim == 1) return {{-r}, {r}};
    const BrownianDriver dirs{0x6A09E667F3BCC908ull, ring, dim};
    std::vector<std::vector<double>> pts;
    pts.reserve(samples);
    for (std::size_t s = 0; s < samples; ++s) {
        std::vector<double> p(dim);
        double norm = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            p[i] = dirs.normal_at(s * dim + i, Stream::auxiliary);
            norm += p[i] * p[i];
        }
        norm = std::sqrt(norm);
        for (double& v : p) v *= r / norm;
        pts.push_back(std::move(p));
    }
    return pts;
}

inline double euclid(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace detail

/// Estimates C in |b(x)| + |sigma(x)|_F <= C (1 + |x|^m) over probe rings of the
/// given (positive, increasing) radii. Passes when the ring maxima on the two
/// largest radii are non-increasing.
inline GrowthReport growth_check(const SdeModel& model, std::span<const double> radii,
                                 std::size_t samples_per_radius = 64) {
    if (radii.size() < 2) throw ParameterError("growth_check needs at least two radii");
    for (std::size_t i = 0; i < radii.size(); ++i)
        if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] > radii[i - 1])))
            throw ParameterError("growth_check radii must be positive and increasing");

    const std::size_t d = model.dim();
    const std::size_t w = model.noise_dim();
    std::vector<double> b(d), s(d * w);
    GrowthReport rep;
    for (std::size_t k = 0; k < radii.size(); ++k) {
        const double r = radii[k];
        const double denom = 1.0 + std::pow(r, model.growth_exponent());
        double ring = 0.0;
        for (const auto& x : detail::ring_points(d, r, samples_per_radius, k)) {
            model.drift(x, b);
            model.diffusion(x, s);
            ring = std::max(ring, (detail::euclid(b) + detail::euclid(s)) / denom);
        }
        rep.ring_ratios.push_back(ring);
        rep.c_hat = std::max(rep.c_hat, ring);
    }
    const double last = rep.ring_ratios.back();
    const double prev = rep.ring_ratios[rep.ring_ratios.size() - 2];
    rep.pass = std::isfinite(last) && last <= prev * (1.0 + 1e-12);
    return rep;
}

struct IntegrabilityResult {
    double delta = 0.0;
    TailVerdict verdict = TailVerdict::inconclusive;
};

/// For each delta, classifies int e^{delta V} dmu from truncations at r1 < r2.
/// Default radii are twice and four times the oracle's grid radius.
inline std::vector<IntegrabilityResult> integrability_probe(const LyapunovSpec& v, const InvariantOracle1D& oracle,
                                                            std::span<const double> deltas, double r1 = 0.0,
                                                            double r2 = 0.0) {
    const double radius = std::max(std::abs(oracle.grid().x_min), std::abs(oracle.grid().x_max));
    if (r1 <= 0.0) r1 = 2.0 * radius;
    if (r2 <= 0.0) r2 = 4.0 * radius;
    std::vector<IntegrabilityResult> out;
    for (double delta : deltas) {
        auto psi = [&](double x) { return std::exp(delta * v(x)); };
        out.push_back({delta, oracle.tail_verdict(psi, r1, r2)});
    }
    return out;
}

struct PositivityReport {
    double min_value = 0.0;
    bool pass = false;
};

/// V(x) > 0 on every probe point.
inline PositivityReport check_positive(const LyapunovSpec& v, std::span<const std::vector<double>> probes) {
    PositivityReport rep{std::numeric_limits<double>::infinity(), true};
    for (const auto& x : probes) rep.min_value = std::min(rep.min_value, v(std::span<const double>(x)));
    rep.pass = rep.min_value > 0.0;
    return rep;
}

/// Radial monotonicity beyond v.mono_radius: for consecutive probe radii
/// r_i < r_{i+1} (both >= mono_radius), max V on the sphere r_i must not exceed
/// min V on the sphere r_{i+1}. In 1D the sphere is {-r, r}.
inline bool check_radial_monotone(const LyapunovSpec& v, std::size_t dim, std::span<const double> radii,
                                  std::size_t samples_per_radius = 64) {
    double prev_max = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < radii.size(); ++k) {
        if (radii[k] < v.mono_radius) continue;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto& x : detail::ring_points(dim, radii[k], samples_per_radius, k)) {
            const double val = v(std::span<const double>(x));
            lo = std::min(lo, val);
            hi = std::max(hi, val);
        }
        if (lo < prev_max) return false;
        prev_max = hi;
    }
    return true;
}

}  // namespace ergolab
