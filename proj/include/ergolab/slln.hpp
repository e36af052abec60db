#pragma once

// Marcinkiewicz-Zygmund scaling n^{-1/p} sum_{k<n} X_k for stationary
// sequences with E|X_0|^p < infinity, p in (0, 1), and the continuous-time
// analogue T^{-(1/p + eps)} int_0^T phi(X_s) ds.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "ergolab/estimators.hpp"
#include "ergolab/integrate.hpp"
#include "ergolab/rng.hpp"

namespace ergolab {

/// Draw k of the symmetric Pareto family sign * U^{-1/alpha}: one Philox block
/// per draw, 52 bits for U and one bit for the sign.
inline double pareto_draw(std::uint64_t master_seed, std::uint64_t path_id, double alpha, std::uint64_t k) {
    const auto b = random_block(master_seed, path_id, Stream::auxiliary, k);
    const double u = detail::open_uniform(detail::join(b[0], b[1]));
    const double magnitude = std::pow(u, -1.0 / alpha);
    return (b[2] & 1u) ? magnitude : -magnitude;
}

inline std::vector<double> pareto_symmetric(std::uint64_t master_seed, std::uint64_t path_id, double alpha,
                                            std::size_t n) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("Pareto tail index alpha must lie in (0, 1)");
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = pareto_draw(master_seed, path_id, alpha, k);
    return out;
}

enum class SequenceFamily { pareto, ou_functional };

/// Stationary sequence generator.
///
/// pareto: i.i.d. symmetric Pareto(alpha), E|X|^q < infinity iff q < alpha.
/// ou_functional: X_k = f(Y_{k * spacing}) for a stationary OU path Y sampled
/// exactly (a dependent stationary instance).
struct StationarySequenceGen {
    SequenceFamily kind = SequenceFamily::pareto;
    double alpha = 0.8;
    double ou_lambda = 2.0;
    double ou_mu = 0.0;
    double ou_sigma = 1.0;
    double spacing = 1.0;
    std::function<double(double)> f = [](double x) { return x; };
    std::uint64_t master_seed = 0;
    std::uint64_t seed = 0;

    /// Fills the first n values.
    std::vector<double> generate(std::size_t n) const {
        if (kind == SequenceFamily::pareto) return pareto_symmetric(master_seed, seed, alpha, n);
        std::vector<double> out(n);
        NormalStream normals(BrownianDriver{master_seed, seed, 1}, Stream::auxiliary);
        const double decay = std::exp(-0.5 * ou_lambda * spacing);
        const double spread = ou_sigma * std::sqrt(-std::expm1(-ou_lambda * spacing));
        double y = ou_mu + ou_sigma * normals.next();
        for (std::size_t k = 0; k < n; ++k) {
            out[k] = f(y);
            y = ou_mu + decay * (y - ou_mu) + spread * normals.next();
        }
        return out;
    }
};

struct ScaledSumPoint {
    double n_or_t = 0.0;
    double scaled = 0.0;
};

struct MzSeries {
    std::vector<ScaledSumPoint> points;
    bool hypothesis_violated = false;  // p >= alpha for the Pareto family
};

/// Geometric checkpoints 1, ratio, ratio^2, ... capped by and including n_max.
inline std::vector<std::size_t> geometric_counts(std::size_t n_max, double ratio = 2.0) {
    std::vector<std::size_t> out;
    double n = 1.0;
    while (static_cast<std::size_t>(n) < n_max) {
        const auto k = static_cast<std::size_t>(n);
        if (out.empty() || k > out.back()) out.push_back(k);
        n *= ratio;
    }
    out.push_back(n_max);
    return out;
}

/// n^{-1/p} sum_{k<n} x_k at each checkpoint n.
inline std::vector<ScaledSumPoint> mz_scaled_sums(std::span<const double> xs, double p,
                                                  std::span<const std::size_t> checkpoints) {
    if (!(p > 0.0 && p < 1.0)) throw ParameterError("p must lie in (0, 1)");
    std::vector<ScaledSumPoint> out;
    out.reserve(checkpoints.size());
    double sum = 0.0;
    std::size_t k = 0;
    for (std::size_t n : checkpoints) {
        if (n > xs.size()) throw ParameterError("checkpoint beyond sequence length");
        for (; k < n; ++k) sum += xs[k];
        out.push_back({static_cast<double>(n), sum * std::pow(static_cast<double>(n), -1.0 / p)});
    }
    return out;
}

inline MzSeries mz_scaled_sums(const StationarySequenceGen& gen, double p, std::size_t n_max, double ratio = 2.0) {
    MzSeries series;
    series.hypothesis_violated = gen.kind == SequenceFamily::pareto && p >= gen.alpha;
    const auto xs = gen.generate(n_max);
    const auto counts = geometric_counts(n_max, ratio);
    series.points = mz_scaled_sums(xs, p, counts);
    return series;
}

struct ContinuousMzSeries {
    std::vector<ScaledSumPoint> points;
    bool decay = false;  // |scaled| nonincreasing over the last decade of T
};

/// True when |values| are nonincreasing over the checkpoints in [T_last/10, T_last].
inline bool decays_over_last_decade(std::span<const ScaledSumPoint> pts) {
    if (pts.size() < 2) return false;
    const double cutoff = pts.back().n_or_t / 10.0;
    double prev = std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    for (const auto& pt : pts) {
        if (pt.n_or_t < cutoff * (1.0 - 1e-12)) continue;
        const double a = std::abs(pt.scaled);
        if (a > prev) return false;
        prev = a;
        ++used;
    }
    return used >= 2;
}

/// T^{-(1/p + eps_exp)} int_0^T phi(X_s) ds at every checkpoint T of the schedule.
/// This is an experiment on an unproven statement; the decay flag is reported,
/// never asserted.
inline ContinuousMzSeries mz_conjecture_continuous(const SdeModel& model, const Observable& phi, double p,
                                                   double eps_exp, double x0, const CheckpointSchedule& schedule,
                                                   const BrownianDriver& driver, Scheme scheme) {
    if (!(p > 0.0 && p < 1.0)) throw ParameterError("p must lie in (0, 1)");
    if (!(eps_exp > 0.0)) throw ParameterError("eps_exp must be positive");
    BirkhoffAverage avg(phi);
    PathObserver* obs[] = {&avg};
    integrate(model, x0, schedule, driver, scheme, obs);
    ContinuousMzSeries out;
    for (const auto& s : avg.samples())
        out.points.push_back({s.t, s.average * s.t * std::pow(s.t, -(1.0 / p + eps_exp))});
    out.decay = decays_over_last_decade(out.points);
    return out;
}

}  // namespace ergolab
