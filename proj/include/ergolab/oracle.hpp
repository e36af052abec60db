#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "ergolab/errors.hpp"
#include "ergolab/polynomial.hpp"
#include "ergolab/rng.hpp"

namespace ergolab {

/// Composite Simpson rule on n_points equally spaced nodes (n_points odd, >= 3).
template <class F>
double simpson(F&& f, double a, double b, std::size_t n_points) {
    if (n_points < 3 || n_points % 2 == 0) throw ParameterError("Simpson rule needs an odd node count >= 3");
    const std::size_t cells = n_points - 1;
    const double h = (b - a) / static_cast<double>(cells);
    double odd = 0.0, even = 0.0;
    for (std::size_t i = 1; i < cells; ++i) {
        const double v = f(a + static_cast<double>(i) * h);
        (i % 2 ? odd : even) += v;
    }
    return h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even);
}

/// Composite midpoint rule with n_cells cells.
template <class F>
double midpoint(F&& f, double a, double b, std::size_t n_cells) {
    if (n_cells == 0) throw ParameterError("midpoint rule needs at least one cell");
    const double h = (b - a) / static_cast<double>(n_cells);
    double s = 0.0;
    for (std::size_t i = 0; i < n_cells; ++i) s += f(a + (static_cast<double>(i) + 0.5) * h);
    return h * s;
}

struct QuadratureGrid {
    double x_min = -12.0;
    double x_max = 12.0;
    std::size_t n_points = 48001;
};

enum class TailVerdict { finite, divergent, inconclusive };

inline const char* to_string(TailVerdict v) {
    switch (v) {
        case TailVerdict::finite: return "finite";
        case TailVerdict::divergent: return "divergent";
        case TailVerdict::inconclusive: return "inconclusive";
    }
    return "?";
}

/// Relative change between truncation radii below which a tail integral is
/// declared convergent.
inline constexpr double kTailTolerance = 1e-6;

/// Symmetric grid [-R, R] whose end points satisfy (U(+-R) - min U)/eps >= 40.
inline QuadratureGrid auto_grid(const Polynomial& potential, double temperature, std::size_t n_points = 48001) {
    constexpr double kTailExponent = 40.0;
    auto min_on = [&](double r) {
        double m = std::numeric_limits<double>::infinity();
        constexpr int kScan = 4001;
        for (int i = 0; i < kScan; ++i) m = std::min(m, potential(-r + 2.0 * r * i / (kScan - 1)));
        return m;
    };
    auto decayed = [&](double r) {
        const double floor = min_on(r);
        return (potential(r) - floor) / temperature >= kTailExponent &&
               (potential(-r) - floor) / temperature >= kTailExponent;
    };
    double hi = 1.0;
    while (!decayed(hi)) {
        hi *= 2.0;
        if (hi > 1e8) throw GridError("potential does not confine: no finite grid radius found");
    }
    double lo = hi / 2.0;
    if (!decayed(lo)) {
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (decayed(mid) ? hi : lo) = mid;
        }
    } else {
        hi = lo;
    }
    return {-hi, hi, n_points};
}

/// Invariant law mu(dx) = e^{-U(x)/eps} dx / Z of a one-dimensional gradient
/// model, normalized by quadrature on a fixed grid.
class InvariantOracle1D {
public:
    static InvariantOracle1D build(const Polynomial& potential, double temperature, const QuadratureGrid& grid) {
        if (!(temperature > 0.0)) throw ParameterError("temperature must be positive");
        if (!(grid.x_max > grid.x_min)) throw GridError("grid must have x_max > x_min");
        if (grid.n_points < 3 || grid.n_points % 2 == 0) throw GridError("grid needs an odd point count >= 3");

        InvariantOracle1D o;
        o.potential_ = potential;
        o.temperature_ = temperature;
        o.grid_ = grid;
        const std::size_t n = grid.n_points;
        o.h_ = (grid.x_max - grid.x_min) / static_cast<double>(n - 1);

        double umin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) umin = std::min(umin, potential(o.node(i)));
        o.shift_ = umin;

        std::vector<double> w(n);
        double wmax = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = o.unnormalized(o.node(i));
            wmax = std::max(wmax, w[i]);
        }
        constexpr double kDecay = 1e-14;
        if (w.front() >= kDecay * wmax || w.back() >= kDecay * wmax)
            throw GridError("density has not decayed at the grid ends; widen the grid");

        o.z_shifted_ = simpson([&](double x) { return o.unnormalized(x); }, grid.x_min, grid.x_max, n);
        o.density_.resize(n);
        for (std::size_t i = 0; i < n; ++i) o.density_[i] = w[i] / o.z_shifted_;

        // Trapezoidal cumulative table rescaled to end exactly at 1.
        o.cdf_.assign(n, 0.0);
        for (std::size_t i = 1; i < n; ++i)
            o.cdf_[i] = o.cdf_[i - 1] + 0.5 * o.h_ * (o.density_[i - 1] + o.density_[i]);
        const double total = o.cdf_.back();
        for (double& c : o.cdf_) c /= total;
        o.cdf_.back() = 1.0;
        return o;
    }

    static InvariantOracle1D build(const Polynomial& potential, double temperature) {
        return build(potential, temperature, auto_grid(potential, temperature));
    }

    const Polynomial& potential() const noexcept { return potential_; }
    double temperature() const noexcept { return temperature_; }
    const QuadratureGrid& grid() const noexcept { return grid_; }

    /// Z = int e^{-U/eps} dx by the Simpson rule.
    double normalizer() const { return z_shifted_ * std::exp(-shift_ / temperature_); }

    /// Z by the midpoint rule on the same cells (independent cross-check).
    double normalizer_midpoint() const {
        return midpoint([&](double x) { return unnormalized(x); }, grid_.x_min, grid_.x_max, grid_.n_points - 1) *
               std::exp(-shift_ / temperature_);
    }

    double density(double x) const { return unnormalized(x) / z_shifted_; }

    /// E_mu[phi] by Simpson; throws GridError if phi * density has not decayed
    /// at the grid ends.
    template <class Phi>
    double expectation(Phi&& phi) const {
        check_decay(phi);
        return simpson([&](double x) { return phi(x) * density(x); }, grid_.x_min, grid_.x_max, grid_.n_points);
    }

    /// E_mu[phi] by the midpoint rule, self-normalized.
    template <class Phi>
    double expectation_midpoint(Phi&& phi) const {
        check_decay(phi);
        const std::size_t cells = grid_.n_points - 1;
        const double num =
            midpoint([&](double x) { return phi(x) * unnormalized(x); }, grid_.x_min, grid_.x_max, cells);
        const double den = midpoint([&](double x) { return unnormalized(x); }, grid_.x_min, grid_.x_max, cells);
        return num / den;
    }

    double cdf(double x) const {
        if (x <= grid_.x_min) return 0.0;
        if (x >= grid_.x_max) return 1.0;
        const double pos = (x - grid_.x_min) / h_;
        const auto i = std::min(static_cast<std::size_t>(pos), grid_.n_points - 2);
        const double f = pos - static_cast<double>(i);
        return cdf_[i] + f * (cdf_[i + 1] - cdf_[i]);
    }

    /// Inverse CDF by linear interpolation of the cumulative table; monotone in u.
    double quantile(double u) const {
        if (u <= 0.0) return grid_.x_min;
        if (u >= 1.0) return grid_.x_max;
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        const auto hi = static_cast<std::size_t>(it - cdf_.begin());
        const std::size_t lo = hi - 1;
        const double span = cdf_[hi] - cdf_[lo];
        const double f = span > 0.0 ? (u - cdf_[lo]) / span : 0.0;
        return node(lo) + f * h_;
    }

    /// Stationary initial state for the path identified by driver.
    double sample_stationary(const BrownianDriver& driver, std::uint64_t index = 0) const {
        return quantile(driver.uniform_at(index, Stream::initial_state));
    }

    std::vector<double> sample_stationary_many(const BrownianDriver& driver, std::size_t count) const {
        std::vector<double> out(count);
        for (std::size_t i = 0; i < count; ++i) out[i] = sample_stationary(driver, static_cast<std::uint64_t>(i));
        return out;
    }

    /// int_{c-r}^{c+r} psi dmu with c the grid centre; may extend past the grid.
    template <class Psi>
    double truncated_integral(Psi&& psi, double r) const {
        const double c = 0.5 * (grid_.x_min + grid_.x_max);
        return simpson([&](double x) { return psi(x) * density(x); }, c - r, c + r, grid_.n_points);
    }

    /// Classify int psi dmu (psi >= 0) from truncations at r1 < r2.
    ///
    /// finite: relative change from r1 to r2 at most tol. divergent: the shell
    /// [r1, r2] carries at least as much mass as the equally wide shell just
    /// inside r1, or the integral overflows. inconclusive otherwise.
    template <class Psi>
    TailVerdict tail_verdict(Psi&& psi, double r1, double r2, double tol = kTailTolerance) const {
        if (!(r2 > r1 && r1 > 0.0)) throw ParameterError("tail radii must satisfy 0 < r1 < r2");
        const double i1 = truncated_integral(psi, r1);
        const double i2 = truncated_integral(psi, r2);
        if (!std::isfinite(i1) || !std::isfinite(i2)) return TailVerdict::divergent;
        if (std::abs(i2 - i1) <= tol * std::abs(i2)) return TailVerdict::finite;
        const double r0 = std::max(0.0, r1 - (r2 - r1));
        const double i0 = r0 > 0.0 ? truncated_integral(psi, r0) : 0.0;
        if (i2 - i1 >= i1 - i0) return TailVerdict::divergent;
        return TailVerdict::inconclusive;
    }

    /// Density value on grid node i (normalized).
    /// Same density on a grid widened by factor about its centre at equal spacing.
    InvariantOracle1D widened(double factor) const {
        const double c = 0.5 * (grid_.x_min + grid_.x_max);
        const double half = 0.5 * (grid_.x_max - grid_.x_min) * factor;
        const auto cells = static_cast<std::size_t>(std::ceil((grid_.n_points - 1) * factor / 2.0)) * 2;
        return build(potential_, temperature_, {c - half, c + half, cells + 1});
    }

    /// E_mu[phi], widening the grid until phi * density has decayed at its ends.
    /// Throws GridError when phi * density still has not decayed at max_factor.
    template <class Phi>
    double expectation_widening(Phi&& phi, double max_factor = 16.0) const {
        for (double f = 1.0;; f *= 1.5) {
            const InvariantOracle1D o = f == 1.0 ? *this : widened(f);
            try {
                return o.expectation(phi);
            } catch (const GridError&) {
                if (f * 1.5 > max_factor) throw;
            }
        }
    }

    const std::vector<double>& density_table() const noexcept { return density_; }
    const std::vector<double>& cdf_table() const noexcept { return cdf_; }
    double node(std::size_t i) const noexcept { return grid_.x_min + static_cast<double>(i) * h_; }

private:
    double unnormalized(double x) const { return std::exp(-(potential_(x) - shift_) / temperature_); }

    template <class Phi>
    void check_decay(Phi& phi) const {
        const std::size_t n = grid_.n_points;
        double peak = 0.0;
        for (std::size_t i = 0; i < n; i += 16) peak = std::max(peak, std::abs(phi(node(i)) * density_[i]));
        const double ends = std::max(std::abs(phi(grid_.x_min) * density_.front()),
                                     std::abs(phi(grid_.x_max) * density_.back()));
        if (peak == 0.0 && ends == 0.0) return;
        if (!std::isfinite(ends) || ends >= 1e-14 * peak)
            throw GridError("integrand has not decayed at the grid ends; widen the grid");
    }

    Polynomial potential_;
    double temperature_ = 1.0;
    QuadratureGrid grid_;
    double h_ = 0.0;
    double shift_ = 0.0;
    double z_shifted_ = 1.0;
    std::vector<double> density_;
    std::vector<double> cdf_;
};

}  // namespace ergolab
