#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ergolab/errors.hpp"
#include "ergolab/polynomial.hpp"

namespace ergolab {

using VectorField = std::function<void(std::span<const double> x, std::span<double> out)>;
using MatrixField = std::function<void(std::span<const double> x, std::span<double> out_row_major)>;
using ScalarField = std::function<double(double)>;

/// Autonomous SDE dX = b(X) dt + sigma(X) dW in R^dim driven by a noise_dim
/// Wiener process.
///
/// Coefficients are pure functions. One-dimensional models (dim == noise_dim
/// == 1) also carry scalar evaluators used by the integrators' fast path; the
/// vector evaluators are always present.
class SdeModel {
public:
    SdeModel() = default;

    /// Scalar model. growth_exponent is the declared m of the growth bound
    /// |b(x)| + |sigma(x)| <= C (1 + |x|^m).
    static SdeModel scalar(ScalarField drift, ScalarField diffusion, int growth_exponent,
                           std::string label) {
        SdeModel m;
        m.dim_ = 1;
        m.noise_dim_ = 1;
        m.drift_1d_ = std::move(drift);
        m.diffusion_1d_ = std::move(diffusion);
        m.drift_ = [b = m.drift_1d_](std::span<const double> x, std::span<double> out) { out[0] = b(x[0]); };
        m.diffusion_ = [s = m.diffusion_1d_](std::span<const double> x, std::span<double> out) {
            out[0] = s(x[0]);
        };
        m.growth_exponent_ = growth_exponent;
        m.label_ = std::move(label);
        return m;
    }

    static SdeModel general(std::size_t dim, std::size_t noise_dim, VectorField drift,
                            MatrixField diffusion, int growth_exponent, std::string label) {
        if (dim == 0 || noise_dim == 0) throw ParameterError("model dimensions must be positive");
        if (dim == 1 && noise_dim == 1) {
            auto b = [f = drift](double x) {
                double out = 0.0;
                f(std::span<const double>(&x, 1), std::span<double>(&out, 1));
                return out;
            };
            auto s = [f = diffusion](double x) {
                double out = 0.0;
                f(std::span<const double>(&x, 1), std::span<double>(&out, 1));
                return out;
            };
            return scalar(b, s, growth_exponent, std::move(label));
        }
        SdeModel m;
        m.dim_ = dim;
        m.noise_dim_ = noise_dim;
        m.drift_ = std::move(drift);
        m.diffusion_ = std::move(diffusion);
        m.growth_exponent_ = growth_exponent;
        m.label_ = std::move(label);
        return m;
    }

    std::size_t dim() const noexcept { return dim_; }
    std::size_t noise_dim() const noexcept { return noise_dim_; }
    int growth_exponent() const noexcept { return growth_exponent_; }
    const std::string& label() const noexcept { return label_; }
    bool is_scalar() const noexcept { return static_cast<bool>(drift_1d_); }

    void drift(std::span<const double> x, std::span<double> out) const { drift_(x, out); }
    void diffusion(std::span<const double> x, std::span<double> out) const { diffusion_(x, out); }

    // Scalar fast path; only valid when is_scalar().
    double drift(double x) const { return drift_1d_(x); }
    double diffusion(double x) const { return diffusion_1d_(x); }

    SdeModel with_growth_exponent(int m) const {
        SdeModel copy = *this;
        copy.growth_exponent_ = m;
        return copy;
    }

private:
    std::size_t dim_ = 0;
    std::size_t noise_dim_ = 0;
    VectorField drift_;
    MatrixField diffusion_;
    ScalarField drift_1d_;
    ScalarField diffusion_1d_;
    int growth_exponent_ = 0;
    std::string label_;
};

/// Lyapunov function V with its derivatives and the transform exponent delta.
struct LyapunovSpec {
    std::function<double(std::span<const double>)> value;
    VectorField gradient;
    MatrixField hessian;  // dim x dim, row-major
    double delta = 0.2;
    std::string label;
    /// Radius beyond which V is declared nondecreasing in the norm.
    double mono_radius = 1.0;

    double operator()(std::span<const double> x) const { return value(x); }
    double operator()(double x) const { return value(std::span<const double>(&x, 1)); }
};

inline void require_delta(double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw ParameterError("delta must lie strictly inside (0, 1), got " + std::to_string(delta));
}

/// Parameters of the gradient model dX = -U'(X) dt + sqrt(2 eps) dW.
struct LangevinModel {
    Polynomial potential;
    double leading = 0.0;     // c in U(x) = c x^{2p} + lower order
    int half_degree = 0;      // p
    double temperature = 0.0; // eps

    /// Coefficient of the a.s. envelope |X_t| <~ (eps/c)^{1/2p} (log t)^{1/2p}.
    double envelope_constant() const { return std::pow(temperature / leading, 1.0 / (2.0 * half_degree)); }
};

/// Ornstein-Uhlenbeck model whose stationary law is N(mu_loc, sigma_scale^2) and
/// whose stationary path has the law of sigma e^{-lambda t/2} B(e^{lambda t}) + mu:
/// drift -(lambda/2)(x - mu_loc), constant diffusion sigma_scale sqrt(lambda).
inline SdeModel make_ou(double lambda, double mu_loc, double sigma_scale) {
    if (!(lambda > 0.0)) throw ParameterError("OU rate lambda must be positive");
    if (!(sigma_scale > 0.0)) throw ParameterError("OU scale sigma must be positive");
    const double rate = 0.5 * lambda;
    const double diff = sigma_scale * std::sqrt(lambda);
    return SdeModel::scalar([rate, mu_loc](double x) { return -rate * (x - mu_loc); },
                            [diff](double) { return diff; }, 1, "ou");
}

/// Potential of the OU model written as a Langevin pair (U, eps).
inline std::pair<Polynomial, double> ou_as_langevin(double lambda, double mu_loc, double sigma_scale) {
    const double q = 0.25 * lambda;  // U = (lambda/4)(x - mu)^2
    const double eps = 0.5 * sigma_scale * sigma_scale * lambda;
    return {Polynomial{q * mu_loc * mu_loc, -2.0 * q * mu_loc, q}, eps};
}

inline std::pair<SdeModel, LangevinModel> make_langevin(const Polynomial& potential, double temperature) {
    if (!(temperature > 0.0)) throw ParameterError("Langevin temperature must be positive");
    const std::size_t deg = potential.degree();
    if (deg < 2 || deg % 2 != 0)
        throw ParameterError("potential must have even degree >= 2 for e^{-U/eps} to be integrable");
    if (!(potential.leading() > 0.0))
        throw ParameterError("potential leading coefficient must be positive");

    LangevinModel lm{potential, potential.leading(), static_cast<int>(deg / 2), temperature};
    const Polynomial neg_grad = potential.derivative().scaled(-1.0);
    const double diff = std::sqrt(2.0 * temperature);
    auto model = SdeModel::scalar([neg_grad](double x) { return neg_grad(x); },
                                  [diff](double) { return diff; }, static_cast<int>(deg) - 1, "langevin");
    return {std::move(model), std::move(lm)};
}

/// 1D model with polynomial drift and polynomial diffusion.
inline SdeModel make_polynomial_model(const Polynomial& drift, const Polynomial& diffusion,
                                      int growth_exponent, std::string label = "custom-polynomial-drift") {
    return SdeModel::scalar([drift](double x) { return drift(x); },
                            [diffusion](double x) { return diffusion(x); }, growth_exponent,
                            std::move(label));
}

/// b = 0, sigma = 0 in dimension dim.
inline SdeModel make_zero_model(std::size_t dim = 1, int growth_exponent = 0) {
    if (dim == 1)
        return SdeModel::scalar([](double) { return 0.0; }, [](double) { return 0.0; }, growth_exponent,
                                "zero");
    return SdeModel::general(
        dim, dim, [](std::span<const double>, std::span<double> out) { std::fill(out.begin(), out.end(), 0.0); },
        [](std::span<const double>, std::span<double> out) { std::fill(out.begin(), out.end(), 0.0); },
        growth_exponent, "zero");
}

// Built-in Lyapunov functions ------------------------------------------------

/// V(x) = |x - center|^2 / (2 scale^2) in any dimension.
inline LyapunovSpec quadratic_lyapunov(double delta, double center = 0.0, double scale = 1.0) {
    require_delta(delta);
    const double inv = 1.0 / (scale * scale);
    LyapunovSpec v;
    v.value = [=](std::span<const double> x) {
        double s = 0.0;
        for (double xi : x) s += (xi - center) * (xi - center);
        return 0.5 * inv * s;
    };
    v.gradient = [=](std::span<const double> x, std::span<double> g) {
        for (std::size_t i = 0; i < x.size(); ++i) g[i] = inv * (x[i] - center);
    };
    v.hessian = [=](std::span<const double> x, std::span<double> h) {
        const std::size_t d = x.size();
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) h[i * d + j] = (i == j) ? inv : 0.0;
    };
    v.delta = delta;
    v.label = "quadratic";
    v.mono_radius = std::abs(center) + 1.0;
    return v;
}

/// 1D polynomial Lyapunov function.
inline LyapunovSpec polynomial_lyapunov(const Polynomial& p, double delta, std::string label = "polynomial") {
    require_delta(delta);
    const Polynomial dp = p.derivative();
    const Polynomial ddp = dp.derivative();
    LyapunovSpec v;
    v.value = [p](std::span<const double> x) { return p(x[0]); };
    v.gradient = [dp](std::span<const double> x, std::span<double> g) { g[0] = dp(x[0]); };
    v.hessian = [ddp](std::span<const double> x, std::span<double> h) { h[0] = ddp(x[0]); };
    v.delta = delta;
    v.label = std::move(label);
    return v;
}

/// V = U / eps, the exponent of the Gibbs density; sharp choice for Langevin models.
inline LyapunovSpec potential_lyapunov(const LangevinModel& lm, double delta) {
    return polynomial_lyapunov(lm.potential.scaled(1.0 / lm.temperature), delta, "potential");
}

inline LyapunovSpec constant_lyapunov(double value, double delta) {
    return polynomial_lyapunov(Polynomial{value}, delta, "constant");
}

}  // namespace ergolab
