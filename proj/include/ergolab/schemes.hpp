#pragma once

#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ergolab/errors.hpp"
#include "ergolab/models.hpp"

namespace ergolab {

enum class Scheme { em, tamed, milstein, exact_ou };

inline std::string_view to_string(Scheme s) {
    switch (s) {
        case Scheme::em: return "em";
        case Scheme::tamed: return "tamed";
        case Scheme::milstein: return "milstein";
        case Scheme::exact_ou: return "exact-ou";
    }
    return "?";
}

inline Scheme parse_scheme(std::string_view name) {
    if (name == "em") return Scheme::em;
    if (name == "tamed") return Scheme::tamed;
    if (name == "milstein") return Scheme::milstein;
    if (name == "exact-ou") return Scheme::exact_ou;
    throw ConfigError("scheme", "unknown scheme '" + std::string(name) + "' (expected em, tamed, milstein, exact-ou)");
}

/// |x| above this (or a non-finite state) marks a numerical explosion.
inline constexpr double kBlowupThreshold = 1e12;

// Scalar kernels ---------------------------------------------------------------

inline double em_step(double x, double drift, double diffusion, double dt, double dw) noexcept {
    return x + drift * dt + diffusion * dw;
}

inline double tamed_em_step(double x, double drift, double diffusion, double dt, double dw) noexcept {
    return x + drift * dt / (1.0 + dt * std::abs(drift)) + diffusion * dw;
}

/// Central-difference derivative of sigma with step 1e-5 (1 + |x|).
inline double diffusion_slope(const SdeModel& model, double x) {
    const double h = 1e-5 * (1.0 + std::abs(x));
    return (model.diffusion(x + h) - model.diffusion(x - h)) / (2.0 * h);
}

inline double em_step(double x, const SdeModel& model, double dt, double dw) {
    return em_step(x, model.drift(x), model.diffusion(x), dt, dw);
}

inline double tamed_em_step(double x, const SdeModel& model, double dt, double dw) {
    return tamed_em_step(x, model.drift(x), model.diffusion(x), dt, dw);
}

/// x + b dt + s dW + (1/2) s s' (dW^2 - dt); scalar models only.
inline double milstein_step_1d(double x, const SdeModel& model, double dt, double dw) {
    if (!model.is_scalar()) throw ConfigError("scheme", "milstein requires a one-dimensional model");
    const double s = model.diffusion(x);
    return x + model.drift(x) * dt + s * dw + 0.5 * s * diffusion_slope(model, x) * (dw * dw - dt);
}

// Vector kernels ---------------------------------------------------------------

/// Scratch buffers for the vector kernels.
struct StepWorkspace {
    std::vector<double> drift;
    std::vector<double> diffusion;
    explicit StepWorkspace(const SdeModel& m) : drift(m.dim()), diffusion(m.dim() * m.noise_dim()) {}
};

inline void em_step(std::span<const double> x, const SdeModel& model, double dt, std::span<const double> dw,
                    std::span<double> out, StepWorkspace& ws) {
    model.drift(x, ws.drift);
    model.diffusion(x, ws.diffusion);
    const std::size_t w = model.noise_dim();
    for (std::size_t i = 0; i < x.size(); ++i) {
        double noise = 0.0;
        for (std::size_t j = 0; j < w; ++j) noise += ws.diffusion[i * w + j] * dw[j];
        out[i] = x[i] + ws.drift[i] * dt + noise;
    }
}

/// Drift increment b dt / (1 + dt |b|) with the Euclidean norm of b.
inline void tamed_em_step(std::span<const double> x, const SdeModel& model, double dt, std::span<const double> dw,
                          std::span<double> out, StepWorkspace& ws) {
    model.drift(x, ws.drift);
    model.diffusion(x, ws.diffusion);
    double norm = 0.0;
    for (double b : ws.drift) norm += b * b;
    const double damp = dt / (1.0 + dt * std::sqrt(norm));
    const std::size_t w = model.noise_dim();
    for (std::size_t i = 0; i < x.size(); ++i) {
        double noise = 0.0;
        for (std::size_t j = 0; j < w; ++j) noise += ws.diffusion[i * w + j] * dw[j];
        out[i] = x[i] + ws.drift[i] * damp + noise;
    }
}

}  // namespace ergolab
