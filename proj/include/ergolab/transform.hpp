#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "ergolab/models.hpp"

namespace ergolab {

/// Ito coefficients of Y_t = e^{delta V(X_t)}: dY = Y [btilde(X) dt + stilde(X) . dW] with
///
///   btilde = delta grad V . b + (delta/2) tr(sigma sigma^T Hess V) + (delta^2/2) |sigma^T grad V|^2
///   stilde = delta sigma^T grad V
///
/// In 1D: btilde = delta V' b + sigma^2 (delta V'' + delta^2 V'^2) / 2, stilde = delta V' sigma.
class ExpTransform {
public:
    static ExpTransform derive(const SdeModel& model, const LyapunovSpec& lyap) {
        require_delta(lyap.delta);
        return ExpTransform(model, lyap);
    }

    double delta() const noexcept { return lyap_.delta; }
    const SdeModel& model() const noexcept { return model_; }
    const LyapunovSpec& lyapunov() const noexcept { return lyap_; }

    /// Y = e^{delta V(x)}.
    double y(std::span<const double> x) const { return std::exp(lyap_.delta * lyap_(x)); }

    double drift_rate(std::span<const double> x) const {
        if (model_.is_scalar()) return drift_rate(x[0]);
        const std::size_t d = model_.dim(), w = model_.noise_dim();
        std::vector<double> b(d), s(d * w), g(d), h(d * d);
        model_.drift(x, b);
        model_.diffusion(x, s);
        lyap_.gradient(x, g);
        lyap_.hessian(x, h);
        const double delta = lyap_.delta;
        double grad_b = 0.0;
        for (std::size_t i = 0; i < d; ++i) grad_b += g[i] * b[i];
        // tr(sigma sigma^T H) = sum_k sigma_{:,k}^T H sigma_{:,k}
        double trace = 0.0;
        for (std::size_t k = 0; k < w; ++k)
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) trace += s[i * w + k] * h[i * d + j] * s[j * w + k];
        double proj = 0.0;
        for (std::size_t k = 0; k < w; ++k) {
            double c = 0.0;
            for (std::size_t i = 0; i < d; ++i) c += s[i * w + k] * g[i];
            proj += c * c;
        }
        return delta * grad_b + 0.5 * delta * trace + 0.5 * delta * delta * proj;
    }

    void noise_rate(std::span<const double> x, std::span<double> out) const {
        if (model_.is_scalar()) {
            out[0] = noise_rate(x[0]);
            return;
        }
        const std::size_t d = model_.dim(), w = model_.noise_dim();
        std::vector<double> s(d * w), g(d);
        model_.diffusion(x, s);
        lyap_.gradient(x, g);
        for (std::size_t k = 0; k < w; ++k) {
            double c = 0.0;
            for (std::size_t i = 0; i < d; ++i) c += s[i * w + k] * g[i];
            out[k] = lyap_.delta * c;
        }
    }

    // Scalar versions.
    double y(double x) const { return std::exp(lyap_.delta * lyap_(x)); }

    double drift_rate(double x) const {
        const double v1 = first(x), v2 = second(x), sig = model_.diffusion(x), delta = lyap_.delta;
        return delta * v1 * model_.drift(x) + 0.5 * sig * sig * (delta * v2 + delta * delta * v1 * v1);
    }

    double noise_rate(double x) const { return lyap_.delta * first(x) * model_.diffusion(x); }

private:
    ExpTransform(SdeModel model, LyapunovSpec lyap) : model_(std::move(model)), lyap_(std::move(lyap)) {}

    double first(double x) const {
        double g = 0.0;
        lyap_.gradient(std::span<const double>(&x, 1), std::span<double>(&g, 1));
        return g;
    }
    double second(double x) const {
        double h = 0.0;
        lyap_.hessian(std::span<const double>(&x, 1), std::span<double>(&h, 1));
        return h;
    }

    SdeModel model_;
    LyapunovSpec lyap_;
};

inline ExpTransform derive_transform(const SdeModel& model, const LyapunovSpec& lyap) {
    return ExpTransform::derive(model, lyap);
}

}  // namespace ergolab
