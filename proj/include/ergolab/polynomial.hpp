#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace ergolab {

/// Real polynomial stored as an ascending coefficient list: c[0] + c[1] x + ...
///
/// Trailing zero coefficients are trimmed on construction so that degree()
/// and leading() refer to the true highest-order term.
class Polynomial {
public:
    Polynomial() = default;
    Polynomial(std::initializer_list<double> coeffs) : coeffs_(coeffs) { trim(); }
    explicit Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

    const std::vector<double>& coefficients() const noexcept { return coeffs_; }

    /// Degree of the polynomial; the zero polynomial reports 0.
    std::size_t degree() const noexcept { return coeffs_.empty() ? 0 : coeffs_.size() - 1; }
    double leading() const noexcept { return coeffs_.empty() ? 0.0 : coeffs_.back(); }
    bool is_zero() const noexcept { return coeffs_.empty(); }
    bool is_constant() const noexcept { return coeffs_.size() <= 1; }

    double operator()(double x) const noexcept {
        double acc = 0.0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }

    Polynomial derivative() const {
        if (coeffs_.size() <= 1) return {};
        std::vector<double> d(coeffs_.size() - 1);
        for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = static_cast<double>(k) * coeffs_[k];
        return Polynomial(std::move(d));
    }

    /// Antiderivative with zero constant term.
    Polynomial antiderivative() const {
        std::vector<double> a(coeffs_.size() + 1, 0.0);
        for (std::size_t k = 0; k < coeffs_.size(); ++k) a[k + 1] = coeffs_[k] / static_cast<double>(k + 1);
        return Polynomial(std::move(a));
    }

    Polynomial scaled(double factor) const {
        std::vector<double> s(coeffs_);
        for (double& c : s) c *= factor;
        return Polynomial(std::move(s));
    }

    friend bool operator==(const Polynomial&, const Polynomial&) = default;

private:
    void trim() {
        while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
    }

    std::vector<double> coeffs_;
};

}  // namespace ergolab
