#pragma once

#include <algorithm>

#include "ergolab/errors.hpp"

namespace ergolab {

/// Current exponent beta in limsup V(X_t)/log t <= beta.
struct BootstrapState {
    double beta = 2.0;
    int iteration = 0;
};

/// beta' = max{1, (1 + beta)/2}. From beta = 2 the iterates are 1 + 2^{-k},
/// exactly representable, so the recursion is exact in floating point.
inline BootstrapState bootstrap_iterate(const BootstrapState& s) {
    if (!(s.beta >= 1.0)) throw ParameterError("bootstrap exponent beta must be >= 1");
    return {std::max(1.0, 0.5 * (1.0 + s.beta)), s.iteration + 1};
}

inline BootstrapState bootstrap_run(BootstrapState s, int iterations) {
    for (int k = 0; k < iterations; ++k) s = bootstrap_iterate(s);
    return s;
}

/// Intermediate growth exponent max{1 + eps, 1/2 + (delta + 2 eps - 1/2)(beta + 2 eps)}
/// of e^{delta V(X_t)} before the limits delta -> 1, eps -> 0.
inline double bootstrap_gamma(double beta, double delta, double eps) {
    return std::max(1.0 + eps, 0.5 + (delta + 2.0 * eps - 0.5) * (beta + 2.0 * eps));
}

/// Bound gamma / delta on limsup V(X_t)/log t at finite (delta, eps).
inline double bootstrap_bound(double beta, double delta, double eps) {
    return bootstrap_gamma(beta, delta, eps) / delta;
}

}  // namespace ergolab
