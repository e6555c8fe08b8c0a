#pragma once

// Bijections between unconstrained coordinates and the constrained parameter
// spaces used by the estimator.

#include <cmath>
#include <span>
#include <vector>

namespace srgm::reparam {

/// log(1 + e^u): R -> (0, inf).
inline double softplus(double u) {
    return u > 30.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
}

inline double softplus_inverse(double x) {
    return x > 30.0 ? x + std::log(-std::expm1(-x)) : std::log(std::expm1(x));
}

/// R -> (0, 1).
inline double sigmoid(double u) {
    if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
    const double e = std::exp(u);
    return e / (1.0 + e);
}

inline double logit(double p) { return std::log(p) - std::log1p(-p); }

/// R -> (lo, hi).
inline double bounded(double u, double lo, double hi) { return lo + (hi - lo) * sigmoid(u); }

inline double bounded_inverse(double x, double lo, double hi) {
    return logit((x - lo) / (hi - lo));
}

/// Stick-breaking map from R^{K-1} onto the open K-simplex. The offset
/// log(K - k) makes u = 0 map to the uniform point.
inline std::vector<double> to_simplex(std::span<const double> u) {
    const std::size_t k = u.size() + 1;
    std::vector<double> p(k);
    double stick = 1.0;
    for (std::size_t i = 0; i + 1 < k; ++i) {
        const double z = sigmoid(u[i] - std::log(static_cast<double>(k - 1 - i)));
        p[i] = stick * z;
        stick -= p[i];
    }
    p[k - 1] = stick;
    return p;
}

inline std::vector<double> from_simplex(std::span<const double> p) {
    const std::size_t k = p.size();
    std::vector<double> u(k - 1);
    double stick = 1.0;
    for (std::size_t i = 0; i + 1 < k; ++i) {
        const double z = p[i] / stick;
        u[i] = logit(z) + std::log(static_cast<double>(k - 1 - i));
        stick -= p[i];
    }
    return u;
}

}  // namespace srgm::reparam
