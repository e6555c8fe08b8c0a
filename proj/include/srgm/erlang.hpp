#pragma once

// Erlang stage distribution: the regularized incomplete gamma function with
// integer shape.
//
//   P(n, x) = 1 - e^{-x} sum_{j=0}^{n-1} x^j / j!
//   Q(n, x) = 1 - P(n, x)
//
// Both tails are evaluated directly so that neither suffers cancellation: the
// lower tail by its convergent series when x < n, the upper tail by the finite
// sum otherwise.

#include <cmath>
#include <limits>

#include "srgm/error.hpp"

namespace srgm {

namespace detail {

inline void check_stage_args(int stages, double x) {
    if (stages < 1) throw DomainError("erlang stage count must be >= 1");
    if (!(x >= 0.0)) throw DomainError("erlang argument must be >= 0");
}

// e^{-x} x^n / n!, evaluated in log space.
inline double poisson_term(int n, double x) {
    if (x == 0.0) return n == 0 ? 1.0 : 0.0;
    return std::exp(n * std::log(x) - x - std::lgamma(n + 1.0));
}

// e^{-x} sum_{j>=n} x^j/j!  for x < n (ratio of successive terms < 1).
inline double lower_tail_series(int n, double x) {
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 10000; ++k) {
        term *= x / (n + k);
        sum += term;
        if (term < sum * std::numeric_limits<double>::epsilon()) break;
    }
    return poisson_term(n, x) * sum;
}

// e^{-x} sum_{j<n} x^j/j!  for x >= n. Terms grow with j here, so the sum runs
// from the largest term (j = n-1) downward.
inline double upper_tail_sum(int n, double x) {
    double term = poisson_term(n - 1, x);
    double sum = 0.0;
    for (int j = n - 1; j >= 0; --j) {
        sum += term;
        term *= j / x;
    }
    return sum;
}

}  // namespace detail

/// Probability that an Erlang(stages, 1) variable is <= x.
inline double erlang_stage_cdf(int stages, double x) {
    detail::check_stage_args(stages, x);
    if (x == 0.0) return 0.0;
    if (stages == 1) return -std::expm1(-x);
    if (std::isinf(x)) return 1.0;
    if (x < stages) return detail::lower_tail_series(stages, x);
    return 1.0 - detail::upper_tail_sum(stages, x);
}

/// Complement of erlang_stage_cdf, accurate when the cdf is close to 1.
inline double erlang_stage_survival(int stages, double x) {
    detail::check_stage_args(stages, x);
    if (x == 0.0) return 1.0;
    if (stages == 1) return std::exp(-x);
    if (std::isinf(x)) return 0.0;
    if (x < stages) return 1.0 - detail::lower_tail_series(stages, x);
    return detail::upper_tail_sum(stages, x);
}

/// Erlang(stages, 1) density, x^{n-1} e^{-x} / (n-1)!.
inline double erlang_stage_pdf(int stages, double x) {
    detail::check_stage_args(stages, x);
    if (std::isinf(x)) return 0.0;
    return detail::poisson_term(stages - 1, x);
}

}  // namespace srgm
