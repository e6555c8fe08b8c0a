#pragma once

// Random valid specs and shared helpers for the property-style tests.

#include <algorithm>
#include <cmath>
#include <vector>

#include "srgm/model.hpp"
#include "srgm/rng.hpp"

namespace srgm::testing_support {

inline std::vector<double> random_simplex(CounterRng& rng, int k) {
    std::vector<double> p(k);
    double total = 0.0;
    for (double& v : p) total += (v = rng.exponential());
    for (double& v : p) v /= total;
    double head = 0.0;
    for (int i = 0; i + 1 < k; ++i) head += p[i];
    p[k - 1] = 1.0 - head;
    return p;
}

inline std::vector<ModelKind> all_kinds() {
    std::vector<ModelKind> kinds{ModelKind::goel_okumoto(), ModelKind::delayed_s(),
                                 ModelKind::inflection_s(), ModelKind::kapur_garg()};
    for (int n = 1; n <= kMaxStages; ++n) kinds.push_back(ModelKind::erlang(n));
    for (int n = 1; n <= kMaxStages; ++n) kinds.push_back(ModelKind::logistic(n));
    kinds.push_back(ModelKind::object_oriented(CurveShape::Exponential));
    kinds.push_back(ModelKind::object_oriented(CurveShape::Rayleigh));
    return kinds;
}

/// Random admissible parameters. Object-oriented specs get strictly positive
/// instruction shares and an instruction budget large enough that m(t)
/// approaches a.
inline ModelSpec random_spec(const ModelKind& kind, CounterRng& rng) {
    ModelSpec s{kind, {}};
    ModelParams& m = s.params;
    m.a = rng.uniform(10.0, 1000.0);
    switch (kind.family) {
        case Family::GoelOkumoto:
        case Family::DelayedS: m.b = rng.log_uniform(0.01, 1.0); break;
        case Family::InflectionS:
            m.b = rng.log_uniform(0.01, 1.0);
            m.r = rng.uniform(0.05, 1.0);
            break;
        case Family::KapurGarg:
            m.p = rng.log_uniform(0.01, 0.5);
            m.q = rng.log_uniform(0.01, 0.5);
            break;
        case Family::ErlangGE:
            m.b = rng.log_uniform(0.01, 1.0);
            m.proportions = random_simplex(rng, kind.stages);
            break;
        case Family::LogisticGE:
            m.b = rng.log_uniform(0.01, 1.0);
            m.proportions = random_simplex(rng, kind.stages);
            m.beta = rng.log_uniform(0.1, 50.0);
            break;
        case Family::ObjectOriented: {
            m.b = rng.log_uniform(0.01, 1.0);
            m.proportions = random_simplex(rng, 3);
            auto shares = random_simplex(rng, 3);
            for (double& v : shares) v = 0.1 + 0.7 * v;
            m.p = shares[0];
            m.q = shares[1];
            m.r = 1.0 - shares[0] - shares[1];
            m.exec = ExecutionCurve{kind.curve, rng.uniform(1.0, 3.0) * 600.0 / *m.b,
                                    kind.curve == CurveShape::Exponential ? rng.log_uniform(0.01, 1.0)
                                                                          : rng.log_uniform(1e-3, 0.1)};
            break;
        }
    }
    return s;
}

/// A time scale over which the model's curve does most of its growth.
inline double time_scale(const ModelSpec& s) {
    const auto& m = s.params;
    double rate = m.b ? *m.b : (*m.p + *m.q);
    if (s.kind.family == Family::ObjectOriented) {
        // Time for W(t) to reach the level where the slowest type is mostly removed.
        const double share = std::min({*m.p, *m.q, *m.r});
        const double f = std::min(0.5, 5.0 / (rate * share * m.exec->total_instructions));
        const double g = m.exec->rate;
        return s.kind.curve == CurveShape::Exponential ? -std::log1p(-f) / g
                                                       : std::sqrt(-2.0 * std::log1p(-f) / g);
    }
    return 1.0 / rate;
}

/// Richardson-extrapolated central difference of f at t.
template <class F>
double central_difference(F f, double t, double h) {
    const double d1 = (f(t + h) - f(t - h)) / (2.0 * h);
    const double d2 = (f(t + h / 2) - f(t - h / 2)) / h;
    return (4.0 * d2 - d1) / 3.0;
}

}  // namespace srgm::testing_support
