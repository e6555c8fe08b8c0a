#pragma once

// Least-squares fitting of mean value functions to cumulative failure counts.
//
// Nonlinear parameters live in unconstrained coordinates (softplus for positive
// scalars, logistic for (0, 1), stick-breaking for shares). The content a and
// the type proportions enter linearly, so for each trial of the rest they are
// solved exactly by nonnegative least squares and only the remainder goes
// through Levenberg-Marquardt. A full-parameter pass then polishes the result.
// `multistart` seeded starts run and the lowest-SSE endpoint wins.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "srgm/dataset.hpp"
#include "srgm/error.hpp"
#include "srgm/model.hpp"
#include "srgm/reparam.hpp"
#include "srgm/rng.hpp"

namespace srgm {

struct Bounds {
    double lower = 0.0;
    double upper = 0.0;
};

struct FitConfig {
    int max_iterations = 500;
    double tolerance = 1e-10;  // relative SSE change
    int multistart = 8;
    std::uint64_t seed = 0;
    /// Optional box per scalar parameter name (a, b, r, p, q, beta, alpha, gamma).
    std::map<std::string, Bounds> bounds;
    /// Execution curve for the object-oriented family. Unset values default to
    /// alpha = last observation time and gamma = 3 / T (exponential) or
    /// 6 / T^2 (Rayleigh).
    std::optional<double> exec_alpha;
    std::optional<double> exec_gamma;
    bool fit_execution = false;
    int threads = 1;
};

struct FitResult {
    ModelKind kind;
    std::optional<ModelSpec> spec;
    double sse = std::numeric_limits<double>::infinity();
    double r_squared = std::numeric_limits<double>::quiet_NaN();
    bool r_squared_defined = false;
    double aic = std::numeric_limits<double>::infinity();
    bool converged = false;
    int iterations = 0;
    int start_index = -1;
    int singular_restarts = 0;
    int free_parameters = 0;
    double t_end = 0.0;
    long observed = 0;
    std::string message;
};

struct GoodnessOfFit {
    double sse = 0.0;
    double r_squared = std::numeric_limits<double>::quiet_NaN();
    bool r_squared_defined = false;  // false when the data have zero variance
    double aic = 0.0;
};

/// Maps unconstrained coordinates onto a ModelSpec of one family.
class Parameterization {
public:
    enum class Transform { Positive, Unit, Bounded, Simplex };

    struct Slot {
        std::string name;
        Transform transform = Transform::Positive;
        int width = 1;
        double scale = 1.0;
        double lower = 0.0;
        double upper = 1.0;
    };

    /// `fault_scale` sets the softplus scale of `a` (typically the final
    /// cumulative count) and `horizon` the default execution curve.
    Parameterization(const ModelKind& kind, const FitConfig& config, double fault_scale = 1.0,
                     double horizon = 1.0)
        : kind_(kind) {
        if (kind.multi_type() && kind.family != Family::ObjectOriented &&
            (kind.stages < 1 || kind.stages > kMaxStages))
            throw InvalidSpec("stage count must be between 1 and 6");
        auto scalar = [&](const char* name, Transform t, double scale = 1.0) {
            Slot s{name, t, 1, scale};
            if (auto it = config.bounds.find(name); it != config.bounds.end()) {
                if (!(it->second.lower < it->second.upper))
                    throw std::invalid_argument(std::string("empty bounds for ") + name);
                s.transform = Transform::Bounded;
                s.lower = it->second.lower;
                s.upper = it->second.upper;
            }
            slots_.push_back(s);
        };
        scalar("a", Transform::Positive, std::max(fault_scale, 1.0));
        switch (kind.family) {
            case Family::GoelOkumoto:
            case Family::DelayedS: scalar("b", Transform::Positive); break;
            case Family::InflectionS:
                scalar("b", Transform::Positive);
                scalar("r", Transform::Unit);
                break;
            case Family::KapurGarg:
                scalar("p", Transform::Positive);
                scalar("q", Transform::Positive);
                break;
            case Family::ErlangGE:
                scalar("b", Transform::Positive);
                if (kind.stages > 1) slots_.push_back({"proportions", Transform::Simplex, kind.stages - 1});
                break;
            case Family::LogisticGE:
                scalar("b", Transform::Positive);
                if (kind.stages > 1) slots_.push_back({"proportions", Transform::Simplex, kind.stages - 1});
                scalar("beta", Transform::Positive);
                break;
            case Family::ObjectOriented: {
                scalar("b", Transform::Positive);
                slots_.push_back({"proportions", Transform::Simplex, 2});
                slots_.push_back({"shares", Transform::Simplex, 2});
                const double h = std::max(horizon, 1e-12);
                exec_ = ExecutionCurve{kind.curve, config.exec_alpha.value_or(h),
                                       config.exec_gamma.value_or(kind.curve == CurveShape::Exponential
                                                                      ? 3.0 / h
                                                                      : 6.0 / (h * h))};
                if (config.fit_execution) {
                    scalar("alpha", Transform::Positive, exec_.total_instructions);
                    scalar("gamma", Transform::Positive, exec_.rate);
                }
                break;
            }
        }
        for (const auto& s : slots_) size_ += s.width;
    }

    const ModelKind& kind() const noexcept { return kind_; }
    int size() const noexcept { return size_; }
    const std::vector<Slot>& slots() const noexcept { return slots_; }
    const ExecutionCurve& execution() const noexcept { return exec_; }

    ModelSpec to_spec(std::span<const double> u) const {
        ModelSpec spec{kind_, {}};
        ModelParams& m = spec.params;
        if (kind_.family == Family::ObjectOriented) m.exec = exec_;
        if ((kind_.family == Family::ErlangGE || kind_.family == Family::LogisticGE) &&
            kind_.stages == 1)
            m.proportions = std::vector<double>{1.0};
        int at = 0;
        for (const auto& s : slots_) {
            if (s.transform == Transform::Simplex) {
                auto p = reparam::to_simplex(u.subspan(at, s.width));
                if (s.name == "proportions") {
                    m.proportions = std::move(p);
                } else {
                    m.p = p[0];
                    m.q = p[1];
                    m.r = p[2];
                }
            } else {
                set_scalar(m, s.name, forward(s, u[at]));
            }
            at += s.width;
        }
        return spec;
    }

    std::vector<double> from_spec(const ModelSpec& spec) const {
        std::vector<double> u;
        u.reserve(size_);
        const ModelParams& m = spec.params;
        for (const auto& s : slots_) {
            if (s.transform == Transform::Simplex) {
                std::vector<double> p;
                if (s.name == "proportions") p = *m.proportions;
                else p = {*m.p, *m.q, *m.r};
                for (double v : reparam::from_simplex(p)) u.push_back(v);
            } else {
                u.push_back(inverse(s, get_scalar(m, s.name)));
            }
        }
        return u;
    }

    /// Random starting point. a starts at 1.2x the final count; rates are
    /// log-uniform on [1e-3, 1], beta log-uniform on [0.1, 100] and
    /// proportions uniform on the simplex.
    std::vector<double> sample_start(CounterRng& rng, double final_count) const {
        std::vector<double> u;
        u.reserve(size_);
        for (const auto& s : slots_) {
            if (s.transform == Transform::Simplex) {
                std::vector<double> p(s.width + 1);
                double total = 0.0;
                for (double& v : p) total += (v = rng.exponential());
                double renorm = 0.0;
                for (double& v : p) renorm += (v = std::max(v / total, 1e-6));
                for (double& v : p) v /= renorm;
                for (double v : reparam::from_simplex(p)) u.push_back(v);
                continue;
            }
            double x = 0.0;
            if (s.name == "a") x = 1.2 * std::max(final_count, 1.0);
            else if (s.name == "beta") x = rng.log_uniform(0.1, 100.0);
            else if (s.name == "r") x = rng.uniform(0.05, 0.95);
            else if (s.name == "alpha") x = exec_.total_instructions;
            else if (s.name == "gamma") x = exec_.rate;
            else x = rng.log_uniform(1e-3, 1.0);
            if (s.transform == Transform::Bounded) {
                const double margin = 1e-3 * (s.upper - s.lower);
                x = std::clamp(x, s.lower + margin, s.upper - margin);
            }
            u.push_back(inverse(s, x));
        }
        return u;
    }

private:
    static double forward(const Slot& s, double u) {
        switch (s.transform) {
            case Transform::Positive: return s.scale * reparam::softplus(u);
            case Transform::Unit: return reparam::sigmoid(u);
            case Transform::Bounded: return reparam::bounded(u, s.lower, s.upper);
            case Transform::Simplex: break;
        }
        return 0.0;
    }

    static double inverse(const Slot& s, double x) {
        switch (s.transform) {
            case Transform::Positive: return reparam::softplus_inverse(x / s.scale);
            case Transform::Unit: return reparam::logit(x);
            case Transform::Bounded: return reparam::bounded_inverse(x, s.lower, s.upper);
            case Transform::Simplex: break;
        }
        return 0.0;
    }

    static void set_scalar(ModelParams& m, const std::string& name, double v) {
        if (name == "a") m.a = v;
        else if (name == "b") m.b = v;
        else if (name == "r") m.r = v;
        else if (name == "p") m.p = v;
        else if (name == "q") m.q = v;
        else if (name == "beta") m.beta = v;
        else if (name == "alpha") m.exec->total_instructions = v;
        else if (name == "gamma") m.exec->rate = v;
    }

    static double get_scalar(const ModelParams& m, const std::string& name) {
        if (name == "a") return *m.a;
        if (name == "b") return *m.b;
        if (name == "r") return *m.r;
        if (name == "p") return *m.p;
        if (name == "q") return *m.q;
        if (name == "beta") return *m.beta;
        if (name == "alpha") return m.exec->total_instructions;
        if (name == "gamma") return m.exec->rate;
        return 0.0;
    }

    ModelKind kind_;
    std::vector<Slot> slots_;
    ExecutionCurve exec_;
    int size_ = 0;
};

/// Number of coordinates the estimator adjusts for `kind`.
inline int free_parameter_count(const ModelKind& kind, const FitConfig& config = {}) {
    return Parameterization(kind, config).size();
}

/// Real-valued cumulative observations. Fitting works on these so that
/// curves taken straight from a mean value function can be fitted without
/// rounding to counts.
struct CurveData {
    std::vector<double> times;
    std::vector<double> values;

    std::size_t size() const noexcept { return times.size(); }
};

inline CurveData curve_data(const FailureDataset& ds) {
    CurveData c{ds.times, {}};
    c.values.reserve(ds.size());
    for (long y : ds.cumulative) c.values.push_back(static_cast<double>(y));
    return c;
}

inline void validate(const CurveData& c) {
    if (c.times.size() != c.values.size()) throw DataError("times and values differ in length");
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (!std::isfinite(c.times[k]) || !(c.times[k] > 0.0))
            throw DataError("time at index " + std::to_string(k) + " is not positive");
        if (k > 0 && !(c.times[k] > c.times[k - 1]))
            throw DataError("times not strictly increasing at index " + std::to_string(k));
        if (!std::isfinite(c.values[k]) || c.values[k] < 0.0)
            throw DataError("value at index " + std::to_string(k) + " is negative or not finite");
    }
}

/// Sum of squared residuals of `spec` against the observations.
inline double sum_squared_error(const CurveData& c, const ModelSpec& spec) {
    const Model model(spec);
    double sse = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        const double r = c.values[k] - model.removed(c.times[k]);
        sse += r * r;
    }
    return sse;
}

inline double sum_squared_error(const FailureDataset& ds, const ModelSpec& spec) {
    return sum_squared_error(curve_data(ds), spec);
}

/// SSE, R^2 = 1 - SSE / SS_tot and AIC = T ln(SSE / T) + 2k.
inline GoodnessOfFit goodness_of_fit(const CurveData& c, const ModelSpec& spec,
                                     int free_parameters) {
    validate(c);
    if (c.size() == 0) throw DataError("dataset is empty");
    GoodnessOfFit g;
    g.sse = sum_squared_error(c, spec);
    double mean = 0.0;
    for (double y : c.values) mean += y;
    mean /= static_cast<double>(c.size());
    double total = 0.0;
    for (double y : c.values) total += (y - mean) * (y - mean);
    if (total > 0.0) {
        g.r_squared = 1.0 - g.sse / total;
        g.r_squared_defined = true;
    }
    const double n = static_cast<double>(c.size());
    g.aic = g.sse > 0.0 ? n * std::log(g.sse / n) + 2.0 * free_parameters
                        : -std::numeric_limits<double>::infinity();
    return g;
}

inline GoodnessOfFit goodness_of_fit(const FailureDataset& ds, const ModelSpec& spec,
                                     int free_parameters) {
    validate(ds);
    return goodness_of_fit(curve_data(ds), spec, free_parameters);
}

inline GoodnessOfFit goodness_of_fit(const FailureDataset& ds, const ModelSpec& spec) {
    return goodness_of_fit(ds, spec, free_parameter_count(spec.kind));
}

namespace detail {

using ResidualFn = std::function<bool(std::span<const double>, Eigen::VectorXd&)>;

/// Central-difference Jacobian of the residual vector, step h_j =
/// step_scale * max(1, |u_j|). Falls back to a one-sided difference when a
/// perturbed point is infeasible. Returns false if neither side evaluates.
inline bool numeric_jacobian(const ResidualFn& residuals, std::span<const double> u,
                             const Eigen::VectorXd& r0, Eigen::MatrixXd& jac,
                             double step_scale = 6e-6) {
    const auto n = static_cast<Eigen::Index>(u.size());
    jac.resize(r0.size(), n);
    std::vector<double> x(u.begin(), u.end());
    Eigen::VectorXd plus, minus;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double h = step_scale * std::max(1.0, std::abs(u[j]));
        x[j] = u[j] + h;
        const bool ok_plus = residuals(x, plus);
        x[j] = u[j] - h;
        const bool ok_minus = residuals(x, minus);
        x[j] = u[j];
        if (ok_plus && ok_minus) jac.col(j) = (plus - minus) / (2.0 * h);
        else if (ok_plus) jac.col(j) = (plus - r0) / h;
        else if (ok_minus) jac.col(j) = (r0 - minus) / h;
        else return false;
    }
    return true;
}

struct LmOutcome {
    std::vector<double> u;
    double sse = std::numeric_limits<double>::infinity();
    bool converged = false;
    bool singular = false;
    int iterations = 0;
};

/// Levenberg-Marquardt with Marquardt diagonal scaling. Damping starts at
/// 1e-3, is divided by 10 after an accepted step and multiplied by 10 after a
/// rejected one.
inline LmOutcome levenberg_marquardt(const ResidualFn& residuals, std::vector<double> u,
                                     int max_iterations, double tolerance,
                                     double max_step = 2.0) {
    constexpr double kMaxDamping = 1e20;
    LmOutcome out;
    Eigen::VectorXd r;
    if (!residuals(u, r) || !r.allFinite()) {
        out.u = std::move(u);
        return out;
    }
    double sse = r.squaredNorm();
    double damping = 1e-3;
    Eigen::MatrixXd jac;
    Eigen::VectorXd trial_r;
    std::vector<double> trial(u.size());

    while (out.iterations < max_iterations) {
        ++out.iterations;
        if (sse == 0.0) {
            out.converged = true;
            break;
        }
        if (!numeric_jacobian(residuals, u, r, jac) || !jac.allFinite()) break;
        const Eigen::MatrixXd normal = jac.transpose() * jac;
        const Eigen::VectorXd grad = jac.transpose() * r;
        Eigen::VectorXd diag = normal.diagonal();
        const double floor = std::max(diag.maxCoeff() * 1e-12, 1e-300);
        diag = diag.cwiseMax(floor);

        bool accepted = false;
        bool stalled = false;
        while (!accepted) {
            Eigen::MatrixXd system = normal;
            system.diagonal() += damping * diag;
            Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
            Eigen::VectorXd step;
            bool solved = ldlt.info() == Eigen::Success && ldlt.isPositive();
            if (solved) {
                step = -ldlt.solve(grad);
                solved = step.allFinite();
                const double longest = solved ? step.lpNorm<Eigen::Infinity>() : 0.0;
                if (longest > max_step) step *= max_step / longest;
            }
            if (!solved) out.singular = true;
            if (solved) {
                for (std::size_t j = 0; j < u.size(); ++j) trial[j] = u[j] + step[j];
                if (residuals(trial, trial_r) && trial_r.allFinite()) {
                    const double trial_sse = trial_r.squaredNorm();
                    if (trial_sse < sse) {
                        const double change = (sse - trial_sse) / sse;
                        u = trial;
                        r = trial_r;
                        sse = trial_sse;
                        damping = std::max(damping / 10.0, 1e-12);
                        accepted = true;
                        if (change < tolerance) out.converged = true;
                        break;
                    }
                }
            }
            damping *= 10.0;
            if (damping > kMaxDamping) {
                stalled = true;
                break;
            }
        }
        if (out.converged) break;
        if (stalled) {
            // No step reduces SSE even with vanishing step length: the point is
            // stationary to working precision.
            out.converged = true;
            break;
        }
    }
    out.u = std::move(u);
    out.sse = sse;
    return out;
}

/// Least-squares fault content and proportions for the nonlinear parameters
/// already set in `spec`. The mean value function is linear in c_i = a p_i,
/// so the optimum over c >= 0 is found exactly by enumerating supports (at
/// most 2^6 - 1 small solves). Proportions may come out exactly zero.
inline std::optional<ModelSpec> solve_linear_weights(ModelSpec spec, const CurveData& ds) {
    const int n = spec.kind.type_count();
    ModelSpec unit = spec;
    unit.params.a = 1.0;
    if (unit.params.proportions) unit.params.proportions = std::vector<double>(n, 1.0 / n);
    const auto rows = static_cast<Eigen::Index>(ds.size());
    Eigen::MatrixXd basis(rows, n);
    Eigen::VectorXd y(rows);
    try {
        const Model model(unit);
        double parts[kMaxStages];
        for (Eigen::Index k = 0; k < rows; ++k) {
            model.removed_by_type(ds.times[k], std::span<double>(parts, n));
            for (int i = 0; i < n; ++i) basis(k, i) = parts[i] * n;
            y[k] = ds.values[k];
        }
    } catch (const InvalidSpec&) {
        return std::nullopt;
    }
    if (!basis.allFinite()) return std::nullopt;

    double best_sse = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best = Eigen::VectorXd::Zero(n);
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        Eigen::Index cols[kMaxStages];
        Eigen::Index width = 0;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) cols[width++] = i;
        Eigen::MatrixXd sub(rows, width);
        for (Eigen::Index j = 0; j < width; ++j) sub.col(j) = basis.col(cols[j]);
        const Eigen::VectorXd c = sub.colPivHouseholderQr().solve(y);
        if (!c.allFinite() || (c.array() <= 0.0).any()) continue;
        const double sse = (sub * c - y).squaredNorm();
        if (sse < best_sse) {
            best_sse = sse;
            best.setZero();
            for (Eigen::Index j = 0; j < width; ++j) best[cols[j]] = c[j];
        }
    }
    const double total = best.sum();
    if (!std::isfinite(best_sse) || !(total > 0.0)) return std::nullopt;
    spec.params.a = total;
    if (spec.params.proportions) {
        std::vector<double> p(n);
        double head = 0.0;
        for (int i = 0; i + 1 < n; ++i) head += (p[i] = best[i] / total);
        p[n - 1] = std::max(1.0 - head, 0.0);
        spec.params.proportions = std::move(p);
    }
    return spec;
}

/// Moves proportions off exact zeros so the model has finite stick-breaking
/// coordinates.
inline ModelSpec interior(ModelSpec spec, double floor = 1e-6) {
    if (!spec.params.proportions || spec.params.proportions->size() < 2) return spec;
    auto& p = *spec.params.proportions;
    double total = 0.0;
    for (double& v : p) total += (v = std::max(v, floor));
    for (double& v : p) v /= total;
    return spec;
}

inline std::uint64_t restart_seed(std::uint64_t seed, int index) {
    return CounterRng::mix(seed ^ CounterRng::mix(static_cast<std::uint64_t>(index) + 1));
}

}  // namespace detail

/// Fits one family to the dataset. Non-convergence is reported through
/// FitResult::converged; too few observations throws InsufficientData.
inline FitResult fit(const CurveData& dataset, const ModelKind& kind,
                     const FitConfig& config = {}) {
    validate(dataset);
    if (dataset.size() == 0) throw DataError("dataset is empty");
    if (config.multistart < 1) throw std::invalid_argument("multistart must be >= 1");
    if (!(config.tolerance > 0.0)) throw std::invalid_argument("tolerance must be > 0");
    if (config.max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");

    const double final_count = dataset.values.back();
    const double horizon = dataset.times.empty() ? 1.0 : dataset.times.back();
    const Parameterization param(kind, config, final_count, horizon);
    const int k = param.size();
    if (static_cast<int>(dataset.size()) < k + 1)
        throw InsufficientData(kind.name() + " has " + std::to_string(k) +
                               " free parameters and needs at least " + std::to_string(k + 1) +
                               " data points; dataset has " + std::to_string(dataset.size()));

    auto residuals_of = [&](const ModelSpec& spec, Eigen::VectorXd& r) {
        r.resize(static_cast<Eigen::Index>(dataset.size()));
        try {
            const Model model(spec);
            for (std::size_t i = 0; i < dataset.size(); ++i)
                r[static_cast<Eigen::Index>(i)] = dataset.values[i] - model.removed(dataset.times[i]);
        } catch (const InvalidSpec&) {
            return false;
        }
        return r.allFinite();
    };
    const detail::ResidualFn full = [&](std::span<const double> u, Eigen::VectorXd& r) {
        return residuals_of(param.to_spec(u), r);
    };

    // Coordinates other than a and the proportions; those two are profiled
    // out by nonnegative least squares unless a is boxed.
    std::vector<int> nonlinear;
    bool profile = true;
    {
        int at = 0;
        for (const auto& slot : param.slots()) {
            if (slot.name == "a") {
                if (slot.transform == Parameterization::Transform::Bounded) profile = false;
            } else if (slot.name != "proportions") {
                for (int j = 0; j < slot.width; ++j) nonlinear.push_back(at + j);
            }
            at += slot.width;
        }
    }
    auto profiled_spec = [&](std::vector<double> u, std::span<const double> v) {
        for (std::size_t j = 0; j < nonlinear.size(); ++j) u[nonlinear[j]] = v[j];
        return detail::solve_linear_weights(param.to_spec(u), dataset);
    };

    std::vector<detail::LmOutcome> outcomes(config.multistart);
    std::vector<std::optional<ModelSpec>> endpoints(config.multistart);
    auto run = [&](int i) {
        CounterRng rng(detail::restart_seed(config.seed, i));
        std::vector<double> start = param.sample_start(rng, final_count);
        detail::LmOutcome outer;
        std::optional<ModelSpec> profiled;
        if (profile) {
            const std::vector<double> base = start;
            const detail::ResidualFn reduced = [&](std::span<const double> v, Eigen::VectorXd& r) {
                const auto spec = profiled_spec(base, v);
                return spec && residuals_of(*spec, r);
            };
            std::vector<double> v;
            for (int j : nonlinear) v.push_back(base[j]);
            if (v.empty()) {
                outer.u = v;
                outer.converged = true;
            } else {
                outer = detail::levenberg_marquardt(reduced, std::move(v), config.max_iterations,
                                                    config.tolerance);
            }
            profiled = profiled_spec(base, outer.u);
            if (profiled) {
                outer.sse = sum_squared_error(dataset, *profiled);
                start = param.from_spec(detail::interior(*profiled));
            }
        }
        auto polished = detail::levenberg_marquardt(full, std::move(start), config.max_iterations,
                                                    config.tolerance);
        polished.singular = polished.singular || outer.singular;
        polished.iterations += outer.iterations;
        if (profiled && !(polished.sse < outer.sse)) {
            polished.sse = outer.sse;
            polished.converged = outer.converged;
            endpoints[i] = profiled;
        } else if (std::isfinite(polished.sse)) {
            endpoints[i] = param.to_spec(polished.u);
        }
        outcomes[i] = std::move(polished);
    };
    if (config.threads > 1 && config.multistart > 1) {
        std::atomic<int> next{0};
        std::vector<std::jthread> pool;
        const int workers = std::min(config.threads, config.multistart);
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (int i = next++; i < config.multistart; i = next++) run(i);
            });
    } else {
        for (int i = 0; i < config.multistart; ++i) run(i);
    }

    FitResult result;
    result.kind = kind;
    result.free_parameters = k;
    result.t_end = horizon;
    result.observed = std::lround(final_count);
    for (int i = 0; i < config.multistart; ++i) {
        const auto& o = outcomes[i];
        if (o.singular) ++result.singular_restarts;
        if (endpoints[i] && std::isfinite(o.sse) &&
            (result.start_index < 0 || o.sse < outcomes[result.start_index].sse))
            result.start_index = i;
    }
    if (result.start_index < 0) {
        result.message = "no starting point produced a finite fit";
        return result;
    }
    const auto& best = outcomes[result.start_index];
    result.spec = endpoints[result.start_index];
    result.converged = best.converged;
    result.iterations = best.iterations;
    const auto g = goodness_of_fit(dataset, *result.spec, k);
    result.sse = g.sse;
    result.r_squared = g.r_squared;
    result.r_squared_defined = g.r_squared_defined;
    result.aic = g.aic;
    if (!result.converged) result.message = "iteration limit reached";
    return result;
}

inline FitResult fit(const FailureDataset& dataset, const ModelKind& kind,
                     const FitConfig& config = {}) {
    validate(dataset);
    return fit(curve_data(dataset), kind, config);
}

/// Fits each family in turn. Per-family failures (including insufficient
/// data) come back as unconverged results carrying a message.
inline std::vector<FitResult> fit_all(const FailureDataset& dataset,
                                      std::span<const ModelKind> kinds,
                                      const FitConfig& config = {}) {
    if (kinds.empty()) throw std::invalid_argument("no model kinds given");
    validate(dataset);
    std::vector<FitResult> results;
    results.reserve(kinds.size());
    for (const auto& kind : kinds) {
        try {
            results.push_back(fit(dataset, kind, config));
        } catch (const InsufficientData& e) {
            FitResult r;
            r.kind = kind;
            r.t_end = dataset.times.empty() ? 0.0 : dataset.times.back();
            r.observed = dataset.total();
            r.message = e.what();
            results.push_back(std::move(r));
        }
    }
    return results;
}

}  // namespace srgm
