#pragma once

// Splitting detected and latent faults across complexity types.
//
// Two rules are provided:
//  * table mode:  remaining_i = p_i * (a - observed)     (remaining_by_type)
//  * model mode:  remaining_i = a * p_i - m_i(t)          (model_remaining_by_type)

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "srgm/error.hpp"
#include "srgm/model.hpp"

namespace srgm {

struct TypeShare {
    int type_index = 0;  // 1-based
    double proportion = 0.0;
    double remaining = 0.0;
    long remaining_rounded = 0;
};

struct FaultBreakdown {
    double total_fault_content = 0.0;
    std::optional<long> observed;  // table mode
    std::optional<double> time;    // model mode
    double remaining_total = 0.0;
    long remaining_total_rounded = 0;
    std::vector<TypeShare> per_type;
    bool clamped = false;  // observed exceeded the fault content
};

/// Round half to even.
inline long round_half_even(double v) { return static_cast<long>(std::nearbyint(v)); }

/// Table-mode split with arbitrary nonnegative weights. No simplex check is
/// made, so printed proportions that do not sum to one are scaled as given.
inline FaultBreakdown split_remaining(double fault_content, std::span<const double> weights,
                                      long observed) {
    if (!(std::isfinite(fault_content) && fault_content > 0.0))
        throw DomainError("fault content must be > 0");
    if (observed < 0) throw DomainError("observed count must be >= 0");
    if (weights.empty()) throw InvalidSpec("proportions must not be empty");
    for (double w : weights)
        if (!(std::isfinite(w) && w >= 0.0)) throw InvalidSpec("proportions must be >= 0");

    FaultBreakdown out;
    out.total_fault_content = fault_content;
    out.observed = observed;
    const double left = fault_content - static_cast<double>(observed);
    out.clamped = left < 0.0;
    out.remaining_total = std::max(left, 0.0);
    out.remaining_total_rounded = round_half_even(out.remaining_total);
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double r = weights[i] * out.remaining_total;
        out.per_type.push_back({static_cast<int>(i) + 1, weights[i], r, round_half_even(r)});
    }
    return out;
}

/// Table-mode split: remaining_i = p_i * max(a - observed, 0). Proportions
/// must sum to one within 1e-6.
inline FaultBreakdown remaining_by_type(double fault_content, std::span<const double> proportions,
                                        long observed) {
    double sum = 0.0;
    for (double p : proportions) {
        if (!(std::isfinite(p) && p >= 0.0 && p <= 1.0))
            throw InvalidSpec("proportions must lie in [0, 1]");
        sum += p;
    }
    if (proportions.empty() || std::abs(sum - 1.0) > 1e-6)
        throw InvalidSpec("proportions must sum to 1");
    return split_remaining(fault_content, proportions, observed);
}

/// Table-mode split driven by a multi-type spec's a and proportions.
inline FaultBreakdown remaining_by_type(const ModelSpec& spec, long observed) {
    if (!spec.kind.multi_type())
        throw UnsupportedKind(spec.kind.name() + " has a single fault type");
    validate(spec);
    return remaining_by_type(*spec.params.a, *spec.params.proportions, observed);
}

/// Mean number of type-i faults removed by t, m_i(t).
inline std::vector<double> removed_by_type(const ModelSpec& spec, double t) {
    if (!spec.kind.multi_type())
        throw UnsupportedKind(spec.kind.name() + " has a single fault type");
    const Model model(spec);
    std::vector<double> out(model.type_count());
    model.removed_by_type(t, out);
    return out;
}

namespace detail {

inline FaultBreakdown model_breakdown(const Model& model, double t) {
    FaultBreakdown out;
    out.total_fault_content = model.fault_content();
    out.time = t;
    std::vector<double> rem(model.type_count());
    model.remaining_by_type(t, rem);
    const auto props = model.proportions();
    for (int i = 0; i < model.type_count(); ++i) {
        const double r = std::max(rem[i], 0.0);
        out.per_type.push_back({i + 1, props[i], r, round_half_even(r)});
        out.remaining_total += r;
    }
    out.remaining_total_rounded = round_half_even(out.remaining_total);
    return out;
}

}  // namespace detail

/// Model-mode split at time t: remaining_i = a p_i - m_i(t).
inline FaultBreakdown model_remaining_by_type(const ModelSpec& spec, double t) {
    if (!spec.kind.multi_type())
        throw UnsupportedKind(spec.kind.name() + " has a single fault type");
    return detail::model_breakdown(Model(spec), t);
}

/// One model-mode breakdown per grid time (plot data).
inline std::vector<FaultBreakdown> breakdown_series(const ModelSpec& spec,
                                                    std::span<const double> grid) {
    if (!spec.kind.multi_type())
        throw UnsupportedKind(spec.kind.name() + " has a single fault type");
    if (grid.empty()) throw DomainError("time grid must not be empty");
    if (!std::is_sorted(grid.begin(), grid.end()))
        throw DomainError("time grid must be sorted ascending");
    const Model model(spec);
    std::vector<FaultBreakdown> rows;
    rows.reserve(grid.size());
    for (double t : grid) rows.push_back(detail::model_breakdown(model, t));
    return rows;
}

}  // namespace srgm
