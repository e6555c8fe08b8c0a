#pragma once

// NHPP sample paths by thinning against a piecewise-constant majorant.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <vector>

#include "srgm/dataset.hpp"
#include "srgm/error.hpp"
#include "srgm/model.hpp"
#include "srgm/rng.hpp"

namespace srgm {

struct SimulationOptions {
    int grid_cells = 1024;
    double headroom = 1.01;
    int probes_per_cell = 9;  // intensity samples used to find each cell's max
};

struct SimulatedHistory {
    ModelSpec spec;
    double horizon = 0.0;
    std::vector<double> event_times;
    std::uint64_t seed = 0;
    /// Largest intensity / majorant ratio met at a candidate point; <= 1 when
    /// the majorant is valid.
    double max_majorant_ratio = 0.0;
};

/// Draws event times on (0, horizon]. The count is Poisson with mean
/// mvf(spec, horizon); the output depends only on (spec, horizon, seed, options).
inline SimulatedHistory simulate(const ModelSpec& spec, double horizon, std::uint64_t seed,
                                 const SimulationOptions& options = {}) {
    if (!(std::isfinite(horizon) && horizon > 0.0)) throw DomainError("horizon must be > 0");
    if (options.grid_cells < 1 || options.probes_per_cell < 2 || !(options.headroom >= 1.0))
        throw std::invalid_argument("bad simulation options");

    SimulatedHistory history{spec, horizon, {}, seed, 0.0};
    if (spec.params.a && *spec.params.a == 0.0) return history;
    const Model model(spec);

    CounterRng rng(seed);
    const double width = horizon / options.grid_cells;
    for (int cell = 0; cell < options.grid_cells; ++cell) {
        const double lo = cell * width;
        const double hi = cell + 1 == options.grid_cells ? horizon : lo + width;
        double peak = 0.0;
        for (int j = 0; j < options.probes_per_cell; ++j)
            peak = std::max(peak, model.intensity(lo + (hi - lo) * j / (options.probes_per_cell - 1)));
        const double majorant = peak * options.headroom;
        if (!(majorant > 0.0)) continue;

        double t = lo;
        while (true) {
            t += rng.exponential() / majorant;
            if (t > hi) break;
            const double ratio = model.intensity(t) / majorant;
            history.max_majorant_ratio = std::max(history.max_majorant_ratio, ratio);
            assert(ratio <= 1.0);
            if (rng.uniform() <= ratio) history.event_times.push_back(t);
        }
    }
    return history;
}

/// Bins event times into `interval_count` equal intervals over (0, horizon];
/// interval k covers ((k-1)w, kw] and is reported at time k*w.
inline FailureDataset to_dataset(const SimulatedHistory& history, int interval_count) {
    if (interval_count < 1) throw DomainError("interval count must be >= 1");
    const double width = history.horizon / interval_count;
    std::vector<long> counts(interval_count, 0);
    for (double t : history.event_times) {
        auto k = static_cast<long>(std::ceil(t / width)) - 1;
        k = std::clamp<long>(k, 0, interval_count - 1);
        ++counts[k];
    }
    FailureDataset ds;
    ds.interval = "simulated";
    long running = 0;
    for (int k = 0; k < interval_count; ++k) {
        running += counts[k];
        ds.times.push_back(k + 1 == interval_count ? history.horizon : (k + 1) * width);
        ds.cumulative.push_back(running);
    }
    return ds;
}

}  // namespace srgm
