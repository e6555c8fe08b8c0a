#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "srgm/error.hpp"

namespace srgm {

/// Cumulative failure counts observed at increasing times.
struct FailureDataset {
    std::string interval = "month";
    std::vector<double> times;
    std::vector<long> cumulative;

    std::size_t size() const noexcept { return times.size(); }
    long total() const noexcept { return cumulative.empty() ? 0 : cumulative.back(); }

    friend bool operator==(const FailureDataset&, const FailureDataset&) = default;
};

/// Throws DataError if times are not strictly increasing and positive, counts
/// decrease or go negative, or the vectors differ in length.
inline void validate(const FailureDataset& ds) {
    if (ds.times.size() != ds.cumulative.size())
        throw DataError("times and cumulative have different lengths");
    for (std::size_t i = 0; i < ds.times.size(); ++i) {
        if (!(std::isfinite(ds.times[i]) && ds.times[i] > 0.0))
            throw DataError("time " + std::to_string(i) + " is not positive");
        if (i > 0 && !(ds.times[i] > ds.times[i - 1]))
            throw DataError("times are not strictly increasing at index " + std::to_string(i));
        if (ds.cumulative[i] < 0)
            throw DataError("negative cumulative count at index " + std::to_string(i));
        if (i > 0 && ds.cumulative[i] < ds.cumulative[i - 1])
            throw DataError("cumulative counts decrease at index " + std::to_string(i));
    }
}

inline nlohmann::json to_json(const FailureDataset& ds) {
    return {{"interval", ds.interval}, {"times", ds.times}, {"cumulative", ds.cumulative}};
}

inline FailureDataset dataset_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("times") || !j.contains("cumulative"))
        throw DataError("dataset must be an object with 'times' and 'cumulative'");
    FailureDataset ds;
    if (j.contains("interval")) ds.interval = j.at("interval").get<std::string>();
    try {
        ds.times = j.at("times").get<std::vector<double>>();
        ds.cumulative = j.at("cumulative").get<std::vector<long>>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("bad dataset arrays: ") + e.what());
    }
    validate(ds);
    return ds;
}

}  // namespace srgm
