#pragma once

// JSON and CSV encodings of fit results, fault breakdowns and simulated
// histories. Numbers are written in shortest round-trip form so output bytes
// depend only on the values.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "srgm/csv.hpp"
#include "srgm/estimation.hpp"
#include "srgm/fault_complexity.hpp"
#include "srgm/model_json.hpp"
#include "srgm/simulation.hpp"

namespace srgm {

inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_number(const std::string& s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw DataError("not a number: '" + s + "'");
    return v;
}

namespace detail {

inline nlohmann::json finite_or_null(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Fit results

inline nlohmann::json to_json(const FitResult& r) {
    nlohmann::json j;
    j["model"] = r.kind.name();
    j["converged"] = r.converged;
    j["spec"] = r.spec ? to_json(*r.spec) : nlohmann::json(nullptr);
    j["sse"] = detail::finite_or_null(r.sse);
    j["r_squared"] = r.r_squared_defined ? detail::finite_or_null(r.r_squared) : nullptr;
    j["aic"] = detail::finite_or_null(r.aic);
    j["iterations"] = r.iterations;
    j["start_index"] = r.start_index;
    j["singular_restarts"] = r.singular_restarts;
    j["free_parameters"] = r.free_parameters;
    j["t_end"] = r.t_end;
    j["observed"] = r.observed;
    j["message"] = r.message;
    return j;
}

/// Accepts a FitResult document or a bare ModelSpec document.
inline FitResult fit_result_from_json(const nlohmann::json& j) {
    FitResult r;
    if (j.contains("kind") && j.contains("params")) {
        r.spec = spec_from_json(j);
        r.kind = r.spec->kind;
        r.converged = true;
        return r;
    }
    if (!j.contains("model")) throw InvalidSpec("fit result has no 'model' field");
    r.kind = ModelKind::parse(j.at("model").get<std::string>());
    if (j.contains("spec") && !j.at("spec").is_null()) r.spec = spec_from_json(j.at("spec"));
    auto num = [&](const char* key, double fallback) {
        return j.contains(key) && j.at(key).is_number() ? j.at(key).get<double>() : fallback;
    };
    r.converged = j.value("converged", false);
    r.sse = num("sse", std::numeric_limits<double>::infinity());
    r.r_squared_defined = j.contains("r_squared") && j.at("r_squared").is_number();
    r.r_squared = num("r_squared", std::numeric_limits<double>::quiet_NaN());
    r.aic = num("aic", std::numeric_limits<double>::infinity());
    r.iterations = j.value("iterations", 0);
    r.start_index = j.value("start_index", -1);
    r.singular_restarts = j.value("singular_restarts", 0);
    r.free_parameters = j.value("free_parameters", 0);
    r.t_end = num("t_end", 0.0);
    r.observed = j.value("observed", 0L);
    r.message = j.value("message", std::string{});
    return r;
}

/// One row per model, columns in parameter-table order followed by fit
/// diagnostics and the parameters specific to the other families.
inline std::string comparison_csv(const std::vector<FitResult>& results) {
    std::string out =
        "model,a,b,p1,p2,p3,p4,p5,p6,beta,sse,r_squared,aic,converged,r,p,q,alpha,gamma\n";
    auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string{}; };
    for (const auto& r : results) {
        std::vector<std::string> row{r.kind.name()};
        if (r.spec) {
            const ModelParams& m = r.spec->params;
            row.push_back(opt(m.a));
            row.push_back(opt(m.b));
            for (int i = 0; i < kMaxStages; ++i)
                row.push_back(m.proportions && i < static_cast<int>(m.proportions->size())
                                  ? format_number((*m.proportions)[i])
                                  : std::string{});
            row.push_back(opt(m.beta));
        } else {
            row.resize(row.size() + 9);
        }
        row.push_back(r.spec ? format_number(r.sse) : std::string{});
        row.push_back(r.r_squared_defined ? format_number(r.r_squared) : std::string{});
        row.push_back(r.spec ? format_number(r.aic) : std::string{});
        row.push_back(r.converged ? "true" : "false");
        if (r.spec) {
            const ModelParams& m = r.spec->params;
            row.push_back(opt(m.r));
            row.push_back(opt(m.p));
            row.push_back(opt(m.q));
            row.push_back(m.exec ? format_number(m.exec->total_instructions) : std::string{});
            row.push_back(m.exec ? format_number(m.exec->rate) : std::string{});
        } else {
            row.resize(row.size() + 5);
        }
        out += csv::join(row) + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Fault breakdowns

struct LabeledBreakdown {
    std::string model;
    std::string mode;  // "table" or "model"
    FaultBreakdown breakdown;
};

/// Remaining-faults table: rounded counts per type, one row per model and mode.
inline std::string forecast_csv(const std::vector<LabeledBreakdown>& rows) {
    std::size_t width = 0;
    for (const auto& r : rows) width = std::max(width, r.breakdown.per_type.size());
    std::string out = "model,mode,fault_content,observed,t,remaining_total,remaining_rounded";
    for (std::size_t i = 1; i <= width; ++i) out += ",type_" + std::to_string(i);
    out += ",clamped\n";
    for (const auto& r : rows) {
        const auto& b = r.breakdown;
        std::vector<std::string> row{r.model,
                                     r.mode,
                                     format_number(b.total_fault_content),
                                     b.observed ? std::to_string(*b.observed) : std::string{},
                                     b.time ? format_number(*b.time) : std::string{},
                                     format_number(b.remaining_total),
                                     std::to_string(b.remaining_total_rounded)};
        for (std::size_t i = 0; i < width; ++i)
            row.push_back(i < b.per_type.size() ? std::to_string(b.per_type[i].remaining_rounded)
                                                : std::string{});
        row.push_back(b.clamped ? "true" : "false");
        out += csv::join(row) + "\n";
    }
    return out;
}

/// Plot data: model, t, total_remaining, type_1 ... type_n (unrounded).
inline std::string breakdown_csv(const std::vector<LabeledBreakdown>& rows) {
    std::size_t width = 0;
    for (const auto& r : rows) width = std::max(width, r.breakdown.per_type.size());
    std::string out = "model,t,total_remaining";
    for (std::size_t i = 1; i <= width; ++i) out += ",type_" + std::to_string(i);
    out += "\n";
    for (const auto& r : rows) {
        const auto& b = r.breakdown;
        std::vector<std::string> row{r.model, b.time ? format_number(*b.time) : std::string{},
                                     format_number(b.remaining_total)};
        for (std::size_t i = 0; i < width; ++i)
            row.push_back(i < b.per_type.size() ? format_number(b.per_type[i].remaining)
                                                : std::string{});
        out += csv::join(row) + "\n";
    }
    return out;
}

inline nlohmann::json to_json(const FaultBreakdown& b) {
    nlohmann::json types = nlohmann::json::array();
    for (const auto& s : b.per_type)
        types.push_back({{"type", s.type_index},
                         {"proportion", s.proportion},
                         {"remaining", s.remaining},
                         {"remaining_rounded", s.remaining_rounded}});
    nlohmann::json j{{"fault_content", b.total_fault_content},
                     {"remaining_total", b.remaining_total},
                     {"remaining_rounded", b.remaining_total_rounded},
                     {"clamped", b.clamped},
                     {"per_type", types}};
    j["observed"] = b.observed ? nlohmann::json(*b.observed) : nlohmann::json(nullptr);
    j["t"] = b.time ? nlohmann::json(*b.time) : nlohmann::json(nullptr);
    return j;
}

/// Reads plot data written by breakdown_csv back into labeled breakdowns.
inline std::vector<LabeledBreakdown> read_breakdown_csv(std::istream& in,
                                                        const std::string& source = "<input>") {
    const auto rows = csv::read(in, source);
    if (rows.empty() || rows.front().fields.size() < 3 || rows.front().fields[0] != "model")
        throw DataError("not a breakdown table", source);
    std::vector<LabeledBreakdown> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& f = rows[r].fields;
        if (f.size() != rows.front().fields.size())
            throw DataError("field count mismatch", source + ":" + std::to_string(rows[r].line));
        LabeledBreakdown lb{f[0], "model", {}};
        if (!f[1].empty()) lb.breakdown.time = parse_number(f[1]);
        lb.breakdown.remaining_total = parse_number(f[2]);
        lb.breakdown.remaining_total_rounded = round_half_even(lb.breakdown.remaining_total);
        for (std::size_t i = 3; i < f.size(); ++i) {
            if (f[i].empty()) continue;
            const double v = parse_number(f[i]);
            lb.breakdown.per_type.push_back({static_cast<int>(i - 2), 0.0, v, round_half_even(v)});
        }
        out.push_back(std::move(lb));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Simulated histories

inline std::string events_csv(const SimulatedHistory& h) {
    std::string out = "event_time\n";
    for (double t : h.event_times) out += format_number(t) + "\n";
    return out;
}

inline std::vector<double> read_events_csv(std::istream& in, const std::string& source = "<input>") {
    const auto rows = csv::read(in, source);
    if (rows.empty() || rows.front().fields != std::vector<std::string>{"event_time"})
        throw DataError("missing 'event_time' header", source);
    std::vector<double> times;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].fields.size() != 1)
            throw DataError("expected one field", source + ":" + std::to_string(rows[r].line));
        times.push_back(parse_number(rows[r].fields[0]));
    }
    return times;
}

}  // namespace srgm
