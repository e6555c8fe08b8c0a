#pragma once

// srgm command-line front end. run() takes the argument vector without the
// program name and returns the process exit status:
//   0 ok, 1 usage error, 2 data error, 3 no model converged.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "srgm/srgm.hpp"

namespace srgm::cli {

namespace fs = std::filesystem;

enum Exit : int { kOk = 0, kUsage = 1, kData = 2, kNoConvergence = 3 };

/// Bad flag values or combinations discovered after parsing.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline const std::vector<std::string>& default_models() {
    static const std::vector<std::string> names{"ge2",  "ge3",  "ge4",  "ge5",  "ge6", "ge2l", "ge3l",
                                                "ge4l", "ge5l", "ge6l", "go",   "dss", "iss",  "kg",
                                                "oo-exp", "oo-ray"};
    return names;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file", path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !out.write(content.data(), static_cast<std::streamsize>(content.size())))
        throw DataError("cannot write file", path.string());
}

inline nlohmann::json read_json(const std::string& path) {
    const std::string text = read_file(path);
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        const auto upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
        std::string cause = e.what();
        if (const auto pos = cause.find("parse error"); pos != std::string::npos) cause = cause.substr(pos);
        throw DataError(cause, path + ":" + std::to_string(line));
    }
}

inline FailureDataset read_dataset(const std::string& path) {
    const auto j = read_json(path);
    try {
        return dataset_from_json(j);
    } catch (const DataError& e) {
        throw DataError(e.what(), path);
    }
}

struct LoadedFit {
    FitResult result;
    bool has_observed = false;
    std::string source;
};

inline LoadedFit read_fit(const std::string& path) {
    const auto j = read_json(path);
    try {
        LoadedFit f{fit_result_from_json(j), !(j.contains("kind") && j.contains("params")), path};
        if (!f.result.spec) throw DataError("no fitted parameters (" + f.result.message + ")", path);
        return f;
    } catch (const InvalidSpec& e) {
        throw DataError(std::string("invalid model: ") + e.what(), path);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed model document: ") + e.what(), path);
    }
}

inline std::vector<ModelKind> parse_models(const std::vector<std::string>& names) {
    std::vector<ModelKind> kinds;
    for (const auto& n : names) {
        try {
            kinds.push_back(ModelKind::parse(n));
        } catch (const InvalidSpec& e) {
            throw UsageError(e.what());
        }
    }
    if (kinds.empty()) throw UsageError("no models given");
    return kinds;
}

inline std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("SRGM_SEED"); env && *env) {
        std::uint64_t v = 0;
        const std::string s(env);
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size())
            throw UsageError("SRGM_SEED is not an unsigned integer: '" + s + "'");
        return v;
    }
    return 0;
}

inline fs::path sibling(const fs::path& path, const std::string& suffix) {
    fs::path p = path;
    p.replace_extension();
    return p.string() + suffix;
}

struct FitOptions {
    std::vector<std::string> models = default_models();
    std::optional<std::uint64_t> seed;
    int multistart = 8;
    int max_iterations = 500;
    double tolerance = 1e-10;
    int threads = 1;
    std::optional<double> exec_alpha;
    std::optional<double> exec_gamma;
    bool fit_execution = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--models", models, "Comma-separated model names")->delimiter(',');
        cmd->add_option("--seed", seed, "Restart seed (falls back to SRGM_SEED, then 0)");
        cmd->add_option("--multistart", multistart, "Random restarts per model")->check(CLI::PositiveNumber);
        cmd->add_option("--max-iterations", max_iterations, "Iteration cap per restart")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--tolerance", tolerance, "Relative SSE change that stops a restart")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--threads", threads, "Worker threads for restarts")->check(CLI::PositiveNumber);
        cmd->add_option("--exec-alpha", exec_alpha, "Execution curve total instructions (oo models)")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--exec-gamma", exec_gamma, "Execution curve rate (oo models)")
            ->check(CLI::PositiveNumber);
        cmd->add_flag("--fit-execution", fit_execution, "Estimate the execution curve as well");
    }

    FitConfig config() const {
        FitConfig c;
        c.seed = resolve_seed(seed);
        c.multistart = multistart;
        c.max_iterations = max_iterations;
        c.tolerance = tolerance;
        c.threads = threads;
        c.exec_alpha = exec_alpha;
        c.exec_gamma = exec_gamma;
        c.fit_execution = fit_execution;
        return c;
    }
};

struct FitOutcome {
    std::vector<FitResult> results;
    bool any_converged = false;
    bool data_error = false;
};

/// Fits every model, writing comparison.csv and one JSON per model into `dir`.
inline FitOutcome fit_into(const FailureDataset& ds, const std::string& source, const FitOptions& opts,
                           const fs::path& dir, std::ostream& out, std::ostream& err) {
    const auto kinds = parse_models(opts.models);
    const FitConfig config = opts.config();
    FitOutcome o;
    o.results = fit_all(ds, kinds, config);
    for (const auto& r : o.results) {
        write_file(dir / (r.kind.name() + ".json"), to_json(r).dump(2) + "\n");
        if (!r.spec) {
            err << "srgm: " << source << ": " << r.kind.name() << ": " << r.message << "\n";
            o.data_error = true;
        } else if (!r.converged) {
            err << "srgm: " << source << ": " << r.kind.name() << " did not converge (" << r.message << ")\n";
        }
        o.any_converged = o.any_converged || r.converged;
        out << r.kind.name() << ": sse=" << format_number(r.sse) << " aic=" << format_number(r.aic)
            << (r.converged ? "" : " (not converged)") << "\n";
    }
    write_file(dir / "comparison.csv", comparison_csv(o.results));
    return o;
}

inline std::vector<double> grid(double end, int points) {
    std::vector<double> g;
    for (int i = 0; i < points; ++i) g.push_back(points == 1 ? end : end * i / (points - 1));
    return g;
}

struct Forecast {
    std::vector<LabeledBreakdown> table;  // forecast rows
    std::vector<LabeledBreakdown> plot;   // plot-data rows
};

/// Table-mode and model-mode breakdowns for one fitted model.
inline void add_forecast(Forecast& f, const FitResult& r, bool table_mode, bool model_mode,
                         std::optional<long> observed, std::optional<double> time, int grid_points) {
    const ModelSpec& spec = *r.spec;
    const std::string name = spec.kind.name();
    if (table_mode) {
        if (!observed) throw UsageError(name + ": table mode needs --observed");
        auto b = remaining_by_type(spec, *observed);
        f.table.push_back({name, "table", b});
        f.plot.push_back({name, "table", b});
    }
    if (model_mode) {
        if (!time) throw UsageError(name + ": model mode needs --time");
        auto b = model_remaining_by_type(spec, *time);
        b.observed = observed;
        f.table.push_back({name, "model", b});
        for (auto& row : breakdown_series(spec, grid(*time, grid_points))) f.plot.push_back({name, "model", row});
    }
}

inline std::string summary_text(const FailureDataset& ds, const std::string& source,
                                const std::vector<FitResult>& results, const Forecast& forecast,
                                std::uint64_t seed) {
    std::ostringstream s;
    s << "dataset: " << fs::path(source).filename().string() << "\n";
    s << "intervals: " << ds.size() << " (" << ds.interval << "), cumulative bugs: " << ds.total() << "\n";
    s << "seed: " << seed << "\n\n";
    std::vector<const FitResult*> order;
    for (const auto& r : results) order.push_back(&r);
    std::stable_sort(order.begin(), order.end(), [](auto* x, auto* y) { return x->aic < y->aic; });
    s << "models by AIC:\n";
    for (const auto* r : order) {
        s << "  " << r->kind.name() << "  aic=" << format_number(r->aic) << "  sse=" << format_number(r->sse)
          << "  r2=" << (r->r_squared_defined ? format_number(r->r_squared) : std::string("undefined"))
          << (r->converged ? "" : "  not converged") << (r->message.empty() ? "" : "  [" + r->message + "]")
          << "\n";
    }
    for (const auto* r : order) {
        if (!r->converged || !r->kind.multi_type()) continue;
        s << "\nbest multi-type model: " << r->kind.name() << ", fault content "
          << format_number(*r->spec->params.a) << "\n";
        for (const auto& row : forecast.table) {
            if (row.model != r->kind.name()) continue;
            s << "  " << row.mode << " mode remaining " << row.breakdown.remaining_total_rounded << ":";
            for (const auto& t : row.breakdown.per_type) s << " type_" << t.type_index << "=" << t.remaining_rounded;
            s << "\n";
        }
        break;
    }
    return s.str();
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Software reliability growth models: fit, forecast and simulate fault removal"};
    app.name("srgm");
    app.require_subcommand(1);

    // ingest
    std::string in_path, interval = "month", ds_out, rejects_out;
    bool keep_all = false;
    auto* ingest = app.add_subcommand("ingest", "Bug-tracker CSV export to a failure dataset");
    ingest->add_option("--input", in_path, "Bug-tracker CSV export")->required();
    ingest->add_option("--interval", interval, "Bucket size")->check(CLI::IsMember({"day", "week", "month"}));
    ingest->add_option("--out", ds_out, "Dataset JSON to write")->required();
    ingest->add_option("--rejects", rejects_out, "Rejected-rows CSV (default: <out>.rejects.csv)");
    ingest->add_flag("--keep-all", keep_all, "Skip the closed-and-fixed filter");

    // fit
    std::string data_path, out_dir;
    detail::FitOptions fit_opts;
    auto* fitc = app.add_subcommand("fit", "Fit models to a dataset");
    fitc->add_option("--data", data_path, "Dataset JSON")->required();
    fitc->add_option("--out", out_dir, "Output directory")->required();
    fit_opts.attach(fitc);

    // forecast
    std::vector<std::string> fit_paths, spec_paths;
    std::optional<long> observed;
    std::optional<double> at_time;
    std::string mode = "both", fc_out, plot_out;
    int grid_points = 25;
    auto* fc = app.add_subcommand("forecast", "Remaining faults by type from fitted models");
    fc->add_option("--fit", fit_paths, "Fit result JSON (repeatable)");
    fc->add_option("--spec", spec_paths, "Model spec JSON (repeatable)");
    fc->add_option("--observed", observed, "Cumulative bugs detected (table mode)")->check(CLI::NonNegativeNumber);
    fc->add_option("--time", at_time, "Time for model mode (default: end of fitted data)")
        ->check(CLI::NonNegativeNumber);
    fc->add_option("--mode", mode, "table, model or both")->check(CLI::IsMember({"table", "model", "both"}));
    fc->add_option("--out", fc_out, "Forecast CSV to write")->required();
    fc->add_option("--plot", plot_out, "Plot-data CSV (default: <out>.plot.csv)");
    fc->add_option("--grid-points", grid_points, "Model-mode plot points from 0 to --time")
        ->check(CLI::Range(2, 100000));

    // simulate
    std::string sim_spec, events_out, sim_ds_out;
    double horizon = 0.0;
    std::optional<std::uint64_t> sim_seed;
    std::optional<int> intervals;
    auto* sim = app.add_subcommand("simulate", "Draw an NHPP failure history from a model");
    sim->add_option("--spec", sim_spec, "Model spec or fit result JSON")->required();
    sim->add_option("--horizon", horizon, "Simulated time span")->required()->check(CLI::PositiveNumber);
    sim->add_option("--seed", sim_seed, "Random seed (falls back to SRGM_SEED, then 0)");
    sim->add_option("--out", events_out, "Event-time CSV to write")->required();
    sim->add_option("--intervals", intervals, "Also bin into this many intervals")->check(CLI::PositiveNumber);
    sim->add_option("--dataset", sim_ds_out, "Binned dataset JSON (default: <out>.json)");

    // report
    std::string rep_data, rep_input, rep_dir;
    std::string rep_interval = "month";
    std::optional<long> rep_observed;
    detail::FitOptions rep_opts;
    auto* rep = app.add_subcommand("report", "Ingest or load, fit, forecast and summarize in one directory");
    auto* rep_data_opt = rep->add_option("--data", rep_data, "Dataset JSON");
    auto* rep_input_opt = rep->add_option("--input", rep_input, "Bug-tracker CSV export instead of --data");
    rep_data_opt->excludes(rep_input_opt);
    rep->add_option("--interval", rep_interval, "Bucket size with --input")
        ->check(CLI::IsMember({"day", "week", "month"}));
    rep->add_option("--observed", rep_observed, "Bugs detected for table mode (default: dataset total)")
        ->check(CLI::NonNegativeNumber);
    rep->add_option("--out", rep_dir, "Output directory")->required();
    rep_opts.attach(rep);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*ingest) {
            std::ifstream in(in_path, std::ios::binary);
            if (!in) throw DataError("cannot open file", in_path);
            const auto parsed = parse_csv(in, in_path);
            for (const auto& r : parsed.rejects)
                err << "srgm: " << in_path << ":" << r.line << ": rejected row" << (r.id.empty() ? "" : " " + r.id)
                    << ": " << r.reason << "\n";
            const auto records = keep_all ? parsed.records : filter_valid(parsed.records);
            detail::write_file(rejects_out.empty() ? detail::sibling(ds_out, ".rejects.csv") : fs::path(rejects_out),
                               to_csv(parsed.rejects));
            if (records.empty()) throw DataError("no valid records", in_path);
            const auto ds = bucket(records, parse_interval(interval));
            detail::write_file(ds_out, to_json(ds).dump(2) + "\n");
            out << parsed.records.size() << " records, " << parsed.rejects.size() << " rejected, "
                << records.size() << " kept, " << ds.size() << " " << interval << " intervals\n";
            return kOk;
        }

        if (*fitc) {
            const auto ds = detail::read_dataset(data_path);
            const auto o = detail::fit_into(ds, data_path, fit_opts, out_dir, out, err);
            if (o.any_converged) return kOk;
            return o.data_error ? kData : kNoConvergence;
        }

        if (*fc) {
            if (fit_paths.empty() && spec_paths.empty()) throw UsageError("forecast needs --fit or --spec");
            std::vector<detail::LoadedFit> fits;
            for (const auto& p : fit_paths) fits.push_back(detail::read_fit(p));
            for (const auto& p : spec_paths) fits.push_back(detail::read_fit(p));
            const bool table_mode = mode != "model", model_mode = mode != "table";
            detail::Forecast f;
            for (const auto& lf : fits) {
                if (!lf.result.spec->kind.multi_type()) {
                    err << "srgm: " << lf.source << ": " << lf.result.kind.name()
                        << " has a single fault type; skipped\n";
                    continue;
                }
                std::optional<long> obs = observed;
                if (!obs && lf.has_observed) obs = lf.result.observed;
                std::optional<double> t = at_time;
                if (!t && lf.result.t_end > 0.0) t = lf.result.t_end;
                try {
                    detail::add_forecast(f, lf.result, table_mode, model_mode, obs, t, grid_points);
                } catch (const InvalidSpec& e) {
                    throw DataError(std::string("invalid model: ") + e.what(), lf.source);
                }
            }
            if (f.table.empty()) throw UsageError("no multi-type model to forecast");
            detail::write_file(fc_out, forecast_csv(f.table));
            detail::write_file(plot_out.empty() ? detail::sibling(fc_out, ".plot.csv") : fs::path(plot_out),
                               breakdown_csv(f.plot));
            for (const auto& row : f.table) {
                out << row.model << " " << row.mode << ": remaining " << row.breakdown.remaining_total_rounded;
                for (const auto& t : row.breakdown.per_type) out << " " << t.remaining_rounded;
                out << (row.breakdown.clamped ? " (observed exceeds fault content)" : "") << "\n";
            }
            return kOk;
        }

        if (*sim) {
            const auto lf = detail::read_fit(sim_spec);
            const auto seed = detail::resolve_seed(sim_seed);
            const auto h = simulate(*lf.result.spec, horizon, seed);
            detail::write_file(events_out, events_csv(h));
            if (intervals) {
                const auto ds = to_dataset(h, *intervals);
                detail::write_file(sim_ds_out.empty() ? detail::sibling(events_out, ".json") : fs::path(sim_ds_out),
                                   to_json(ds).dump(2) + "\n");
            }
            out << h.event_times.size() << " events on (0, " << format_number(horizon) << "]\n";
            return kOk;
        }

        if (*rep) {
            if (rep_data.empty() && rep_input.empty()) throw UsageError("report needs --data or --input");
            const fs::path dir(rep_dir);
            FailureDataset ds;
            std::string source = rep_data;
            if (!rep_input.empty()) {
                std::ifstream in(rep_input, std::ios::binary);
                if (!in) throw DataError("cannot open file", rep_input);
                const auto parsed = parse_csv(in, rep_input);
                detail::write_file(dir / "rejects.csv", to_csv(parsed.rejects));
                const auto records = filter_valid(parsed.records);
                if (records.empty()) throw DataError("no valid records", rep_input);
                ds = bucket(records, parse_interval(rep_interval));
                source = rep_input;
            } else {
                ds = detail::read_dataset(rep_data);
            }
            detail::write_file(dir / "dataset.json", to_json(ds).dump(2) + "\n");
            const auto o = detail::fit_into(ds, source, rep_opts, dir / "fits", out, err);
            detail::write_file(dir / "comparison.csv", comparison_csv(o.results));

            detail::Forecast f;
            const long obs = rep_observed.value_or(ds.total());
            for (const auto& r : o.results)
                if (r.converged && r.kind.multi_type())
                    detail::add_forecast(f, r, true, true, obs, r.t_end, 25);
            detail::write_file(dir / "forecast.csv", forecast_csv(f.table));
            detail::write_file(dir / "plot.csv", breakdown_csv(f.plot));
            detail::write_file(dir / "summary.txt",
                               detail::summary_text(ds, source, o.results, f, rep_opts.config().seed));
            if (o.any_converged) return kOk;
            return o.data_error ? kData : kNoConvergence;
        }
    } catch (const UsageError& e) {
        err << "srgm: " << e.what() << "\n";
        return kUsage;
    } catch (const DataError& e) {
        err << "srgm: " << e.what() << "\n";
        return kData;
    } catch (const InsufficientData& e) {
        err << "srgm: " << e.what() << "\n";
        return kData;
    } catch (const std::exception& e) {
        err << "srgm: " << e.what() << "\n";
        return kData;
    }
    return kUsage;
}

}  // namespace srgm::cli
