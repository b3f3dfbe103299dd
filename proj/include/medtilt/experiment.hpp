/**
 * @brief Experiment configuration, execution and report serialization for
 * the command-line front end.
 *
 * Exit codes (see exit_code_for):
 *   0 success, 1 unexpected failure, 2 configuration error,
 *   3 measure construction error, 4 I/O error, 5 numerical failure.
 */
#pragma once

#include "medtilt/choquet.hpp"
#include "medtilt/errors.hpp"
#include "medtilt/measures.hpp"
#include "medtilt/medianlaw.hpp"
#include "medtilt/numerics.hpp"
#include "medtilt/symmetry.hpp"

#include <json.hpp>

#include <array>
#include <charconv>
#include <exception>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace medtilt {

enum class Command {
    median_gap,
    sign_kernel,
    deriva,
    mean_median,
    choquet_iterate,
    symmetry_sweep,
    lipschitz,
    full_report
};

inline constexpr std::array<std::pair<Command, std::string_view>, 8> kCommandNames = {{
    {Command::median_gap, "median-gap"},
    {Command::sign_kernel, "sign-kernel"},
    {Command::deriva, "deriva"},
    {Command::mean_median, "mean-median"},
    {Command::choquet_iterate, "choquet-iterate"},
    {Command::symmetry_sweep, "symmetry-sweep"},
    {Command::lipschitz, "lipschitz"},
    {Command::full_report, "full-report"},
}};

inline std::string_view to_string(Command c)
{
    for (const auto& [cmd, name] : kCommandNames)
        if (cmd == c) return name;
    return "?";
}

inline Command parse_command(std::string_view name)
{
    for (const auto& [cmd, n] : kCommandNames)
        if (n == name) return cmd;
    throw ConfigParse("unknown command '" + std::string(name) + "'");
}

enum class OutputFormat { csv, json };

inline OutputFormat parse_format(std::string_view s)
{
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    throw ConfigParse("unknown output format '" + std::string(s) + "' (expected csv or json)");
}

/// Grid and kernel for choquet-iterate; g is sampled on [grid_min, grid_max].
struct ChoquetOptions {
    double grid_min = -60.0;
    double grid_max = 60.0;
    double grid_step = 0.01;
    double kernel_tol = 1e-10;
};

struct ExperimentConfig {
    std::string measure = "gaussian(0,1)";
    Command command = Command::median_gap;
    double t_min = -6.0;
    double t_max = 6.0;
    std::size_t t_points = 49;
    QuadratureConfig quadrature{};
    std::string output_path;
    OutputFormat output_format = OutputFormat::csv;
    std::size_t steps = 8;
    double halfwidth = 1.0;
    ChoquetOptions choquet{};

    void validate() const
    {
        if (t_points == 0) throw ConfigParse("t_points must be at least 1");
        if (t_points == 1 ? !(t_min <= t_max) : !(t_min < t_max))
            throw ConfigParse("t_range must satisfy lo < hi (lo <= hi for a single point)");
        if (output_path.empty()) throw ConfigParse("no output path given");
        if (command == Command::full_report && output_format != OutputFormat::json)
            throw ConfigParse("full-report writes json only");
        if (!(halfwidth > 0.0)) throw ConfigParse("halfwidth must be positive");
        if (!(choquet.grid_min < choquet.grid_max) || !(choquet.grid_step > 0.0))
            throw ConfigParse("choquet grid must satisfy grid_min < grid_max and grid_step > 0");
        try {
            medtilt::validate(quadrature);
        } catch (const DomainError& e) {
            throw ConfigParse(e.what());
        }
    }
};

/**
 * Merge a json config document into cfg. Recognised keys: measure, command,
 * t_range [lo,hi], t_points, quadrature {truncation_halfwidth, rel_tol,
 * abs_tol, max_subdivisions}, output_path, output_format, steps, halfwidth,
 * choquet {grid_min, grid_max, grid_step, kernel_tol}. Unknown keys are
 * rejected.
 */
inline void apply_json_config(ExperimentConfig& cfg, const nlohmann::json& doc)
{
    try {
        if (!doc.is_object()) throw ConfigParse("config root must be a json object");
        for (const auto& [key, val] : doc.items()) {
            if (key == "measure") {
                cfg.measure = val.get<std::string>();
            } else if (key == "command") {
                cfg.command = parse_command(val.get<std::string>());
            } else if (key == "t_range") {
                if (!val.is_array() || val.size() != 2)
                    throw ConfigParse("t_range must be a two-element array");
                cfg.t_min = val[0].get<double>();
                cfg.t_max = val[1].get<double>();
            } else if (key == "t_points") {
                cfg.t_points = val.get<std::size_t>();
            } else if (key == "quadrature") {
                for (const auto& [qk, qv] : val.items()) {
                    if (qk == "truncation_halfwidth") cfg.quadrature.truncation_halfwidth = qv.get<double>();
                    else if (qk == "rel_tol") cfg.quadrature.rel_tol = qv.get<double>();
                    else if (qk == "abs_tol") cfg.quadrature.abs_tol = qv.get<double>();
                    else if (qk == "max_subdivisions") cfg.quadrature.max_subdivisions = qv.get<std::size_t>();
                    else throw ConfigParse("unknown quadrature key '" + qk + "'");
                }
            } else if (key == "output_path") {
                cfg.output_path = val.get<std::string>();
            } else if (key == "output_format") {
                cfg.output_format = parse_format(val.get<std::string>());
            } else if (key == "steps") {
                cfg.steps = val.get<std::size_t>();
            } else if (key == "halfwidth") {
                cfg.halfwidth = val.get<double>();
            } else if (key == "choquet") {
                for (const auto& [ck, cv] : val.items()) {
                    if (ck == "grid_min") cfg.choquet.grid_min = cv.get<double>();
                    else if (ck == "grid_max") cfg.choquet.grid_max = cv.get<double>();
                    else if (ck == "grid_step") cfg.choquet.grid_step = cv.get<double>();
                    else if (ck == "kernel_tol") cfg.choquet.kernel_tol = cv.get<double>();
                    else throw ConfigParse("unknown choquet key '" + ck + "'");
                }
            } else {
                throw ConfigParse("unknown config key '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigParse(std::string("config: ") + e.what());
    }
}

inline void apply_json_config_file(ExperimentConfig& cfg, const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigParse("cannot read config file '" + path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigParse("config file '" + path + "': " + e.what());
    }
    apply_json_config(cfg, doc);
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

/// 17 significant digits, locale independent.
inline std::string format_number(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline std::string diagnostic_csv(const DiagnosticReport& rep)
{
    std::string out = "t,residual,error_estimate\n";
    for (std::size_t i = 0; i < rep.t_grid.size(); ++i)
        out += format_number(rep.t_grid[i]) + ',' + format_number(rep.residuals[i]) + ',' +
            format_number(rep.error_estimates[i]) + '\n';
    return out;
}

inline nlohmann::json diagnostic_json(const DiagnosticReport& rep)
{
    return {
        {"name", rep.name},
        {"t", rep.t_grid},
        {"residual", rep.residuals},
        {"error_estimate", rep.error_estimates},
        {"summary", {{"max_abs_residual", rep.max_abs_residual}, {"argmax_t", rep.argmax_t}}},
    };
}

/// Inverse of diagnostic_json.
inline DiagnosticReport diagnostic_from_json(const nlohmann::json& j)
{
    DiagnosticReport rep;
    rep.name = j.at("name").get<std::string>();
    rep.t_grid = j.at("t").get<std::vector<double>>();
    rep.residuals = j.at("residual").get<std::vector<double>>();
    rep.error_estimates = j.at("error_estimate").get<std::vector<double>>();
    rep.max_abs_residual = j.at("summary").at("max_abs_residual").get<double>();
    rep.argmax_t = j.at("summary").at("argmax_t").get<double>();
    return rep;
}

inline std::string trace_csv(const IterationTrace& tr)
{
    std::string out = "step,oscillation,window_lo,window_hi\n";
    for (std::size_t k = 0; k < tr.oscillations.size(); ++k)
        out += std::to_string(k) + ',' + format_number(tr.oscillations[k]) + ',' +
            format_number(tr.windows[k].lo) + ',' + format_number(tr.windows[k].hi) + '\n';
    return out;
}

inline nlohmann::json trace_json(const IterationTrace& tr)
{
    std::vector<std::size_t> step;
    std::vector<double> lo, hi;
    for (std::size_t k = 0; k < tr.oscillations.size(); ++k) {
        step.push_back(k);
        lo.push_back(tr.windows[k].lo);
        hi.push_back(tr.windows[k].hi);
    }
    return {{"step", step},
            {"oscillation", tr.oscillations},
            {"window_lo", lo},
            {"window_hi", hi},
            {"window_shrink_per_step", tr.window_shrink_per_step}};
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

struct RunSummary {
    double max_abs_residual = 0.0;
    double at_t = 0.0;
};

inline std::string summary_line(const RunSummary& s)
{
    return "max|residual| = " + format_number(s.max_abs_residual) +
        " at t = " + format_number(s.at_t);
}

struct RunOutput {
    std::string content; // file body
    RunSummary summary;
};

namespace detail {

inline nlohmann::json symmetry_json(const BaseMeasure& m, const std::vector<double>& grid,
                                    const QuadratureConfig& q, DiagnosticReport& rep)
{
    rep.name = "asymmetry_score";
    rep.t_grid = grid;
    std::vector<double> centers;
    for (double t : grid) {
        const auto s = asymmetry_score(m, t, q);
        const TiltedView v(m, t, q);
        rep.residuals.push_back(s.asymmetry_score);
        rep.error_estimates.push_back(tilted_mean_estimate(v).error);
        centers.push_back(s.center);
    }
    rep.summarize();
    auto j = diagnostic_json(rep);
    j["center"] = centers;
    if (grid.size() >= 5) {
        const auto fit = quadratic_logL_fit(m, grid, q);
        j["quadratic_fit"] = {{"a", fit.a}, {"b", fit.b}, {"c", fit.c},
                              {"max_fit_residual", fit.max_fit_residual}};
    }
    return j;
}

inline nlohmann::json lipschitz_json(const BaseMeasure& m, double A, const QuadratureConfig& q,
                                     DiagnosticReport& rep)
{
    const double c = lipschitz_bound(m, A, q);
    rep.name = "lipschitz";
    rep.t_grid = {A};
    rep.residuals = {c};
    rep.error_estimates = {0.0};
    rep.summarize();
    return {{"halfwidth", A}, {"c_A", c}};
}

} // namespace detail

/// Execute a validated config and return the report body; does not touch the filesystem.
inline RunOutput execute(const ExperimentConfig& cfg)
{
    cfg.validate();
    const MeasureSpec spec = parse_measure_spec(cfg.measure);
    const BaseMeasure m = build_measure(spec, cfg.quadrature);
    const auto grid = linspace(cfg.t_min, cfg.t_max, cfg.t_points);
    const auto& q = cfg.quadrature;

    nlohmann::json doc = {{"command", std::string(to_string(cfg.command))},
                          {"measure", to_string(m.spec())}};
    RunOutput out;
    auto finish = [&](const DiagnosticReport& rep, std::string csv) {
        out.summary = {rep.max_abs_residual, rep.argmax_t};
        if (cfg.output_format == OutputFormat::csv) {
            out.content = std::move(csv);
        } else {
            doc.update(diagnostic_json(rep));
            out.content = doc.dump(2) + '\n';
        }
    };

    switch (cfg.command) {
    case Command::median_gap:
    case Command::sign_kernel:
    case Command::deriva:
    case Command::mean_median: {
        const auto rep = scan(m, to_string(cfg.command), grid, q);
        finish(rep, diagnostic_csv(rep));
        break;
    }
    case Command::choquet_iterate: {
        const auto setup = make_convolution_setup(cfg.choquet.grid_step, cfg.choquet.kernel_tol);
        const auto n = static_cast<std::size_t>(
            std::llround((cfg.choquet.grid_max - cfg.choquet.grid_min) / cfg.choquet.grid_step)) + 1;
        std::vector<double> values(n);
        for (std::size_t i = 0; i < n; ++i)
            values[i] = m.g(cfg.choquet.grid_min + static_cast<double>(i) * cfg.choquet.grid_step);
        const GridFunction g0(cfg.choquet.grid_min, cfg.choquet.grid_step, std::move(values));
        const auto trace = iterate_fixed_point(g0, cfg.steps, setup);
        // Residual of the trace: oscillation of the final iterate, reported at its step index.
        out.summary = {trace.oscillations.back(), static_cast<double>(cfg.steps)};
        if (cfg.output_format == OutputFormat::csv) {
            out.content = trace_csv(trace);
        } else {
            doc.update(trace_json(trace));
            doc["kernel_halfwidth"] = setup.kernel_halfwidth;
            doc["grid_step"] = setup.step;
            doc["summary"] = {{"max_abs_residual", out.summary.max_abs_residual},
                              {"argmax_t", out.summary.at_t}};
            out.content = doc.dump(2) + '\n';
        }
        break;
    }
    case Command::symmetry_sweep: {
        DiagnosticReport rep;
        auto extra = detail::symmetry_json(m, grid, q, rep);
        finish(rep, diagnostic_csv(rep));
        if (cfg.output_format == OutputFormat::json) {
            doc.update(extra);
            out.content = doc.dump(2) + '\n';
        }
        break;
    }
    case Command::lipschitz: {
        DiagnosticReport rep;
        auto extra = detail::lipschitz_json(m, cfg.halfwidth, q, rep);
        finish(rep, diagnostic_csv(rep));
        if (cfg.output_format == OutputFormat::json) {
            doc.update(extra);
            out.content = doc.dump(2) + '\n';
        }
        break;
    }
    case Command::full_report: {
        RunSummary worst;
        bool first = true;
        for (Diagnostic d : kAllDiagnostics) {
            const auto rep = scan(m, d, grid, q);
            doc[std::string(to_string(d))] = diagnostic_json(rep);
            if (first || rep.max_abs_residual > worst.max_abs_residual)
                worst = {rep.max_abs_residual, rep.argmax_t};
            first = false;
        }
        DiagnosticReport sym, lip;
        doc["symmetry"] = detail::symmetry_json(m, grid, q, sym);
        auto lj = detail::lipschitz_json(m, cfg.halfwidth, q, lip);
        doc["lipschitz"] = lj;
        doc["summary"] = {{"max_abs_residual", worst.max_abs_residual}, {"argmax_t", worst.at_t}};
        out.summary = worst;
        out.content = doc.dump(2) + '\n';
        break;
    }
    }
    return out;
}

/// Execute and write the report file.
inline RunSummary run(const ExperimentConfig& cfg)
{
    const auto out = execute(cfg);
    std::ofstream file(cfg.output_path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open '" + cfg.output_path + "' for writing");
    file << out.content;
    file.flush();
    if (!file) throw IoError("failed writing '" + cfg.output_path + "'");
    return out.summary;
}

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitMeasure = 3;
inline constexpr int kExitIo = 4;
inline constexpr int kExitNumerical = 5;

inline int exit_code_for(const std::exception& e)
{
    if (dynamic_cast<const ConfigParse*>(&e) || dynamic_cast<const UnknownDiagnostic*>(&e))
        return kExitConfig;
    if (dynamic_cast<const MeasureError*>(&e)) return kExitMeasure;
    if (dynamic_cast<const IoError*>(&e)) return kExitIo;
    if (dynamic_cast<const Error*>(&e)) return kExitNumerical;
    return kExitInternal;
}

} // namespace medtilt
