/**
 * @brief Residual functionals of the median property "t is a median of P_t".
 *
 * Each functional vanishes identically for N(0,1). The pointwise forms take
 * a single t; scan() sweeps one of them over a grid and summarises.
 */
#pragma once

#include "medtilt/errors.hpp"
#include "medtilt/measures.hpp"
#include "medtilt/numerics.hpp"
#include "medtilt/tilting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace medtilt {

enum class Diagnostic { median_gap, sign_kernel, deriva, mean_median };

inline constexpr std::array<Diagnostic, 4> kAllDiagnostics = {
    Diagnostic::median_gap, Diagnostic::sign_kernel, Diagnostic::deriva, Diagnostic::mean_median};

inline std::string_view to_string(Diagnostic d)
{
    switch (d) {
    case Diagnostic::median_gap: return "median_gap";
    case Diagnostic::sign_kernel: return "sign_kernel";
    case Diagnostic::deriva: return "deriva";
    case Diagnostic::mean_median: return "mean_median";
    }
    return "?";
}

/// Accepts both the underscore names and the CLI's dashed spellings.
inline Diagnostic parse_diagnostic(std::string_view name)
{
    std::string n(name);
    std::replace(n.begin(), n.end(), '-', '_');
    for (Diagnostic d : kAllDiagnostics)
        if (n == to_string(d)) return d;
    throw UnknownDiagnostic("unknown diagnostic '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Pointwise functionals
// ---------------------------------------------------------------------------

/// Delta(t) = median(P_t) - t.
inline Estimate median_gap_estimate(const BaseMeasure& m, double t, const QuadratureConfig& cfg = {})
{
    const TiltedView v(m, t, cfg);
    const auto med = tilted_median_estimate(v);
    return {med.value - t, med.error};
}

inline double median_gap(const BaseMeasure& m, double t, const QuadratureConfig& cfg = {})
{
    return median_gap_estimate(m, t, cfg).value;
}

namespace detail {

/// Integrate kernel(t - x) * g(x) over the tilted window, split at x = t.
template <typename LogKernel>
Estimate split_convolution(const BaseMeasure& m, double t, const QuadratureConfig& cfg,
                           const LogKernel& log_kernel, double left_sign, double right_sign)
{
    check_working_range(t);
    const Interval w = m.window(t, cfg.truncation_halfwidth);
    auto integrand = [&](double x) {
        const double lg = m.log_g(x);
        if (lg == kNegInf) return 0.0;
        return std::exp(log_kernel(t - x) + lg);
    };
    Estimate out;
    if (t > w.lo) {
        const auto r = integrate(integrand, w.lo, std::min(t, w.hi), cfg, m.breakpoints());
        out.value += left_sign * r.value;
        out.error += r.abs_error_estimate;
    }
    if (t < w.hi) {
        const auto r = integrate(integrand, std::max(t, w.lo), w.hi, cfg, m.breakpoints());
        out.value += right_sign * r.value;
        out.error += r.abs_error_estimate;
    }
    return out;
}

inline double log_q(double y)
{
    const double a = std::abs(y);
    return a > 0.0 ? std::log(0.5 * a) - 0.5 * y * y : kNegInf;
}

} // namespace detail

/// S(t) = int sign(t - x) phi(t - x) g(x) dx, as two half-line integrals.
inline Estimate sign_kernel_estimate(const BaseMeasure& m, double t, const QuadratureConfig& cfg = {})
{
    return detail::split_convolution(m, t, cfg, normal_log_pdf, 1.0, -1.0);
}

inline double sign_kernel_residual(const BaseMeasure& m, double t, const QuadratureConfig& cfg = {})
{
    return sign_kernel_estimate(m, t, cfg).value;
}

/// R(t) = g(t) - int q(t - x) g(x) dx with q(y) = |y| e^{-y^2/2} / 2.
inline Estimate deriva_estimate(const BaseMeasure& m, double t, const QuadratureConfig& cfg = {})
{
    const auto conv = detail::split_convolution(m, t, cfg, detail::log_q, 1.0, 1.0);
    return {m.g(t) - conv.value, conv.error};
}

inline double deriva_residual(const BaseMeasure& m, double t, const QuadratureConfig& cfg = {})
{
    return deriva_estimate(m, t, cfg).value;
}

/// Gamma(t) = median(P_t) - mean(P_t).
inline Estimate mean_median_estimate(const BaseMeasure& m, double t, const QuadratureConfig& cfg = {})
{
    const TiltedView v(m, t, cfg);
    const auto med = tilted_median_estimate(v);
    const auto mean = tilted_mean_estimate(v);
    return {med.value - mean.value, med.error + mean.error};
}

inline double mean_median_gap(const BaseMeasure& m, double t, const QuadratureConfig& cfg = {})
{
    return mean_median_estimate(m, t, cfg).value;
}

inline Estimate evaluate(Diagnostic d, const BaseMeasure& m, double t, const QuadratureConfig& cfg = {})
{
    switch (d) {
    case Diagnostic::median_gap: return median_gap_estimate(m, t, cfg);
    case Diagnostic::sign_kernel: return sign_kernel_estimate(m, t, cfg);
    case Diagnostic::deriva: return deriva_estimate(m, t, cfg);
    case Diagnostic::mean_median: return mean_median_estimate(m, t, cfg);
    }
    throw UnknownDiagnostic("unhandled diagnostic");
}

// ---------------------------------------------------------------------------
// Local Lipschitz constant of the distribution function
// ---------------------------------------------------------------------------

/**
 * c_A = e^{A^2} ( max_{|u|<=A} |L'(u)| / 2 + int |x| e^{A|x|} P(dx) ),
 * with the max taken over 101 equally spaced u. Then P((s,t)) <= c_A (t - s)
 * for -A <= s < t <= A.
 */
inline double lipschitz_bound(const BaseMeasure& m, double A, const QuadratureConfig& cfg = {})
{
    if (!(A > 0.0) || A > kWorkingRange)
        throw DomainError("lipschitz_bound: A must lie in (0, 8]");

    constexpr int kGrid = 101;
    double max_dL = 0.0;
    for (int i = 0; i < kGrid; ++i) {
        const double u = -A + 2.0 * A * i / (kGrid - 1);
        const Interval w = m.window(u, cfg.truncation_halfwidth);
        const double dL = integrate([&](double x) { return x * std::exp(u * x + m.log_density(x)); },
                                    w.lo, w.hi, cfg, m.breakpoints())
                              .value;
        max_dL = std::max(max_dL, std::abs(dL));
    }

    const Interval wl = m.window(-A, cfg.truncation_halfwidth);
    const Interval wr = m.window(A, cfg.truncation_halfwidth);
    const double lo = std::min(wl.lo, wr.lo);
    const double hi = std::max(wl.hi, wr.hi);
    std::vector<double> breaks(m.breakpoints().begin(), m.breakpoints().end());
    breaks.push_back(0.0);
    const double moment =
        integrate([&](double x) { return std::abs(x) * std::exp(A * std::abs(x) + m.log_density(x)); },
                  lo, hi, cfg, breaks)
            .value;

    return std::exp(A * A) * (0.5 * max_dL + moment);
}

// ---------------------------------------------------------------------------
// Strict monotonicity of the distribution function
// ---------------------------------------------------------------------------

struct MonotonicityReport {
    /// Adjacent grid pairs (a,b) with P((a,b)) below the mass threshold.
    std::vector<Interval> zero_mass_intervals;
    double mass_threshold = 1e-12;

    [[nodiscard]] bool strictly_increasing() const { return zero_mass_intervals.empty(); }
};

inline MonotonicityReport monotonicity_check(const BaseMeasure& m, std::span<const double> x_grid,
                                             const QuadratureConfig& cfg = {})
{
    MonotonicityReport rep;
    for (std::size_t i = 0; i + 1 < x_grid.size(); ++i) {
        const double a = x_grid[i];
        const double b = x_grid[i + 1];
        if (!(b > a)) throw DomainError("monotonicity_check: grid must be strictly increasing");
        const double mass =
            integrate([&](double x) { return m.density(x); }, a, b, cfg, m.breakpoints()).value;
        if (mass < rep.mass_threshold) rep.zero_mass_intervals.push_back({a, b});
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Grid scans
// ---------------------------------------------------------------------------

struct DiagnosticReport {
    std::string name;
    std::vector<double> t_grid;
    std::vector<double> residuals;
    std::vector<double> error_estimates;
    double max_abs_residual = 0.0;
    double argmax_t = 0.0;

    /// Recompute the summary from the residual sequence. Ties keep the first t.
    void summarize()
    {
        max_abs_residual = 0.0;
        argmax_t = t_grid.empty() ? 0.0 : t_grid.front();
        for (std::size_t i = 0; i < residuals.size(); ++i) {
            if (std::abs(residuals[i]) > max_abs_residual) {
                max_abs_residual = std::abs(residuals[i]);
                argmax_t = t_grid[i];
            }
        }
    }
};

/// n equally spaced points on [lo, hi]; a single point sits at lo.
inline std::vector<double> linspace(double lo, double hi, std::size_t n)
{
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    if (n > 1) out.back() = hi;
    return out;
}

inline DiagnosticReport scan(const BaseMeasure& m, Diagnostic which, std::span<const double> t_grid,
                             const QuadratureConfig& cfg = {})
{
    DiagnosticReport rep;
    rep.name = std::string(to_string(which));
    rep.t_grid.assign(t_grid.begin(), t_grid.end());
    rep.residuals.reserve(t_grid.size());
    rep.error_estimates.reserve(t_grid.size());
    for (double t : t_grid) {
        const auto e = evaluate(which, m, t, cfg);
        rep.residuals.push_back(e.value);
        rep.error_estimates.push_back(e.error);
    }
    rep.summarize();
    return rep;
}

inline DiagnosticReport scan(const BaseMeasure& m, std::string_view which,
                             std::span<const double> t_grid, const QuadratureConfig& cfg = {})
{
    return scan(m, parse_diagnostic(which), t_grid, cfg);
}

} // namespace medtilt
