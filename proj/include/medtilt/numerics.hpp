/**
 * @brief Quadrature, log-domain integration and monotone root finding.
 *
 * The integrator is a globally adaptive Gauss-Kronrod (7,15) scheme with
 * the QUADPACK error heuristic. Every integrand the library meets is smooth
 * and Gaussian-dominated, so no extrapolation is attempted.
 */
#pragma once

#include "medtilt/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <numbers>
#include <queue>
#include <span>
#include <string>
#include <vector>

namespace medtilt {

/// Largest |t| accepted by the tilting routines.
inline constexpr double kWorkingRange = 8.0;

struct QuadratureConfig {
    /// Truncation half-width in units of the measure's scale, around the tilted centre.
    double truncation_halfwidth = 12.0;
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    std::size_t max_subdivisions = 4000;
};

struct QuadratureResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    std::size_t evaluations = 0;
    /// False when max_subdivisions ran out before the tolerance was met.
    bool tolerance_met = true;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] double width() const { return hi - lo; }
    [[nodiscard]] bool contains(double x) const { return lo <= x && x <= hi; }
};

/// A value together with an absolute error estimate.
struct Estimate {
    double value = 0.0;
    double error = 0.0;
};

inline void validate(const QuadratureConfig& cfg)
{
    if (!(cfg.truncation_halfwidth > 0.0))
        throw DomainError("quadrature: truncation_halfwidth must be positive");
    if (!(cfg.rel_tol > 0.0 && cfg.rel_tol < 1.0))
        throw DomainError("quadrature: rel_tol must lie in (0,1)");
    if (!(cfg.abs_tol > 0.0))
        throw DomainError("quadrature: abs_tol must be positive");
    if (cfg.max_subdivisions == 0)
        throw DomainError("quadrature: max_subdivisions must be at least 1");
}

// ---------------------------------------------------------------------------
// Standard normal helpers
// ---------------------------------------------------------------------------

inline constexpr double kLogSqrt2Pi = 0.91893853320467274178032973640562;

inline double normal_log_pdf(double x) { return -0.5 * x * x - kLogSqrt2Pi; }
inline double normal_pdf(double x) { return std::exp(normal_log_pdf(x)); }
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// log(e^a + e^b) without overflow; handles -inf operands.
inline double log_add_exp(double a, double b)
{
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod quadrature
// ---------------------------------------------------------------------------

namespace detail {

// Kronrod abscissae (positive half, descending) and weights; every odd index
// is also a 7-point Gauss node.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a;
    double b;
    double value;
    double error;
};

struct PanelLess {
    bool operator()(const Panel& l, const Panel& r) const
    {
        if (l.error != r.error) return l.error < r.error;
        return l.a > r.a;
    }
};

template <typename F>
Panel gauss_kronrod_15(const F& f, double a, double b)
{
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    auto eval = [&](double x) {
        const double y = static_cast<double>(f(x));
        if (!std::isfinite(y))
            throw NonFiniteIntegrand("integrand is not finite at x = " + std::to_string(x));
        return y;
    };

    std::array<double, 15> fv{};
    fv[7] = eval(centre);
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        fv[j] = eval(centre - dx);
        fv[14 - j] = eval(centre + dx);
    }

    double kronrod = kWgk[7] * fv[7];
    double gauss = kWg[3] * fv[7];
    double abs_sum = std::abs(kronrod);
    for (std::size_t j = 0; j < 7; ++j) {
        const double pair = fv[j] + fv[14 - j];
        kronrod += kWgk[j] * pair;
        abs_sum += kWgk[j] * (std::abs(fv[j]) + std::abs(fv[14 - j]));
        if (j % 2 == 1) gauss += kWg[j / 2] * pair;
    }
    const double mean = 0.5 * kronrod;
    double asc = kWgk[7] * std::abs(fv[7] - mean);
    for (std::size_t j = 0; j < 7; ++j)
        asc += kWgk[j] * (std::abs(fv[j] - mean) + std::abs(fv[14 - j] - mean));

    const double value = kronrod * half;
    double err = std::abs((kronrod - gauss) * half);
    const double resasc = asc * std::abs(half);
    const double resabs = abs_sum * std::abs(half);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
        err = std::max(50.0 * eps * resabs, err);
    return {a, b, value, err};
}

} // namespace detail

/**
 * Integrate f over [a,b] to max(abs_tol, rel_tol*|value|).
 *
 * The window is first cut at every breakpoint strictly inside it and then
 * into panels no wider than one unit, so that narrow features in a wide
 * window are seen by the first pass. Panels with the largest error are
 * bisected until the tolerance holds or max_subdivisions is reached.
 */
template <typename F>
    requires std::invocable<const F&, double>
QuadratureResult integrate(const F& f, double a, double b, const QuadratureConfig& cfg = {},
                           std::span<const double> breakpoints = {})
{
    validate(cfg);
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
        throw DomainError("integrate: window must satisfy a < b with finite ends");

    std::vector<double> cuts{a};
    for (double c : breakpoints)
        if (c > a && c < b) cuts.push_back(c);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    constexpr std::size_t kMaxInitialPanels = 4096;
    std::priority_queue<detail::Panel, std::vector<detail::Panel>, detail::PanelLess> heap;
    std::size_t evaluations = 0;
    double total = 0.0;
    double total_err = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double lo = cuts[k];
        const double hi = cuts[k + 1];
        const auto pieces = static_cast<std::size_t>(
            std::clamp(std::ceil(hi - lo), 1.0, static_cast<double>(kMaxInitialPanels)));
        for (std::size_t i = 0; i < pieces; ++i) {
            const double pa = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(pieces);
            const double pb = (i + 1 == pieces)
                ? hi
                : lo + (hi - lo) * static_cast<double>(i + 1) / static_cast<double>(pieces);
            auto p = detail::gauss_kronrod_15(f, pa, pb);
            evaluations += 15;
            total += p.value;
            total_err += p.error;
            heap.push(p);
        }
    }

    std::size_t subdivisions = 0;
    bool met = true;
    while (total_err > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total))) {
        if (subdivisions >= cfg.max_subdivisions) {
            met = false;
            break;
        }
        const detail::Panel worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            // Panel can no longer be split in floating point.
            met = false;
            break;
        }
        heap.pop();
        auto left = detail::gauss_kronrod_15(f, worst.a, mid);
        auto right = detail::gauss_kronrod_15(f, mid, worst.b);
        evaluations += 30;
        ++subdivisions;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum in left-to-right order so the result does not depend on the
    // history of incremental updates.
    std::vector<detail::Panel> panels;
    panels.reserve(heap.size());
    while (!heap.empty()) {
        panels.push_back(heap.top());
        heap.pop();
    }
    std::sort(panels.begin(), panels.end(),
              [](const detail::Panel& l, const detail::Panel& r) { return l.a < r.a; });
    QuadratureResult out;
    for (const auto& p : panels) {
        out.value += p.value;
        out.abs_error_estimate += p.error;
    }
    out.evaluations = evaluations;
    out.tolerance_met = met && out.abs_error_estimate <=
        std::max(cfg.abs_tol, cfg.rel_tol * std::abs(out.value));
    return out;
}

/// log of a log-domain integral together with its (absolute, log-scale) error.
struct LogQuadratureResult {
    double log_value = -std::numeric_limits<double>::infinity();
    double abs_error_estimate = 0.0;
    std::size_t evaluations = 0;
};

/**
 * log of the integral of exp(logf) over [a,b].
 *
 * logf may return -infinity where the integrand vanishes. The integrand is
 * shifted by the maximum of logf over a uniform sample of the window before
 * exponentiation.
 */
template <typename F>
    requires std::invocable<const F&, double>
LogQuadratureResult log_integrate_exp_result(const F& logf, double a, double b,
                                             const QuadratureConfig& cfg = {},
                                             std::span<const double> breakpoints = {})
{
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
        throw DomainError("log_integrate_exp: window must satisfy a < b with finite ends");

    auto checked = [&](double x) {
        const double v = static_cast<double>(logf(x));
        if (std::isnan(v) || v == std::numeric_limits<double>::infinity())
            throw NonFiniteIntegrand("log-integrand is not finite at x = " + std::to_string(x));
        return v;
    };

    constexpr int kSamples = 512;
    double shift = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= kSamples; ++i)
        shift = std::max(shift, checked(a + (b - a) * i / kSamples));
    for (double c : breakpoints)
        if (c >= a && c <= b) shift = std::max(shift, checked(c));

    LogQuadratureResult out;
    if (shift == -std::numeric_limits<double>::infinity()) {
        // Sampling saw nothing; fall back to an unshifted integral.
        shift = 0.0;
    }

    QuadratureConfig inner = cfg;
    // The shifted integrand peaks near 1, so only the relative tolerance matters.
    inner.abs_tol = std::numeric_limits<double>::min();
    auto r = integrate([&](double x) { return std::exp(checked(x) - shift); }, a, b, inner,
                       breakpoints);
    out.evaluations = r.evaluations + kSamples + 1;
    if (r.value <= 0.0) return out;
    out.log_value = std::log(r.value) + shift;
    out.abs_error_estimate = r.abs_error_estimate / r.value;
    return out;
}

template <typename F>
    requires std::invocable<const F&, double>
double log_integrate_exp(const F& logf, double a, double b, const QuadratureConfig& cfg = {},
                         std::span<const double> breakpoints = {})
{
    return log_integrate_exp_result(logf, a, b, cfg, breakpoints).log_value;
}

// ---------------------------------------------------------------------------
// Root finding
// ---------------------------------------------------------------------------

/**
 * Solve F(x) = target for nondecreasing F on [lo,hi] by bisection.
 *
 * On a flat segment where F equals the target, the midpoint of that segment
 * is returned.
 */
template <typename F>
    requires std::invocable<const F&, double>
double find_root_monotone(const F& fn, double target, double lo, double hi, double x_tol = 1e-10)
{
    if (!(x_tol > 0.0)) throw DomainError("find_root_monotone: x_tol must be positive");
    if (!(lo <= hi)) throw BracketInvalid("find_root_monotone: lo > hi");
    const double flo = fn(lo);
    const double fhi = fn(hi);
    if (!(flo <= target && target <= fhi))
        throw BracketInvalid("find_root_monotone: target " + std::to_string(target) +
                             " not bracketed by [" + std::to_string(flo) + ", " +
                             std::to_string(fhi) + "]");

    // Narrow [lo,hi] while F(mid) differs from the target.
    while (hi - lo > x_tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = fn(mid);
        if (fm < target) {
            lo = mid;
        } else if (fm > target) {
            hi = mid;
        } else {
            // Flat hit: bracket the set {F = target} from both sides.
            double l_lo = lo, l_hi = mid; // first x with F(x) >= target
            while (l_hi - l_lo > x_tol) {
                const double m = 0.5 * (l_lo + l_hi);
                if (m <= l_lo || m >= l_hi) break;
                (fn(m) < target ? l_lo : l_hi) = m;
            }
            double r_lo = mid, r_hi = hi; // last x with F(x) <= target
            while (r_hi - r_lo > x_tol) {
                const double m = 0.5 * (r_lo + r_hi);
                if (m <= r_lo || m >= r_hi) break;
                (fn(m) > target ? r_hi : r_lo) = m;
            }
            return 0.5 * (0.5 * (l_lo + l_hi) + 0.5 * (r_lo + r_hi));
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace medtilt
