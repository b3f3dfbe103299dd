/**
 * @brief The natural exponential family P_t(dx) = e^{tx} P(dx) / L(t).
 */
#pragma once

#include "medtilt/errors.hpp"
#include "medtilt/measures.hpp"
#include "medtilt/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace medtilt {

inline void check_working_range(double t)
{
    if (!(std::abs(t) <= kWorkingRange))
        throw DomainError("tilt parameter t = " + detail::format_shortest(t) +
                          " outside the working range [-8, 8]");
}

/// log L(t) by log-domain quadrature, with its error on the log scale.
inline LogQuadratureResult log_partition_result(const BaseMeasure& m, double t,
                                                const QuadratureConfig& cfg = {})
{
    check_working_range(t);
    const Interval w = m.window(t, cfg.truncation_halfwidth);
    return log_integrate_exp_result([&](double x) { return t * x + m.log_density(x); }, w.lo,
                                    w.hi, cfg, m.breakpoints());
}

inline double log_partition(const BaseMeasure& m, double t, const QuadratureConfig& cfg = {})
{
    return log_partition_result(m, t, cfg).log_value;
}

/// A base measure tilted to natural parameter t, with log L(t) cached.
class TiltedView {
public:
    TiltedView(BaseMeasure base, double t, const QuadratureConfig& cfg = {})
        : base_(std::move(base)), t_(t), cfg_(cfg)
    {
        const auto r = log_partition_result(base_, t_, cfg_);
        if (!std::isfinite(r.log_value))
            throw NotNormalizable("log L(t) is not finite at t = " + detail::format_shortest(t));
        log_L_ = r.log_value;
        log_L_error_ = r.abs_error_estimate;
        window_ = base_.window(t_, cfg_.truncation_halfwidth);
    }

    [[nodiscard]] const BaseMeasure& base() const { return base_; }
    [[nodiscard]] double t() const { return t_; }
    [[nodiscard]] double log_L() const { return log_L_; }
    [[nodiscard]] double log_L_error() const { return log_L_error_; }
    [[nodiscard]] const Interval& window() const { return window_; }
    [[nodiscard]] const QuadratureConfig& config() const { return cfg_; }

private:
    BaseMeasure base_;
    double t_;
    QuadratureConfig cfg_;
    double log_L_ = 0.0;
    double log_L_error_ = 0.0;
    Interval window_{};
};

inline double tilted_log_pdf(const TiltedView& v, double x)
{
    const double lf = v.base().log_density(x);
    if (lf == kNegInf) return kNegInf;
    return v.t() * x + lf - v.log_L();
}

inline double tilted_pdf(const TiltedView& v, double x) { return std::exp(tilted_log_pdf(v, x)); }

/// F_t(x) together with the quadrature error estimate.
inline Estimate tilted_cdf_estimate(const TiltedView& v, double x)
{
    const Interval& w = v.window();
    if (x <= w.lo) return {0.0, 0.0};
    if (x >= w.hi) return {1.0, 0.0};
    const auto r = integrate([&](double u) { return tilted_pdf(v, u); }, w.lo, x, v.config(),
                             v.base().breakpoints());
    return {std::clamp(r.value, 0.0, 1.0), r.abs_error_estimate};
}

inline double tilted_cdf(const TiltedView& v, double x) { return tilted_cdf_estimate(v, x).value; }

inline Estimate tilted_mean_estimate(const TiltedView& v)
{
    const Interval& w = v.window();
    const auto r = integrate([&](double x) { return x * tilted_pdf(v, x); }, w.lo, w.hi,
                             v.config(), v.base().breakpoints());
    return {r.value, r.abs_error_estimate};
}

/// m(t) by direct quadrature of x against the tilted density.
inline double tilted_mean(const TiltedView& v) { return tilted_mean_estimate(v).value; }

/// Median of P_t, bracketed by the integration window; error bounds the bisection and CDF error.
inline Estimate tilted_median_estimate(const TiltedView& v, double x_tol = 1e-10)
{
    const Interval& w = v.window();
    double cdf_err = 0.0;
    const double med = find_root_monotone(
        [&](double x) {
            const auto e = tilted_cdf_estimate(v, x);
            cdf_err = std::max(cdf_err, e.error);
            return e.value;
        },
        0.5, w.lo, w.hi, x_tol);
    const double density = tilted_pdf(v, med);
    const double err = x_tol + (density > 0.0 ? cdf_err / density : 0.0);
    return {med, err};
}

inline double tilted_median(const TiltedView& v, double x_tol = 1e-10)
{
    return tilted_median_estimate(v, x_tol).value;
}

struct HValue {
    double h = 0.0;
    double h_prime = 0.0;
};

/**
 * h(t) = int_{(-inf,t]} e^{tx} P(dx) and its derivative
 * h'(t) = e^{t^2} f(t) + int_{-inf}^t x e^{tx} f(x) dx.
 */
inline HValue h_value_and_derivative(const BaseMeasure& m, double t, const QuadratureConfig& cfg = {})
{
    check_working_range(t);
    const Interval w = m.window(t, cfg.truncation_halfwidth);
    HValue out;
    out.h_prime = std::exp(t * t + m.log_density(t));
    if (t <= w.lo) return out;
    const double hi = std::min(t, w.hi);
    auto weight = [&](double x) { return std::exp(t * x + m.log_density(x)); };
    out.h = integrate(weight, w.lo, hi, cfg, m.breakpoints()).value;
    out.h_prime += integrate([&](double x) { return x * weight(x); }, w.lo, hi, cfg,
                             m.breakpoints())
                       .value;
    return out;
}

} // namespace medtilt
