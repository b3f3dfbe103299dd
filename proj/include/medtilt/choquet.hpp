/**
 * @brief The convolution equation g = q * g and its kernel
 * q(y) = |y| e^{-y^2/2} / 2.
 *
 * Bounded positive solutions are constant. The fixed-point iteration here is
 * an empirical demonstration only: it records how fast the oscillation of an
 * iterate decays, it does not prove convergence.
 */
#pragma once

#include "medtilt/errors.hpp"
#include "medtilt/measures.hpp"
#include "medtilt/numerics.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace medtilt {

inline double kernel_q(double y) { return 0.5 * std::abs(y) * std::exp(-0.5 * y * y); }

/// Lambda(s) = int e^{sy} q(y) dy by quadrature.
inline double sigma_laplace(double s, const QuadratureConfig& cfg = {})
{
    if (!(std::abs(s) <= kWorkingRange))
        throw DomainError("sigma_laplace: |s| must not exceed 8");
    const double reach = std::abs(s) + cfg.truncation_halfwidth + 2.0;
    const double zero[] = {0.0};
    return integrate([s](double y) { return std::exp(s * y) * kernel_q(y); }, -reach, reach, cfg,
                     zero)
        .value;
}

/// Completed-square form 1 + (s/2) sqrt(2 pi) e^{s^2/2} (2 Phi(s) - 1).
inline double sigma_laplace_closed_form(double s)
{
    const double two_phi_minus_one = std::erf(s / std::numbers::sqrt2);
    return 1.0 + 0.5 * s * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * s * s) *
        two_phi_minus_one;
}

struct ConvolutionSetup {
    double kernel_halfwidth = 0.0; // K, a whole number of steps
    double kernel_tol = 1e-16;
    double step = 0.01;
    /// Trapezoid weights h*q(jh), j = -J..J, renormalized to sum to one.
    std::vector<double> weights;

    [[nodiscard]] std::size_t radius_steps() const { return (weights.size() - 1) / 2; }
};

/**
 * Build the truncated kernel for grid step h: K is the smallest whole number
 * of steps beyond the mode with q(K) <= kernel_tol.
 */
inline ConvolutionSetup make_convolution_setup(double step = 0.01, double kernel_tol = 1e-16)
{
    if (!(step > 0.0) || !(kernel_tol > 0.0) || kernel_tol >= 0.5 * std::exp(-0.5))
        throw DomainError("make_convolution_setup: need step > 0 and 0 < kernel_tol < max q");
    // q decreases beyond |y| = 1; march outward in whole steps.
    std::size_t j = static_cast<std::size_t>(std::ceil(1.0 / step));
    while (kernel_q(static_cast<double>(j) * step) > kernel_tol) ++j;

    ConvolutionSetup s;
    s.step = step;
    s.kernel_tol = kernel_tol;
    s.kernel_halfwidth = static_cast<double>(j) * step;
    s.weights.assign(2 * j + 1, 0.0);
    double total = 0.0;
    for (std::size_t k = 0; k <= j; ++k) {
        double w = step * kernel_q(static_cast<double>(k) * step);
        if (k == j) w *= 0.5;
        s.weights[j + k] = w;
        s.weights[j - k] = w;
        total += k == 0 ? w : 2.0 * w;
    }
    for (double& w : s.weights) w /= total;
    return s;
}

/**
 * (q * g) on the same grid. The valid window shrinks by K on each side so
 * every output is a true discrete convolution of supplied values.
 */
inline GridFunction convolve_q(const GridFunction& g, const ConvolutionSetup& setup)
{
    if (std::abs(g.step() - setup.step) > 1e-12 * setup.step)
        throw DomainError("convolve_q: grid step differs from the setup step");
    const std::size_t r = setup.radius_steps();
    if (g.valid_count() <= 2 * r)
        throw WindowTooNarrow("convolve_q: valid window narrower than the kernel support");
    const std::size_t lo = g.valid_lo() + r;
    const std::size_t hi = g.valid_hi() - r;

    const auto& in = g.values();
    std::vector<double> out(in.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = lo; i <= hi; ++i) {
        double acc = 0.0;
        const std::size_t base = i - r;
        for (std::size_t k = 0; k < setup.weights.size(); ++k)
            acc += setup.weights[k] * in[base + k];
        out[i] = acc;
    }
    return GridFunction(g.x_min(), g.step(), std::move(out), lo, hi);
}

struct IterationTrace {
    /// Oscillation of the input (entry 0) and of each iterate.
    std::vector<double> oscillations;
    /// Valid window of each entry, as x coordinates.
    std::vector<Interval> windows;
    std::size_t window_shrink_per_step = 0;
    GridFunction final_iterate;
};

inline IterationTrace iterate_fixed_point(const GridFunction& g0, std::size_t steps,
                                          const ConvolutionSetup& setup)
{
    const std::size_t r = setup.radius_steps();
    if (g0.valid_count() <= 2 * r * steps)
        throw WindowTooNarrow("iterate_fixed_point: window supports fewer than " +
                              std::to_string(steps) + " steps");
    IterationTrace trace{{}, {}, 2 * r, g0};
    trace.oscillations.push_back(g0.oscillation());
    trace.windows.push_back({g0.x(g0.valid_lo()), g0.x(g0.valid_hi())});
    for (std::size_t k = 0; k < steps; ++k) {
        trace.final_iterate = convolve_q(trace.final_iterate, setup);
        const auto& cur = trace.final_iterate;
        trace.oscillations.push_back(cur.oscillation());
        trace.windows.push_back({cur.x(cur.valid_lo()), cur.x(cur.valid_hi())});
    }
    return trace;
}

} // namespace medtilt
