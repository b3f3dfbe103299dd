/**
 * @brief One-dimensional symmetry diagnostics for the tilted family.
 *
 * If every P_t is symmetric about its mean m(t), then
 * 2 m(t) = m(t+s) + m(t-s), m is affine and log L is quadratic.
 */
#pragma once

#include "medtilt/errors.hpp"
#include "medtilt/measures.hpp"
#include "medtilt/numerics.hpp"
#include "medtilt/tilting.hpp"

#include <array>
#include <cmath>
#include <span>
#include <vector>

namespace medtilt {

struct SymmetryReport {
    double t = 0.0;
    double center = 0.0;
    /// max over offsets u of |f_t(center + u) - f_t(center - u)|
    double asymmetry_score = 0.0;
    std::size_t offsets_tested = 0;
};

/// 50 logarithmically spaced offsets in [0.05, 6].
inline std::vector<double> default_offsets()
{
    constexpr std::size_t n = 50;
    std::vector<double> out(n);
    const double a = std::log(0.05), b = std::log(6.0);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    out.front() = 0.05;
    out.back() = 6.0;
    return out;
}

inline SymmetryReport asymmetry_score(const BaseMeasure& m, double t, std::span<const double> offsets,
                                      const QuadratureConfig& cfg = {})
{
    const TiltedView v(m, t, cfg);
    SymmetryReport rep;
    rep.t = t;
    rep.center = tilted_mean(v);
    for (double u : offsets) {
        if (!(u > 0.0)) throw DomainError("asymmetry_score: offsets must be positive");
        const double d = std::abs(tilted_pdf(v, rep.center + u) - tilted_pdf(v, rep.center - u));
        rep.asymmetry_score = std::max(rep.asymmetry_score, d);
    }
    rep.offsets_tested = offsets.size();
    return rep;
}

inline SymmetryReport asymmetry_score(const BaseMeasure& m, double t, const QuadratureConfig& cfg = {})
{
    const auto offsets = default_offsets();
    return asymmetry_score(m, t, offsets, cfg);
}

/// m(t+s) + m(t-s) - 2 m(t); exactly zero at s = 0.
inline double midpoint_residual(const BaseMeasure& m, double t, double s, const QuadratureConfig& cfg = {})
{
    if (s == 0.0) return 0.0;
    const double up = tilted_mean(TiltedView(m, t + s, cfg));
    const double down = tilted_mean(TiltedView(m, t - s, cfg));
    const double mid = tilted_mean(TiltedView(m, t, cfg));
    return up + down - 2.0 * mid;
}

struct QuadraticFit {
    double a = 0.0; // constant
    double b = 0.0; // linear
    double c = 0.0; // quadratic
    double max_fit_residual = 0.0;
};

/// Least-squares fit log L(t) ~ a + b t + c t^2 via the normal equations.
inline QuadraticFit quadratic_logL_fit(const BaseMeasure& m, std::span<const double> t_grid,
                                       const QuadratureConfig& cfg = {})
{
    if (t_grid.size() < 5) throw DomainError("quadratic_logL_fit: need at least 5 grid points");
    std::vector<double> y;
    y.reserve(t_grid.size());
    for (double t : t_grid) y.push_back(log_partition(m, t, cfg));

    // Normal matrix sum t^(i+j) and right-hand side sum t^i y.
    std::array<std::array<double, 4>, 3> aug{};
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        const double t = t_grid[k];
        const std::array<double, 3> row = {1.0, t, t * t};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) aug[i][j] += row[i] * row[j];
            aug[i][3] += row[i] * y[k];
        }
    }
    // Gaussian elimination with partial pivoting.
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(aug[r][col]) > std::abs(aug[piv][col])) piv = r;
        std::swap(aug[col], aug[piv]);
        if (aug[col][col] == 0.0) throw DomainError("quadratic_logL_fit: singular design (repeated t?)");
        for (int r = col + 1; r < 3; ++r) {
            const double f = aug[r][col] / aug[col][col];
            for (int j = col; j < 4; ++j) aug[r][j] -= f * aug[col][j];
        }
    }
    std::array<double, 3> coef{};
    for (int i = 2; i >= 0; --i) {
        double acc = aug[i][3];
        for (int j = i + 1; j < 3; ++j) acc -= aug[i][j] * coef[j];
        coef[i] = acc / aug[i][i];
    }

    QuadraticFit fit{coef[0], coef[1], coef[2], 0.0};
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        const double t = t_grid[k];
        fit.max_fit_residual =
            std::max(fit.max_fit_residual, std::abs(y[k] - (fit.a + fit.b * t + fit.c * t * t)));
    }
    return fit;
}

} // namespace medtilt
