// Brute-force reference computations for the test suites.
//
// Nothing here calls into medtilt: densities are written out from their
// formulas and every integral is a fixed-grid trapezoid sum.
#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

inline constexpr double kPi = std::numbers::pi;

inline double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }
inline double Phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double normal(double x, double mu, double sigma) { return phi((x - mu) / sigma) / sigma; }

// Radon-Nikodym factors g relative to phi.
inline double g_cosine(double x, double eps) { return (1.0 + eps * std::cos(x)) / (1.0 + eps * std::exp(-0.5)); }
inline double g_quadratic(double x, double eps) { return (1.0 + eps * x * x) / (1.0 + eps); }

inline double mixture(double x, double p, double m1, double s1, double m2, double s2)
{
    return p * normal(x, m1, s1) + (1.0 - p) * normal(x, m2, s2);
}

using Fn = std::function<double(double)>;

/// Composite trapezoid with n intervals.
inline double trapz(const Fn& f, double a, double b, long n)
{
    const double h = (b - a) / static_cast<double>(n);
    double s = 0.5 * (f(a) + f(b));
    for (long i = 1; i < n; ++i) s += f(a + h * static_cast<double>(i));
    return s * h;
}

/// Median of the law with unnormalized density w on [a,b]: cumulative
/// trapezoid on n intervals, then linear interpolation at one half.
inline double dense_median(const Fn& w, double a, double b, long n)
{
    const double h = (b - a) / static_cast<double>(n);
    std::vector<double> cum(static_cast<std::size_t>(n) + 1, 0.0);
    double prev = w(a);
    for (long i = 1; i <= n; ++i) {
        const double cur = w(a + h * static_cast<double>(i));
        cum[static_cast<std::size_t>(i)] = cum[static_cast<std::size_t>(i) - 1] + 0.5 * h * (prev + cur);
        prev = cur;
    }
    const double half = 0.5 * cum.back();
    for (long i = 1; i <= n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (cum[k] >= half) {
            const double frac = (half - cum[k - 1]) / (cum[k] - cum[k - 1]);
            return a + h * (static_cast<double>(i - 1) + frac);
        }
    }
    return b;
}

/// Median of P_t for base density f, on [t - W, t + W] (or a given window).
inline double tilted_median(const Fn& f, double t, double lo, double hi, long n = 1'000'000)
{
    return dense_median([&](double x) { return std::exp(t * x) * f(x); }, lo, hi, n);
}

inline double tilted_mean(const Fn& f, double t, double lo, double hi, long n = 1'000'000)
{
    const double z = trapz([&](double x) { return std::exp(t * x) * f(x); }, lo, hi, n);
    const double m = trapz([&](double x) { return x * std::exp(t * x) * f(x); }, lo, hi, n);
    return m / z;
}

/// int sign(t-x) phi(t-x) g(x) dx over [t-W, t+W], node at x = t.
inline double sign_kernel(const Fn& g, double t, double W = 14.0, long n = 1'000'000)
{
    auto k = [&](double x) { return phi(t - x) * g(x); };
    return trapz(k, t - W, t, n / 2) - trapz(k, t, t + W, n / 2);
}

inline double q(double y) { return 0.5 * std::abs(y) * std::exp(-0.5 * y * y); }

/// g(t) - int q(t-x) g(x) dx over [t-W, t+W], node at x = t.
inline double deriva(const Fn& g, double t, double W = 14.0, long n = 1'000'000)
{
    auto k = [&](double x) { return q(t - x) * g(x); };
    return g(t) - trapz(k, t - W, t, n / 2) - trapz(k, t, t + W, n / 2);
}

/// Dawson's integral by its Maclaurin series (|x| small).
inline double dawson(double x)
{
    double term = x, sum = x;
    for (int n = 1; n < 200; ++n) {
        term *= -2.0 * x * x / (2.0 * n + 1.0);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

/// int q(y) cos(w y) dy = 1 - sqrt(2) w D(w / sqrt(2)).
inline double q_cosine_transform(double w)
{
    return 1.0 - std::sqrt(2.0) * w * dawson(w / std::sqrt(2.0));
}

} // namespace oracle
