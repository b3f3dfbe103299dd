#include "medtilt/numerics.hpp"
#include "oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace medtilt;

TEST(Integrate, NormalDensityIntegratesToOne)
{
    const auto r = integrate([](double x) { return normal_pdf(x); }, -10.0, 10.0);
    EXPECT_NEAR(r.value, 1.0, 1e-12);
    EXPECT_GE(r.abs_error_estimate, 0.0);
    EXPECT_GE(r.evaluations, 1u);
    EXPECT_TRUE(r.tolerance_met);
}

TEST(Integrate, OddIntegrandVanishes)
{
    const auto r = integrate([](double x) { return x * normal_pdf(x); }, -10.0, 10.0);
    EXPECT_NEAR(r.value, 0.0, 1e-12);
}

TEST(Integrate, SecondMomentMatchesTrapezoidOracle)
{
    const double ref = oracle::trapz([](double x) { return x * x * oracle::phi(x); }, -12, 12, 2'000'000);
    ASSERT_NEAR(ref, 1.0, 1e-10);
    const auto r = integrate([](double x) { return x * x * normal_pdf(x); }, -12.0, 12.0);
    EXPECT_NEAR(r.value, 1.0, 1e-10);
    EXPECT_NEAR(r.value, ref, 1e-10);
}

TEST(Integrate, ErrorEstimateCoversClosedForms)
{
    struct Case {
        double (*f)(double);
        double a, b, exact;
    };
    const Case cases[] = {
        {[](double x) { return normal_pdf(x); }, -3.0, 2.0, oracle::Phi(2.0) - oracle::Phi(-3.0)},
        {[](double x) { return std::exp(x); }, 0.0, 1.0, std::exp(1.0) - 1.0},
        {[](double x) { return std::cos(x); }, 0.0, 10.0, std::sin(10.0)},
        {[](double x) { return 1.0 / (1.0 + x * x); }, -5.0, 5.0, 2.0 * std::atan(5.0)},
    };
    for (const auto& c : cases) {
        const auto r = integrate(c.f, c.a, c.b);
        EXPECT_LE(std::abs(r.value - c.exact), 10.0 * r.abs_error_estimate) << c.a << " " << c.b;
    }
}

TEST(Integrate, WindowSplittingIsAdditive)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> cut(-5.0, 5.0);
    auto f = [](double x) { return (1.0 + 0.3 * std::sin(3.0 * x)) * normal_pdf(x - 0.4); };
    const auto whole = integrate(f, -8.0, 8.0);
    for (int i = 0; i < 25; ++i) {
        const double c = cut(rng);
        const auto l = integrate(f, -8.0, c);
        const auto r = integrate(f, c, 8.0);
        EXPECT_NEAR(whole.value, l.value + r.value,
                    whole.abs_error_estimate + l.abs_error_estimate + r.abs_error_estimate + 1e-15);
    }
}

TEST(Integrate, NonFiniteIntegrandThrows)
{
    EXPECT_THROW(integrate([](double x) { return 1.0 / x; }, -1.0, 1.0), NonFiniteIntegrand);
    EXPECT_THROW(integrate([](double) { return std::nan(""); }, 0.0, 1.0), NonFiniteIntegrand);
}

TEST(Integrate, ReportsExhaustedBudget)
{
    QuadratureConfig cfg;
    cfg.max_subdivisions = 1;
    cfg.rel_tol = 1e-15;
    cfg.abs_tol = 1e-300;
    const auto r = integrate([](double x) { return std::sqrt(std::abs(x)); }, -1.0, 1.0, cfg);
    EXPECT_FALSE(r.tolerance_met);
    EXPECT_NEAR(r.value, 4.0 / 3.0, 1e-3);
}

TEST(Integrate, RejectsEmptyWindowAndBadConfig)
{
    auto f = [](double) { return 1.0; };
    EXPECT_THROW(integrate(f, 1.0, 1.0), DomainError);
    QuadratureConfig bad;
    bad.rel_tol = 0.0;
    EXPECT_THROW(integrate(f, 0.0, 1.0, bad), DomainError);
}

TEST(Integrate, BreakpointsHandleKinks)
{
    const double kink[] = {0.3};
    const auto r = integrate([](double x) { return std::abs(x - 0.3); }, -1.0, 1.0, {}, kink);
    EXPECT_NEAR(r.value, 0.5 * 1.3 * 1.3 + 0.5 * 0.7 * 0.7, 1e-14);
    EXPECT_LE(r.evaluations, 45u);
}

TEST(LogIntegrateExp, LargeTiltGaussian)
{
    const double t = 20.0;
    const double v = log_integrate_exp(
        [t](double x) { return -0.5 * x * x - kLogSqrt2Pi + t * x; }, -30.0, 50.0);
    EXPECT_NEAR(v, 200.0, 1e-8);
}

TEST(LogIntegrateExp, LogNormalDensity)
{
    EXPECT_NEAR(log_integrate_exp([](double x) { return normal_log_pdf(x); }, -10.0, 10.0), 0.0, 1e-12);
}

TEST(LogIntegrateExp, Constant)
{
    const double c = 3.7;
    EXPECT_NEAR(log_integrate_exp([c](double) { return c; }, 0.0, 1.0), c, 1e-14);
}

TEST(LogIntegrateExp, AgreesWithDirectIntegral)
{
    for (double t : {-4.0, -1.0, 0.0, 2.5, 6.0}) {
        auto logf = [t](double x) { return t * x + std::log1p(0.5 * std::cos(x)) + normal_log_pdf(x); };
        const double lo = t - 12.0, hi = t + 12.0;
        const double direct = std::log(integrate([&](double x) { return std::exp(logf(x)); }, lo, hi).value);
        EXPECT_NEAR(log_integrate_exp(logf, lo, hi), direct, 1e-10) << t;
    }
}

TEST(LogIntegrateExp, HandlesZeroRegions)
{
    auto logf = [](double x) { return x < 0.0 ? -std::numeric_limits<double>::infinity() : -x; };
    const double zero[] = {0.0};
    EXPECT_NEAR(log_integrate_exp(logf, -5.0, 40.0, {}, zero), std::log1p(-std::exp(-40.0)), 1e-12);
    EXPECT_THROW(log_integrate_exp([](double) { return std::nan(""); }, 0.0, 1.0), NonFiniteIntegrand);
}

TEST(FindRootMonotone, NormalCdfMedian)
{
    EXPECT_NEAR(find_root_monotone([](double x) { return normal_cdf(x); }, 0.5, -5.0, 5.0, 1e-10), 0.0, 1e-10);
}

TEST(FindRootMonotone, Identity)
{
    EXPECT_NEAR(find_root_monotone([](double x) { return x; }, 0.25, 0.0, 1.0, 1e-10), 0.25, 1e-10);
}

TEST(FindRootMonotone, ShiftedCdfAgainstGridInversion)
{
    // Oracle: invert Phi(x - 3) on a dense grid.
    const double h = 1e-6;
    double grid_root = -10.0;
    while (oracle::Phi(grid_root - 3.0) < 0.5) grid_root += h;
    const double root = find_root_monotone([](double x) { return normal_cdf(x - 3.0); }, 0.5, -10.0, 10.0, 1e-10);
    EXPECT_NEAR(root, 3.0, 1e-10);
    EXPECT_NEAR(root, grid_root, 2e-6);
}

TEST(FindRootMonotone, FlatSegmentReturnsMidpoint)
{
    auto F = [](double x) { return x < 1.0 ? x / 2.0 : (x <= 3.0 ? 0.5 : 0.5 + (x - 3.0) / 2.0); };
    EXPECT_NEAR(find_root_monotone(F, 0.5, 0.0, 4.0, 1e-10), 2.0, 1e-9);
}

TEST(FindRootMonotone, ResidualBoundedByLipschitzModulus)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> target(0.01, 0.99);
    const double x_tol = 1e-9;
    // F(x) = (x + 0.2 sin x) / 10 on [0,10]: Lipschitz constant 0.12.
    auto F = [](double x) { return (x + 0.2 * std::sin(x)) / 10.0; };
    for (int i = 0; i < 50; ++i) {
        const double y = target(rng) * F(10.0);
        const double x = find_root_monotone(F, y, 0.0, 10.0, x_tol);
        EXPECT_LE(std::abs(F(x) - y), 0.12 * x_tol + 1e-16);
    }
}

TEST(FindRootMonotone, BracketInvalid)
{
    EXPECT_THROW(find_root_monotone([](double x) { return x; }, 2.0, 0.0, 1.0), BracketInvalid);
    EXPECT_THROW(find_root_monotone([](double x) { return x; }, -1.0, 0.0, 1.0), BracketInvalid);
}
