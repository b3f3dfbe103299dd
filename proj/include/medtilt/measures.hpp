/**
 * @brief Base probability measures P(dx) = g(x) phi(x) dx.
 *
 * A measure is described declaratively by a MeasureSpec (one of a small
 * catalog of closed-form families, or a tabulated g read from a text file)
 * and turned into an evaluable BaseMeasure by build_measure(). Every
 * catalog member is Gaussian-dominated, so the Laplace transform L(t) is
 * finite for every real t.
 */
#pragma once

#include "medtilt/errors.hpp"
#include "medtilt/numerics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

namespace medtilt {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// MeasureSpec
// ---------------------------------------------------------------------------

struct GaussianSpec {
    double mu = 0.0;
    double sigma = 1.0;
};

/// g(x) = (1 + eps cos x) / (1 + eps e^{-1/2})
struct PerturbedCosineSpec {
    double eps = 0.0;
};

/// g(x) = (1 + eps x^2) / (1 + eps)
struct PerturbedQuadraticSpec {
    double eps = 0.0;
};

/// weight * N(mu1, sigma1^2) + (1 - weight) * N(mu2, sigma2^2)
struct GaussianMixtureSpec {
    double weight = 0.5;
    double mu1 = 0.0;
    double sigma1 = 1.0;
    double mu2 = 0.0;
    double sigma2 = 1.0;
};

/// Tabulated g(x); either read from `path` or given inline as nodes.
struct TabulatedSpec {
    std::string path;
    std::vector<double> x;
    std::vector<double> g;
};

using MeasureSpec = std::variant<GaussianSpec, PerturbedCosineSpec, PerturbedQuadraticSpec,
                                 GaussianMixtureSpec, TabulatedSpec>;

namespace detail {

inline std::string format_shortest(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string join_args(std::initializer_list<double> args)
{
    std::string out;
    bool first = true;
    for (double a : args) {
        if (!first) out += ',';
        out += format_shortest(a);
        first = false;
    }
    return out;
}

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline double parse_number(std::string_view s)
{
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw InvalidParameter("not a number: '" + std::string(s) + "'");
    return v;
}

} // namespace detail

/// Canonical text form, e.g. "gaussian(0,1)" or "tabulated(data/g.txt)".
inline std::string to_string(const MeasureSpec& spec)
{
    using detail::join_args;
    return std::visit(
        [](const auto& s) -> std::string {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, GaussianSpec>)
                return "gaussian(" + join_args({s.mu, s.sigma}) + ")";
            else if constexpr (std::is_same_v<T, PerturbedCosineSpec>)
                return "perturbed_cosine(" + join_args({s.eps}) + ")";
            else if constexpr (std::is_same_v<T, PerturbedQuadraticSpec>)
                return "perturbed_quadratic(" + join_args({s.eps}) + ")";
            else if constexpr (std::is_same_v<T, GaussianMixtureSpec>)
                return "gaussian_mixture(" +
                    join_args({s.weight, s.mu1, s.sigma1, s.mu2, s.sigma2}) + ")";
            else
                return "tabulated(" + (s.path.empty() ? std::string("<inline>") : s.path) + ")";
        },
        spec);
}

/// Parse the text form produced by to_string(). Tabulated specs keep only the path.
inline MeasureSpec parse_measure_spec(std::string_view text)
{
    text = detail::trim(text);
    const auto open = text.find('(');
    if (open == std::string_view::npos || text.back() != ')')
        throw InvalidParameter("malformed measure '" + std::string(text) +
                               "', expected name(arg,...)");
    const std::string name(detail::trim(text.substr(0, open)));
    const std::string_view inner = text.substr(open + 1, text.size() - open - 2);

    if (name == "tabulated") {
        auto path = detail::trim(inner);
        if (path.empty()) throw InvalidParameter("tabulated() needs a file path");
        return TabulatedSpec{std::string(path), {}, {}};
    }

    std::vector<double> args;
    std::size_t start = 0;
    while (start <= inner.size()) {
        const auto comma = inner.find(',', start);
        const auto piece = inner.substr(start, comma == std::string_view::npos
                                                   ? std::string_view::npos
                                                   : comma - start);
        args.push_back(detail::parse_number(piece));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }

    auto expect = [&](std::size_t n) {
        if (args.size() != n)
            throw InvalidParameter(name + " takes " + std::to_string(n) + " argument(s), got " +
                                   std::to_string(args.size()));
    };
    if (name == "gaussian") {
        expect(2);
        return GaussianSpec{args[0], args[1]};
    }
    if (name == "perturbed_cosine") {
        expect(1);
        return PerturbedCosineSpec{args[0]};
    }
    if (name == "perturbed_quadratic") {
        expect(1);
        return PerturbedQuadraticSpec{args[0]};
    }
    if (name == "gaussian_mixture") {
        expect(5);
        return GaussianMixtureSpec{args[0], args[1], args[2], args[3], args[4]};
    }
    throw InvalidParameter("unknown measure family '" + name + "'");
}

// ---------------------------------------------------------------------------
// Tabulated density file
// ---------------------------------------------------------------------------

/**
 * Read a two-column "x value" table. Lines starting with '#' and blank
 * lines are skipped; x must be strictly increasing.
 */
inline TabulatedSpec read_tabulated(std::istream& in, std::string path = {})
{
    TabulatedSpec out;
    out.path = std::move(path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto view = detail::trim(line);
        if (view.empty() || view.front() == '#') continue;
        std::istringstream fields{std::string(view)};
        std::string xs, gs, extra;
        if (!(fields >> xs >> gs) || (fields >> extra))
            throw TableFormatError("line " + std::to_string(lineno) +
                                   ": expected two whitespace-separated numbers");
        double x = 0.0, g = 0.0;
        try {
            x = detail::parse_number(xs);
            g = detail::parse_number(gs);
        } catch (const InvalidParameter& e) {
            throw TableFormatError("line " + std::to_string(lineno) + ": " + e.what());
        }
        if (!std::isfinite(x) || !std::isfinite(g))
            throw TableFormatError("line " + std::to_string(lineno) + ": non-finite value");
        if (!out.x.empty() && !(x > out.x.back()))
            throw TableFormatError("line " + std::to_string(lineno) +
                                   ": x values must be strictly increasing");
        out.x.push_back(x);
        out.g.push_back(g);
    }
    return out;
}

inline TabulatedSpec read_tabulated_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw TableFormatError("cannot open tabulated density file '" + path + "'");
    return read_tabulated(in, path);
}

// ---------------------------------------------------------------------------
// GridFunction
// ---------------------------------------------------------------------------

/// Uniform samples x_min + i*step with an inclusive valid index window.
class GridFunction {
public:
    GridFunction(double x_min, double step, std::vector<double> values)
        : GridFunction(x_min, step, std::move(values), 0, 0, true)
    {}

    GridFunction(double x_min, double step, std::vector<double> values, std::size_t valid_lo,
                 std::size_t valid_hi)
        : GridFunction(x_min, step, std::move(values), valid_lo, valid_hi, false)
    {}

    [[nodiscard]] double x_min() const { return x_min_; }
    [[nodiscard]] double step() const { return step_; }
    [[nodiscard]] const std::vector<double>& values() const { return values_; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }
    [[nodiscard]] std::size_t valid_lo() const { return valid_lo_; }
    [[nodiscard]] std::size_t valid_hi() const { return valid_hi_; }
    [[nodiscard]] std::size_t valid_count() const { return valid_hi_ - valid_lo_ + 1; }
    [[nodiscard]] double x(std::size_t i) const { return x_min_ + static_cast<double>(i) * step_; }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }

    /// sup - inf over the valid window.
    [[nodiscard]] double oscillation() const
    {
        const auto first = values_.begin() + static_cast<std::ptrdiff_t>(valid_lo_);
        const auto last = values_.begin() + static_cast<std::ptrdiff_t>(valid_hi_) + 1;
        const auto [mn, mx] = std::minmax_element(first, last);
        return *mx - *mn;
    }

private:
    GridFunction(double x_min, double step, std::vector<double> values, std::size_t lo,
                 std::size_t hi, bool full)
        : x_min_(x_min), step_(step), values_(std::move(values)), valid_lo_(lo), valid_hi_(hi)
    {
        if (!(step_ > 0.0) || !std::isfinite(x_min_))
            throw DomainError("GridFunction: step must be positive and x_min finite");
        if (values_.empty()) throw DomainError("GridFunction: no values");
        if (full) valid_hi_ = values_.size() - 1;
        if (valid_lo_ > valid_hi_ || valid_hi_ >= values_.size())
            throw DomainError("GridFunction: valid window out of range");
        for (std::size_t i = valid_lo_; i <= valid_hi_; ++i)
            if (!std::isfinite(values_[i]))
                throw DomainError("GridFunction: non-finite value inside the valid window");
    }

    double x_min_;
    double step_;
    std::vector<double> values_;
    std::size_t valid_lo_;
    std::size_t valid_hi_;
};

// ---------------------------------------------------------------------------
// BaseMeasure
// ---------------------------------------------------------------------------

namespace detail {

inline double gaussian_log_pdf(double x, double mu, double sigma)
{
    const double z = (x - mu) / sigma;
    return -0.5 * z * z - std::log(sigma) - kLogSqrt2Pi;
}

struct Table {
    std::vector<double> x;
    std::vector<double> g_raw;
    double log_norm = 0.0; // log of the integral of g_raw * phi

    [[nodiscard]] double raw(double at) const
    {
        if (at < x.front() || at > x.back()) return 0.0;
        auto it = std::upper_bound(x.begin(), x.end(), at);
        if (it == x.end()) return g_raw.back();
        const auto i = static_cast<std::size_t>(it - x.begin());
        const double x0 = x[i - 1], x1 = x[i];
        const double w = (at - x0) / (x1 - x0);
        return (1.0 - w) * g_raw[i - 1] + w * g_raw[i];
    }
};

} // namespace detail

/**
 * Validated base measure. Cheap to copy; tabulated data is shared and
 * immutable.
 */
class BaseMeasure {
public:
    [[nodiscard]] const MeasureSpec& spec() const { return spec_; }
    [[nodiscard]] bool has_closed_form_L() const { return !std::holds_alternative<TabulatedSpec>(spec_); }
    /// Radius around the origin outside which P has mass below 1e-14.
    [[nodiscard]] double support_halfwidth() const { return support_halfwidth_; }

    /// log f(x), f = g * phi the Lebesgue density; -inf where f = 0.
    [[nodiscard]] double log_density(double x) const
    {
        return std::visit(
            [&](const auto& s) -> double {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, GaussianSpec>) {
                    return detail::gaussian_log_pdf(x, s.mu, s.sigma);
                } else if constexpr (std::is_same_v<T, GaussianMixtureSpec>) {
                    const double a = s.weight > 0.0
                        ? std::log(s.weight) + detail::gaussian_log_pdf(x, s.mu1, s.sigma1)
                        : kNegInf;
                    const double b = s.weight < 1.0
                        ? std::log1p(-s.weight) + detail::gaussian_log_pdf(x, s.mu2, s.sigma2)
                        : kNegInf;
                    return log_add_exp(a, b);
                } else {
                    return log_g(x) + normal_log_pdf(x);
                }
            },
            spec_);
    }

    /// log g(x), g = dP/dN(0,1); -inf where g = 0.
    [[nodiscard]] double log_g(double x) const
    {
        return std::visit(
            [&](const auto& s) -> double {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, PerturbedCosineSpec>) {
                    const double v = 1.0 + s.eps * std::cos(x);
                    return v > 0.0 ? std::log(v) - cosine_log_norm(s.eps) : kNegInf;
                } else if constexpr (std::is_same_v<T, PerturbedQuadraticSpec>) {
                    return std::log1p(s.eps * x * x) - std::log1p(s.eps);
                } else if constexpr (std::is_same_v<T, TabulatedSpec>) {
                    const double v = table_->raw(x);
                    return v > 0.0 ? std::log(v) - table_->log_norm : kNegInf;
                } else {
                    return log_density(x) - normal_log_pdf(x);
                }
            },
            spec_);
    }

    [[nodiscard]] double g(double x) const { return std::exp(log_g(x)); }
    [[nodiscard]] double density(double x) const { return std::exp(log_density(x)); }

    /**
     * Integration window for the tilted law P_t: the span of the tilted
     * component centres widened by `halfwidth` scale units on each side.
     * Tabulated measures use their table range.
     */
    [[nodiscard]] Interval window(double t, double halfwidth = 12.0) const
    {
        return std::visit(
            [&](const auto& s) -> Interval {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, GaussianSpec>) {
                    const double c = s.mu + s.sigma * s.sigma * t;
                    return {c - halfwidth * s.sigma, c + halfwidth * s.sigma};
                } else if constexpr (std::is_same_v<T, GaussianMixtureSpec>) {
                    const double c1 = s.mu1 + s.sigma1 * s.sigma1 * t;
                    const double c2 = s.mu2 + s.sigma2 * s.sigma2 * t;
                    const double sc = std::max(s.sigma1, s.sigma2);
                    return {std::min(c1, c2) - halfwidth * sc, std::max(c1, c2) + halfwidth * sc};
                } else if constexpr (std::is_same_v<T, TabulatedSpec>) {
                    return {table_->x.front(), table_->x.back()};
                } else {
                    // g grows at most polynomially; P_t sits near N(t,1).
                    return {t - halfwidth, t + halfwidth};
                }
            },
            spec_);
    }

    /// Nodes where g has a kink (tabulated measures only).
    [[nodiscard]] std::span<const double> breakpoints() const
    {
        if (table_) return {table_->x.data(), table_->x.size()};
        return {};
    }

    friend BaseMeasure build_measure(const MeasureSpec& spec, const QuadratureConfig& cfg);

private:
    static double cosine_log_norm(double eps) { return std::log1p(eps * std::exp(-0.5)); }

    MeasureSpec spec_;
    std::shared_ptr<const detail::Table> table_;
    double support_halfwidth_ = 0.0;
};

namespace detail {

/// Least-squares slope of log g against x^2 on the given nodes.
inline double quadratic_growth_rate(std::span<const double> x, std::span<const double> g)
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double u = x[i] * x[i];
        const double v = std::log(g[i]);
        sx += u;
        sy += v;
        sxx += u * u;
        sxy += u * v;
    }
    const double den = n * sxx - sx * sx;
    return den > 0.0 ? (n * sxy - sx * sy) / den : 0.0;
}

/**
 * g of a law with L(t) finite everywhere grows slower than e^{x^2/2}. Fit
 * log g ~ a + b x^2 on the outer quarter of each tail of strictly positive
 * nodes; b >= 1/2 means the tabulated data only has finite L because it was
 * cut off.
 */
inline void check_tabulated_tails(const std::vector<double>& x, const std::vector<double>& g)
{
    std::vector<std::size_t> pos;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (g[i] > 0.0) pos.push_back(i);
    const std::size_t tail = pos.size() / 4;
    if (tail < 3) return;
    auto rate_for = [&](std::size_t first) {
        std::vector<double> tx, tg;
        for (std::size_t k = first; k < first + tail; ++k) {
            tx.push_back(x[pos[k]]);
            tg.push_back(g[pos[k]]);
        }
        return quadratic_growth_rate(tx, tg);
    };
    const double left = rate_for(0);
    const double right = rate_for(pos.size() - tail);
    if (left >= 0.5 || right >= 0.5)
        throw TailViolation("tabulated g grows like exp(b x^2) with b >= 1/2; "
                            "its Laplace transform would not be finite");
}

} // namespace detail

/**
 * Validate a spec and build the evaluable measure. Tabulated g is linearly
 * interpolated, zero outside its range, and renormalized against phi.
 */
inline BaseMeasure build_measure(const MeasureSpec& spec, const QuadratureConfig& cfg = {})
{
    BaseMeasure m;
    m.spec_ = spec;

    auto positive = [](double v, const char* what) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw InvalidParameter(std::string(what) + " must be positive and finite");
    };
    auto finite = [](double v, const char* what) {
        if (!std::isfinite(v)) throw InvalidParameter(std::string(what) + " must be finite");
    };

    if (const auto* s = std::get_if<GaussianSpec>(&spec)) {
        finite(s->mu, "mu");
        positive(s->sigma, "sigma");
        m.support_halfwidth_ = std::abs(s->mu) + 8.0 * s->sigma;
    } else if (const auto* s = std::get_if<PerturbedCosineSpec>(&spec)) {
        finite(s->eps, "eps");
        if (s->eps > 1.0)
            throw NegativeDensity("perturbed_cosine: 1 + eps*cos(x) < 0 for eps > 1");
        if (!(s->eps >= 0.0 && s->eps < 1.0))
            throw InvalidParameter("perturbed_cosine: eps must lie in [0,1)");
        m.support_halfwidth_ = 8.5;
    } else if (const auto* s = std::get_if<PerturbedQuadraticSpec>(&spec)) {
        finite(s->eps, "eps");
        if (s->eps < 0.0)
            throw NegativeDensity("perturbed_quadratic: 1 + eps*x^2 < 0 for large x when eps < 0");
        m.support_halfwidth_ = 9.0;
    } else if (const auto* s = std::get_if<GaussianMixtureSpec>(&spec)) {
        finite(s->mu1, "mu1");
        finite(s->mu2, "mu2");
        positive(s->sigma1, "sigma1");
        positive(s->sigma2, "sigma2");
        if (!(s->weight >= 0.0 && s->weight <= 1.0))
            throw InvalidParameter("gaussian_mixture: weight must lie in [0,1]");
        m.support_halfwidth_ = std::max(std::abs(s->mu1) + 8.0 * s->sigma1,
                                        std::abs(s->mu2) + 8.0 * s->sigma2);
    } else {
        const auto& tab = std::get<TabulatedSpec>(spec);
        TabulatedSpec data = tab;
        if (data.x.empty() && !tab.path.empty()) data = read_tabulated_file(tab.path);
        if (data.x.size() != data.g.size())
            throw TableFormatError("tabulated: x and g differ in length");
        if (data.x.size() < 2) throw TableFormatError("tabulated: need at least two nodes");
        for (std::size_t i = 0; i < data.x.size(); ++i) {
            if (!std::isfinite(data.x[i]) || !std::isfinite(data.g[i]))
                throw TableFormatError("tabulated: non-finite node");
            if (i > 0 && !(data.x[i] > data.x[i - 1]))
                throw TableFormatError("tabulated: x must be strictly increasing");
            if (data.g[i] < 0.0)
                throw NegativeDensity("tabulated: g < 0 at x = " + detail::format_shortest(data.x[i]));
        }
        detail::check_tabulated_tails(data.x, data.g);

        auto table = std::make_shared<detail::Table>();
        table->x = data.x;
        table->g_raw = data.g;
        const auto* tp = table.get();
        const double z = integrate([tp](double x) { return tp->raw(x) * normal_pdf(x); },
                                   tp->x.front(), tp->x.back(), cfg, tp->x)
                             .value;
        if (!(z > 0.0) || !std::isfinite(z))
            throw NotNormalizable("tabulated: integral of g*phi is zero or not finite");
        table->log_norm = std::log(z);
        m.table_ = std::move(table);
        m.support_halfwidth_ = std::max(std::abs(data.x.front()), std::abs(data.x.back()));
        m.spec_ = TabulatedSpec{tab.path, std::move(data.x), std::move(data.g)};
    }

    const Interval w = m.window(0.0, cfg.truncation_halfwidth);
    const auto total = integrate([&m](double x) { return m.density(x); }, w.lo, w.hi, cfg,
                                 m.breakpoints());
    if (!std::isfinite(total.value) || std::abs(total.value - 1.0) > 1e-10)
        throw NotNormalizable("measure integrates to " + detail::format_shortest(total.value) +
                              " instead of 1");
    return m;
}

/// Exact log L(t) for catalog families; empty for tabulated measures.
inline std::optional<double> closed_form_log_L(const MeasureSpec& spec, double t)
{
    return std::visit(
        [t](const auto& s) -> std::optional<double> {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, GaussianSpec>) {
                return s.mu * t + 0.5 * s.sigma * s.sigma * t * t;
            } else if constexpr (std::is_same_v<T, PerturbedCosineSpec>) {
                const double a = s.eps * std::exp(-0.5);
                return 0.5 * t * t + std::log1p(a * std::cos(t)) - std::log1p(a);
            } else if constexpr (std::is_same_v<T, PerturbedQuadraticSpec>) {
                return 0.5 * t * t + std::log1p(s.eps * (1.0 + t * t)) - std::log1p(s.eps);
            } else if constexpr (std::is_same_v<T, GaussianMixtureSpec>) {
                const double a = s.weight > 0.0
                    ? std::log(s.weight) + s.mu1 * t + 0.5 * s.sigma1 * s.sigma1 * t * t
                    : kNegInf;
                const double b = s.weight < 1.0
                    ? std::log1p(-s.weight) + s.mu2 * t + 0.5 * s.sigma2 * s.sigma2 * t * t
                    : kNegInf;
                return log_add_exp(a, b);
            } else {
                return std::nullopt;
            }
        },
        spec);
}

/// One representative per closed-form family; the default sweep set.
inline std::vector<MeasureSpec> standard_catalog()
{
    return {GaussianSpec{0.0, 1.0}, PerturbedCosineSpec{0.5}, PerturbedQuadraticSpec{1.0},
            GaussianMixtureSpec{0.5, -1.0, 1.0, 1.0, 1.0}};
}

/// Sample g (not f) at n equally spaced nodes of [x_min, x_max].
inline GridFunction sample_to_grid(const BaseMeasure& m, double x_min, double x_max, std::size_t n)
{
    if (!(x_min < x_max) || n < 2)
        throw DomainError("sample_to_grid: need x_min < x_max and n >= 2");
    const double h = (x_max - x_min) / static_cast<double>(n - 1);
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = m.g(x_min + static_cast<double>(i) * h);
    return GridFunction(x_min, h, std::move(values));
}

} // namespace medtilt
