#include "bralpha/sheet.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace bralpha {
namespace {

constexpr double collapse_threshold = 1e-12;

// Circulation distance and chord for a marker pair under the curve's
// topology. Returns {chord, dgamma}.
struct PairMetric {
    double chord;
    double dgamma;
};

inline PairMetric pair_metric(const SheetCurve& c, std::size_t j, std::size_t l)
{
    const double dg_plain = std::abs(c.gammas[j] - c.gammas[l]);
    Vec2 d = c.positions[j] - c.positions[l];
    switch (c.topology) {
    case Topology::OpenArc:
        return {d.norm(), dg_plain};
    case Topology::Closed:
        return {d.norm(), std::min(dg_plain, c.period - dg_plain)};
    case Topology::PeriodicStrip: {
        const double dgamma = std::min(dg_plain, c.period - dg_plain);
        double best = d.norm2();
        best = std::min(best, (d - c.shift).norm2());
        best = std::min(best, (d + c.shift).norm2());
        return {std::sqrt(best), dgamma};
    }
    }
    return {0.0, 0.0};
}

void check_strip_excursion(const SheetCurve& c)
{
    if (c.topology != Topology::PeriodicStrip)
        return;
    // nearest-image search over m in {-1,0,1} assumes less than one period
    // of lateral excursion within the stored fundamental period
    const double s2 = c.shift.norm2();
    if (s2 == 0.0)
        throw ConfigError("PeriodicStrip curve requires a nonzero shift");
    const double inv = 1.0 / std::sqrt(s2);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const Vec2& p : c.positions) {
        const double along = (p.x1 * c.shift.x1 + p.x2 * c.shift.x2) * inv;
        lo = std::min(lo, along);
        hi = std::max(hi, along);
    }
    if (hi - lo > 1.5 * std::sqrt(s2))
        throw DegenerateCurveError(
            "PeriodicStrip markers span more than 1.5 periods; nearest-image "
            "pair metric is no longer valid");
}

// Fornberg finite-difference weights for the first derivative at x0 from the
// given nodes (exact for polynomials up to degree nodes.size()-1).
template <std::size_t N>
std::array<double, N> fd_weights_d1(double x0, const std::array<double, N>& xs)
{
    std::array<std::array<double, 2>, N> w{}; // w[i][k]: derivative order k
    double c1 = 1.0;
    double c4 = xs[0] - x0;
    w[0][0] = 1.0;
    for (std::size_t i = 1; i < N; ++i) {
        double c2 = 1.0;
        const double c5 = c4;
        c4 = xs[i] - x0;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = xs[i] - xs[j];
            c2 *= c3;
            if (j == i - 1) {
                w[i][1] = c1 * (w[i - 1][0] - c5 * w[i - 1][1]) / c2;
                w[i][0] = -c1 * c5 * w[i - 1][0] / c2;
            }
            w[j][1] = (c4 * w[j][1] - w[j][0]) / c3;
            w[j][0] = c4 * w[j][0] / c3;
        }
        c1 = c2;
    }
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i)
        out[i] = w[i][1];
    return out;
}

} // namespace

void SheetCurve::validate() const
{
    const std::size_t n = gammas.size();
    if (n < 3)
        throw ConfigError("SheetCurve: need at least 3 markers");
    if (positions.size() != n || (!weights.empty() && weights.size() != n))
        throw ConfigError("SheetCurve: array length mismatch");
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (!(gammas[i] < gammas[i + 1]))
            throw ConfigError("SheetCurve: gammas must be strictly increasing");
    for (const Vec2& p : positions)
        if (!std::isfinite(p.x1) || !std::isfinite(p.x2))
            throw ConfigError("SheetCurve: non-finite marker position");
    if (topology != Topology::OpenArc) {
        if (!(period > 0.0))
            throw ConfigError("SheetCurve: periodic topology requires period > 0");
        if (!(gammas.back() - gammas.front() < period))
            throw ConfigError("SheetCurve: gamma range must be below one period");
    }
}

void assign_weights(SheetCurve& curve)
{
    const std::size_t n = curve.gammas.size();
    curve.weights.resize(n);
    if (curve.topology == Topology::OpenArc) {
        curve.weights[0] = 0.5 * (curve.gammas[1] - curve.gammas[0]);
        for (std::size_t j = 1; j + 1 < n; ++j)
            curve.weights[j] = 0.5 * (curve.gammas[j + 1] - curve.gammas[j - 1]);
        curve.weights[n - 1] = 0.5 * (curve.gammas[n - 1] - curve.gammas[n - 2]);
    } else {
        const double w = curve.period / static_cast<double>(n);
        std::fill(curve.weights.begin(), curve.weights.end(), w);
    }
}

double chord_arc_constant(const SheetCurve& curve)
{
    curve.validate();
    check_strip_excursion(curve);
    const std::size_t n = curve.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t l = j + 1; l < n; ++l) {
            const PairMetric pm = pair_metric(curve, j, l);
            if (pm.chord == 0.0)
                throw DegenerateCurveError("coincident markers at distinct circulation");
            best = std::min(best, pm.chord / pm.dgamma);
        }
    }
    return best;
}

double lipschitz_seminorm(const SheetCurve& curve)
{
    curve.validate();
    check_strip_excursion(curve);
    const std::size_t n = curve.size();
    double best = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t l = j + 1; l < n; ++l) {
            const PairMetric pm = pair_metric(curve, j, l);
            best = std::max(best, pm.chord / pm.dgamma);
        }
    return best;
}

double holder_seminorm(const SheetCurve& curve, double beta)
{
    if (!(beta > 0.0) || !(beta < 1.0))
        throw ConfigError("holder_seminorm: beta must lie in (0,1)");
    check_strip_excursion(curve);
    const std::vector<Vec2> deriv = derivative_along(curve);
    const std::size_t n = curve.size();
    double best = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t l = j + 1; l < n; ++l) {
            const PairMetric pm = pair_metric(curve, j, l);
            const double dv = (deriv[j] - deriv[l]).norm();
            best = std::max(best, dv / std::pow(pm.dgamma, beta));
        }
    return best;
}

std::vector<Vec2> derivative_along(const SheetCurve& curve)
{
    curve.validate();
    const std::size_t n = curve.size();
    if (n < 5)
        throw ResolutionError("derivative_along: need at least 5 markers");

    std::vector<Vec2> out(n);
    const bool periodic = curve.topology != Topology::OpenArc;
    const Vec2 shift = curve.topology == Topology::PeriodicStrip ? curve.shift : Vec2{0.0, 0.0};

    auto node = [&](long i) -> std::pair<double, Vec2> {
        if (!periodic)
            return {curve.gammas[i], curve.positions[i]};
        long wrap = 0;
        while (i < 0) {
            i += n;
            --wrap;
        }
        while (i >= static_cast<long>(n)) {
            i -= n;
            ++wrap;
        }
        return {curve.gammas[i] + wrap * curve.period,
                curve.positions[i] + static_cast<double>(wrap) * shift};
    };

    for (std::size_t j = 0; j < n; ++j) {
        long first = static_cast<long>(j) - 2;
        if (!periodic)
            first = std::clamp(first, 0L, static_cast<long>(n) - 5);
        std::array<double, 5> xs;
        std::array<Vec2, 5> ps;
        for (int k = 0; k < 5; ++k) {
            auto [g, p] = node(first + k);
            xs[k] = g;
            ps[k] = p;
        }
        const auto w = fd_weights_d1(curve.gammas[j], xs);
        Vec2 d{0.0, 0.0};
        for (int k = 0; k < 5; ++k)
            d += w[k] * ps[k];
        out[j] = d;
    }
    return out;
}

std::vector<double> vorticity_density(const SheetCurve& curve)
{
    const std::vector<Vec2> deriv = derivative_along(curve);
    std::vector<double> gamma(deriv.size());
    for (std::size_t j = 0; j < deriv.size(); ++j) {
        const double speed = deriv[j].norm();
        if (speed <= collapse_threshold)
            throw DegenerateCurveError("vorticity_density: sheet locally collapsed");
        gamma[j] = 1.0 / speed;
    }
    return gamma;
}

RegularityReport regularity_report(const SheetCurve& curve, double beta)
{
    RegularityReport r;
    r.chord_arc = chord_arc_constant(curve);
    r.lipschitz = lipschitz_seminorm(curve);
    r.holder_beta = holder_seminorm(curve, beta);
    double dmin = std::numeric_limits<double>::infinity();
    const std::size_t n = curve.size();
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t l = j + 1; l < n; ++l)
            dmin = std::min(dmin, pair_metric(curve, j, l).chord);
    r.min_pair_distance = dmin;
    return r;
}

SheetCurve make_circle(double radius, int n, double total_circulation)
{
    if (!(radius > 0.0) || n < 3 || !(total_circulation > 0.0))
        throw ConfigError("make_circle: invalid parameters");
    SheetCurve c;
    c.topology = Topology::Closed;
    c.period = total_circulation;
    c.gammas.resize(n);
    c.positions.resize(n);
    for (int j = 0; j < n; ++j) {
        c.gammas[j] = total_circulation * j / n;
        const double th = two_pi * j / n;
        c.positions[j] = {radius * std::cos(th), radius * std::sin(th)};
    }
    assign_weights(c);
    return c;
}

SheetCurve make_ellipse(double semi_a, double semi_b, int n, double total_circulation)
{
    if (!(semi_a > 0.0) || !(semi_b > 0.0) || n < 3 || !(total_circulation > 0.0))
        throw ConfigError("make_ellipse: invalid parameters");
    SheetCurve c;
    c.topology = Topology::Closed;
    c.period = total_circulation;
    c.gammas.resize(n);
    c.positions.resize(n);
    for (int j = 0; j < n; ++j) {
        c.gammas[j] = total_circulation * j / n;
        const double th = two_pi * j / n;
        c.positions[j] = {semi_a * std::cos(th), semi_b * std::sin(th)};
    }
    assign_weights(c);
    return c;
}

SheetCurve make_flat_perturbed(int mode, double amplitude, int n, double gamma0,
                               double length)
{
    if (mode < 0 || amplitude < 0.0 || n < 3 || !(gamma0 > 0.0) || !(length > 0.0))
        throw ConfigError("make_flat_perturbed: invalid parameters");
    if (2 * mode >= n)
        throw ConfigError("make_flat_perturbed: mode unresolvable at this N");
    SheetCurve c;
    c.topology = Topology::PeriodicStrip;
    c.period = gamma0 * length;
    c.shift = {length, 0.0};
    c.gammas.resize(n);
    c.positions.resize(n);
    for (int j = 0; j < n; ++j) {
        c.gammas[j] = c.period * j / n;
        const double x1 = c.gammas[j] / gamma0;
        c.positions[j] = {x1, amplitude * std::cos(two_pi * mode * j / n)};
    }
    assign_weights(c);
    return c;
}

SheetCurve build_scenario(const std::string& name, const ScenarioParams& p)
{
    if (name == "circle")
        return make_circle(p.radius, p.n, p.total_circulation);
    if (name == "ellipse")
        return make_ellipse(p.semi_a, p.semi_b, p.n, p.total_circulation);
    if (name == "flat_perturbed")
        return make_flat_perturbed(p.mode, p.amplitude, p.n, p.gamma0, p.length);
    throw ConfigError("build_scenario: unknown scenario '" + name + "'");
}

} // namespace bralpha
