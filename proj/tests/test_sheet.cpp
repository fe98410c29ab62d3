#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bralpha/sheet.hpp"

#include <cmath>
#include <complex>
#include <random>

using namespace bralpha;

namespace {

SheetCurve open_line(int n, double slope = 1.0, double g0 = 0.0, double g1 = 1.0)
{
    SheetCurve c;
    c.topology = Topology::OpenArc;
    c.gammas.resize(n);
    c.positions.resize(n);
    for (int j = 0; j < n; ++j) {
        c.gammas[j] = g0 + (g1 - g0) * j / (n - 1);
        c.positions[j] = {slope * c.gammas[j], 0.0};
    }
    assign_weights(c);
    return c;
}

// The definition, written out directly: exhaustive pairwise extrema with the
// documented wrapping conventions.
struct BruteRegularity {
    double chord_arc = std::numeric_limits<double>::infinity();
    double lipschitz = 0.0;
};

BruteRegularity brute_pairwise(const SheetCurve& c)
{
    BruteRegularity out;
    const std::size_t n = c.size();
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t l = 0; l < n; ++l) {
            if (j == l)
                continue;
            double dg = std::abs(c.gammas[j] - c.gammas[l]);
            double chord;
            if (c.topology == Topology::OpenArc) {
                chord = (c.positions[j] - c.positions[l]).norm();
            } else {
                dg = std::min(dg, c.period - dg);
                if (c.topology == Topology::PeriodicStrip) {
                    const Vec2 d = c.positions[j] - c.positions[l];
                    chord = std::sqrt(std::min(
                        {d.norm2(), (d - c.shift).norm2(), (d + c.shift).norm2()}));
                } else {
                    chord = (c.positions[j] - c.positions[l]).norm();
                }
            }
            out.chord_arc = std::min(out.chord_arc, chord / dg);
            out.lipschitz = std::max(out.lipschitz, chord / dg);
        }
    return out;
}

double mode_amp(const SheetCurve& c, int k)
{
    std::complex<double> acc{0.0, 0.0};
    const std::size_t n = c.size();
    for (std::size_t j = 0; j < n; ++j)
        acc += c.positions[j].x2 *
               std::exp(std::complex<double>(0.0, -two_pi * k * double(j) / double(n)));
    return 2.0 * std::abs(acc) / double(n);
}

} // namespace

TEST_CASE("chord-arc constant")
{
    const SheetCurve circle = make_circle(1.0, 512, two_pi);
    CHECK(chord_arc_constant(circle) == doctest::Approx(2.0 / 3.14159265358979324).epsilon(1e-4));

    CHECK(chord_arc_constant(open_line(64)) == 1.0);

    const SheetCurve ell = make_ellipse(1.0, 0.5, 8, two_pi);
    CHECK(chord_arc_constant(ell) == brute_pairwise(ell).chord_arc);

    SheetCurve bad = open_line(8);
    bad.positions[5] = bad.positions[2];
    CHECK_THROWS_AS(chord_arc_constant(bad), DegenerateCurveError);
}

TEST_CASE("lipschitz seminorm")
{
    const SheetCurve circle = make_circle(1.0, 512, two_pi);
    CHECK(lipschitz_seminorm(circle) == doctest::Approx(1.0).epsilon(1e-4));

    CHECK(lipschitz_seminorm(open_line(32, 2.0)) == 2.0);

    SheetCurve rnd;
    rnd.topology = Topology::OpenArc;
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int j = 0; j < 16; ++j) {
        rnd.gammas.push_back(j + 0.3 * U(rng));
        rnd.positions.push_back({U(rng), U(rng)});
    }
    assign_weights(rnd);
    const auto brute = brute_pairwise(rnd);
    CHECK(lipschitz_seminorm(rnd) == brute.lipschitz);
    CHECK(chord_arc_constant(rnd) == brute.chord_arc);
    CHECK(chord_arc_constant(rnd) <= lipschitz_seminorm(rnd));
}

TEST_CASE("pairwise functionals match brute force on periodic topologies")
{
    const SheetCurve strip = make_flat_perturbed(2, 0.3, 48, 1.5, two_pi);
    const auto brute = brute_pairwise(strip);
    CHECK(chord_arc_constant(strip) == brute.chord_arc);
    CHECK(lipschitz_seminorm(strip) == brute.lipschitz);

    const SheetCurve circle = make_circle(0.7, 48, 2.0);
    const auto bc = brute_pairwise(circle);
    CHECK(chord_arc_constant(circle) == bc.chord_arc);
    CHECK(lipschitz_seminorm(circle) == bc.lipschitz);
}

TEST_CASE("holder seminorm")
{
    const SheetCurve circle = make_circle(1.0, 512, two_pi);
    const double h = holder_seminorm(circle, 0.5);
    CHECK(h > 0.5);
    CHECK(h < 1.5);

    CHECK(holder_seminorm(open_line(16), 0.5) < 1e-12);
    CHECK_THROWS_AS(holder_seminorm(circle, 0.0), ConfigError);
    CHECK_THROWS_AS(holder_seminorm(circle, 1.0), ConfigError);
}

TEST_CASE("homogeneity and isometry invariance")
{
    SheetCurve c = make_ellipse(1.0, 0.4, 40, two_pi);
    const double ca = chord_arc_constant(c), li = lipschitz_seminorm(c),
                 ho = holder_seminorm(c, 0.5);

    SheetCurve scaled2 = c;
    for (auto& p : scaled2.positions)
        p = 2.0 * p;
    CHECK(chord_arc_constant(scaled2) == 2.0 * ca); // power-of-two scaling is exact
    CHECK(lipschitz_seminorm(scaled2) == 2.0 * li);
    CHECK(holder_seminorm(scaled2, 0.5) == 2.0 * ho);

    SheetCurve scaled3 = c;
    for (auto& p : scaled3.positions)
        p = 3.0 * p;
    CHECK(chord_arc_constant(scaled3) == doctest::Approx(3.0 * ca).epsilon(1e-14));
    CHECK(lipschitz_seminorm(scaled3) == doctest::Approx(3.0 * li).epsilon(1e-14));
    CHECK(holder_seminorm(scaled3, 0.5) == doctest::Approx(3.0 * ho).epsilon(1e-14));

    SheetCurve moved = c;
    const double th = 0.8137;
    for (auto& p : moved.positions)
        p = Vec2{std::cos(th) * p.x1 - std::sin(th) * p.x2 + 4.0,
                 std::sin(th) * p.x1 + std::cos(th) * p.x2 - 2.5};
    CHECK(chord_arc_constant(moved) == doctest::Approx(ca).epsilon(1e-13));
    CHECK(lipschitz_seminorm(moved) == doctest::Approx(li).epsilon(1e-13));
}

TEST_CASE("derivative along the curve")
{
    const SheetCurve circle = make_circle(1.0, 256, two_pi);
    const auto d = derivative_along(circle);
    double err = 0.0;
    for (std::size_t j = 0; j < circle.size(); ++j) {
        const double g = circle.gammas[j];
        err = std::max(err, (d[j] - Vec2{-std::sin(g), std::cos(g)}).norm());
    }
    CHECK(err <= 1e-7);

    // exact for straight lines
    const auto dl = derivative_along(open_line(16));
    for (const Vec2& v : dl) {
        CHECK(v.x1 == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(v.x2 == 0.0);
    }

    // 4th-order self-refinement
    auto max_err = [](int n) {
        const SheetCurve c = make_circle(1.0, n, two_pi);
        const auto dv = derivative_along(c);
        double e = 0.0;
        for (std::size_t j = 0; j < c.size(); ++j) {
            const double g = c.gammas[j];
            e = std::max(e, (dv[j] - Vec2{-std::sin(g), std::cos(g)}).norm());
        }
        return e;
    };
    const double ratio = max_err(64) / max_err(128);
    CHECK(ratio > 14.0);
    CHECK(ratio < 18.0);

    SheetCurve tiny = open_line(4);
    CHECK_THROWS_AS(derivative_along(tiny), ResolutionError);
}

TEST_CASE("one-sided stencils keep degree-4 exactness at open ends")
{
    SheetCurve c;
    c.topology = Topology::OpenArc;
    for (int j = 0; j < 12; ++j) {
        const double g = 0.2 * j;
        c.gammas.push_back(g);
        // quartic in gamma; derivative 4 g^3 - 3 g^2 + 2
        c.positions.push_back({g * g * g * g - g * g * g + 2.0 * g, 0.5 * g * g});
    }
    assign_weights(c);
    const auto d = derivative_along(c);
    for (int j = 0; j < 12; ++j) {
        const double g = c.gammas[j];
        CHECK(d[j].x1 == doctest::Approx(4 * g * g * g - 3 * g * g + 2.0).epsilon(1e-12));
        CHECK(d[j].x2 == doctest::Approx(g).epsilon(1e-12));
    }
}

TEST_CASE("vorticity density")
{
    const auto g1 = vorticity_density(make_circle(1.0, 256, two_pi));
    for (double g : g1)
        CHECK(g == doctest::Approx(1.0).epsilon(1e-7));

    const auto g2 = vorticity_density(make_circle(2.0, 256, two_pi));
    for (double g : g2)
        CHECK(g == doctest::Approx(0.5).epsilon(1e-7));

    const auto g3 = vorticity_density(open_line(32));
    for (double g : g3)
        CHECK(g == doctest::Approx(1.0).epsilon(1e-13));

    // cubic cusp: x_Gamma = 0 exactly at the midpoint marker
    SheetCurve cusp;
    cusp.topology = Topology::OpenArc;
    for (int j = 0; j < 11; ++j) {
        const double g = -1.0 + 0.2 * j;
        cusp.gammas.push_back(g);
        cusp.positions.push_back({g * g * g, 0.0});
    }
    assign_weights(cusp);
    CHECK_THROWS_AS(vorticity_density(cusp), DegenerateCurveError);
}

TEST_CASE("scenario construction")
{
    ScenarioParams p;
    p.radius = 1.0;
    p.n = 128;
    p.total_circulation = two_pi;
    const SheetCurve circle = build_scenario("circle", p);
    CHECK(chord_arc_constant(circle) ==
          doctest::Approx(2.0 / 3.14159265358979324).epsilon(1e-3));
    double wsum = 0.0;
    for (double w : circle.weights)
        wsum += w;
    CHECK(wsum == doctest::Approx(two_pi).epsilon(1e-13));

    const SheetCurve flat0 = make_flat_perturbed(2, 0.0, 64, 1.0, two_pi);
    for (const Vec2& x : flat0.positions)
        CHECK(x.x2 == 0.0);
    for (double g : vorticity_density(flat0))
        CHECK(g == doctest::Approx(1.0).epsilon(1e-13));

    const SheetCurve flat1 = make_flat_perturbed(1, 1e-4, 64, 1.0, two_pi);
    CHECK(mode_amp(flat1, 1) == doctest::Approx(1e-4).epsilon(1e-12));
    CHECK(mode_amp(flat1, 2) < 1e-18);

    // gamma0 shows up as uniform density
    const SheetCurve flat_g = make_flat_perturbed(1, 0.0, 64, 2.5, two_pi);
    for (double g : vorticity_density(flat_g))
        CHECK(g == doctest::Approx(2.5).epsilon(1e-12));

    CHECK_THROWS_AS(build_scenario("sphere", p), ConfigError);
    CHECK_THROWS_AS(make_circle(-1.0, 64, two_pi), ConfigError);
    CHECK_THROWS_AS(make_flat_perturbed(40, 0.1, 64, 1.0, two_pi), ConfigError);
}

TEST_CASE("open-arc weights sum to the circulation range")
{
    SheetCurve c = open_line(17, 1.0, 0.25, 2.0);
    double sum = 0.0;
    for (double w : c.weights)
        sum += w;
    CHECK(sum == doctest::Approx(2.0 - 0.25).epsilon(1e-14));
}

TEST_CASE("validation failures")
{
    SheetCurve c = open_line(8);
    c.gammas[3] = c.gammas[4];
    CHECK_THROWS_AS(chord_arc_constant(c), ConfigError);

    SheetCurve strip = make_flat_perturbed(1, 0.0, 16, 1.0, two_pi);
    strip.positions[7].x1 += 3.0 * two_pi; // lateral excursion beyond one period
    CHECK_THROWS_AS(chord_arc_constant(strip), DegenerateCurveError);
}
