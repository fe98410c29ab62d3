#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bralpha/dynamics.hpp"

#include <cmath>
#include <random>

using namespace bralpha;

namespace {

// Two active markers plus a zero-weight spectator to satisfy the N >= 3
// representation contract.
SheetCurve two_marker_pair(Vec2 a, Vec2 b)
{
    SheetCurve c;
    c.topology = Topology::OpenArc;
    c.gammas = {0.0, 1.0, 2.0};
    c.positions = {a, b, Vec2{100.0, 0.0}};
    c.weights = {1.0, 1.0, 0.0};
    return c;
}

SimState run_steps(SimState s, const SimConfig& cfg, long steps)
{
    for (long i = 0; i < steps; ++i)
        s = step(s, cfg);
    return s;
}

} // namespace

TEST_CASE("induced velocity of the unperturbed flat sheet vanishes")
{
    const SheetCurve flat = make_flat_perturbed(1, 0.0, 64, 1.0, two_pi);
    const KernelSpec spec = KernelSpec::br_alpha(0.5).periodized(two_pi);
    for (const Vec2& u : induced_velocity(flat, spec)) {
        CHECK(std::abs(u.x1) < 1e-13);
        CHECK(std::abs(u.x2) < 1e-13);
    }
}

TEST_CASE("two-marker mutual velocities")
{
    const SheetCurve c = two_marker_pair({0.0, 0.0}, {1.0, 0.0});
    const auto u = induced_velocity(c, KernelSpec::br_alpha(1.0));
    CHECK(std::abs(u[0].x1) < 1e-15);
    CHECK(u[0].x2 == doctest::Approx(-0.063358432123254121).epsilon(1e-9));
    CHECK(std::abs(u[1].x1) < 1e-15);
    CHECK(u[1].x2 == doctest::Approx(0.063358432123254121).epsilon(1e-9));
}

TEST_CASE("summation engine agrees with per-pair kernel evaluation")
{
    std::mt19937_64 rng(314);
    std::uniform_real_distribution<double> U(-0.02, 0.02);

    SheetCurve strip = make_flat_perturbed(3, 0.05, 80, 1.0, two_pi);
    for (auto& p : strip.positions)
        p += Vec2{U(rng), U(rng)};

    SheetCurve circle = make_circle(1.0, 96, two_pi);
    for (auto& p : circle.positions)
        p += Vec2{U(rng), U(rng)};

    struct Case {
        const SheetCurve* curve;
        KernelSpec spec;
    };
    const std::vector<Case> cases = {
        {&strip, KernelSpec::br_alpha(0.5).periodized(two_pi)},
        {&strip, KernelSpec::br_alpha(0.2).periodized(two_pi).with_image_tolerance(1e-6)},
        {&strip, KernelSpec::raw_br().periodized(two_pi)},
        {&strip, KernelSpec::blob(0.3).periodized(two_pi)},
        {&circle, KernelSpec::br_alpha(0.5)},
        {&circle, KernelSpec::br_alpha(0.05)},
        {&circle, KernelSpec::blob(0.25)},
        {&circle, KernelSpec::raw_br()},
    };
    for (const auto& [curve, spec] : cases) {
        const auto u = induced_velocity(*curve, spec);
        for (std::size_t j = 0; j < curve->size(); j += 7) {
            Vec2 ref{0.0, 0.0};
            for (std::size_t l = 0; l < curve->size(); ++l) {
                if (l == j)
                    continue;
                ref += curve->weights[l] *
                       eval_kernel(spec, curve->positions[j] - curve->positions[l]);
            }
            CHECK(std::abs(u[j].x1 - ref.x1) < 2e-12);
            CHECK(std::abs(u[j].x2 - ref.x2) < 2e-12);
        }
    }
}

TEST_CASE("circle velocity is tangential, uniform, and quadrature-converged")
{
    const SheetCurve coarse = make_circle(1.0, 256, two_pi);
    const KernelSpec spec = KernelSpec::br_alpha(0.5);
    const auto u = induced_velocity(coarse, spec);

    double speed0 = 0.0;
    for (std::size_t j = 0; j < coarse.size(); ++j) {
        const Vec2 n = coarse.positions[j]; // unit radial
        const double radial = u[j].x1 * n.x1 + u[j].x2 * n.x2;
        const double tangential = -u[j].x1 * n.x2 + u[j].x2 * n.x1;
        CHECK(std::abs(radial) < 1e-12);
        if (j == 0)
            speed0 = tangential;
        CHECK(std::abs(tangential - speed0) < 1e-12);
    }

    const SheetCurve fine = make_circle(1.0, 4096, two_pi);
    const auto uf = induced_velocity(fine, spec);
    const Vec2 n0 = fine.positions[0];
    const double fine_speed = -uf[0].x1 * n0.x2 + uf[0].x2 * n0.x1;
    CHECK(speed0 == doctest::Approx(fine_speed).epsilon(1e-6));
}

TEST_CASE("one RK4 step matches explicit Euler as dt -> 0")
{
    SimState s;
    s.curve = make_circle(1.0, 32, two_pi);
    SimConfig cfg;
    cfg.kernel = KernelSpec::br_alpha(0.5);
    cfg.dt = 1e-8;
    cfg.t_end = 1e-8;
    const auto u = induced_velocity(s.curve, cfg.kernel);
    const SimState s1 = step(s, cfg);
    for (std::size_t j = 0; j < s.curve.size(); ++j) {
        const Vec2 rk = s1.curve.positions[j] - s.curve.positions[j];
        const Vec2 euler = cfg.dt * u[j];
        CHECK((rk - euler).norm() <= 1e-6 * euler.norm());
    }
}

TEST_CASE("circle stays a circle after stepping")
{
    SimState s;
    s.curve = make_circle(1.0, 64, two_pi);
    SimConfig cfg;
    cfg.kernel = KernelSpec::br_alpha(0.5);
    cfg.dt = 1e-2;
    cfg.t_end = 1.0;
    s = run_steps(s, cfg, 25);
    double mean = 0.0;
    for (const Vec2& p : s.curve.positions)
        mean += p.norm();
    mean /= static_cast<double>(s.curve.size());
    double var = 0.0;
    for (const Vec2& p : s.curve.positions)
        var += (p.norm() - mean) * (p.norm() - mean);
    CHECK(std::sqrt(var / static_cast<double>(s.curve.size())) < 1e-12);
    CHECK(s.t == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("RK4 reaches its design order in a dt study")
{
    auto terminal = [](double dt, Stepper st) {
        SimState s;
        s.curve = make_circle(1.0, 16, two_pi);
        SimConfig cfg;
        cfg.kernel = KernelSpec::br_alpha(0.8);
        cfg.dt = dt;
        cfg.t_end = 1.0;
        cfg.stepper = st;
        return run_steps(s, cfg, std::lround(1.0 / dt)).curve;
    };
    const SheetCurve ref = terminal(1.0 / 512.0, Stepper::RK4);
    auto err = [&](const SheetCurve& c) {
        double e = 0.0;
        for (std::size_t j = 0; j < c.size(); ++j)
            e = std::max(e, (c.positions[j] - ref.positions[j]).norm());
        return e;
    };
    const double e1 = err(terminal(1.0 / 16.0, Stepper::RK4));
    const double e2 = err(terminal(1.0 / 32.0, Stepper::RK4));
    const double ratio = e1 / e2;
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);

    const double m1 = err(terminal(1.0 / 16.0, Stepper::Midpoint));
    const double m2 = err(terminal(1.0 / 32.0, Stepper::Midpoint));
    CHECK(m1 / m2 > 3.3);
    CHECK(m1 / m2 < 4.7);
}

TEST_CASE("linear impulse")
{
    const SheetCurve circle = make_circle(1.0, 64, two_pi);
    const Vec2 I0 = linear_impulse(circle);
    CHECK(std::abs(I0.x1) < 1e-13);
    CHECK(std::abs(I0.x2) < 1e-13);

    SheetCurve moved = circle;
    for (auto& p : moved.positions)
        p += Vec2{0.7, -1.3};
    const Vec2 I1 = linear_impulse(moved);
    CHECK(I1.x1 - I0.x1 == doctest::Approx(two_pi * 0.7).epsilon(1e-13));
    CHECK(I1.x2 - I0.x2 == doctest::Approx(two_pi * -1.3).epsilon(1e-13));
}

TEST_CASE("impulse is conserved along the flow")
{
    SimState s;
    s.curve = make_circle(1.0, 64, two_pi);
    for (auto& p : s.curve.positions)
        p += Vec2{0.25, 0.0}; // off-center so the impulse is nontrivial
    SimConfig cfg;
    cfg.kernel = KernelSpec::br_alpha(0.5);
    cfg.dt = 1e-2;
    cfg.t_end = 1.0;
    const Vec2 I0 = linear_impulse(s.curve);
    s = run_steps(s, cfg, 100);
    const Vec2 I1 = linear_impulse(s.curve);
    CHECK((I1 - I0).norm() <= 1e-12 * two_pi * 2.0);

    // circulation rides with the markers
    const SheetCurve fresh = make_circle(1.0, 64, two_pi);
    for (std::size_t j = 0; j < fresh.size(); ++j) {
        CHECK(s.curve.gammas[j] == fresh.gammas[j]);
        CHECK(s.curve.weights[j] == fresh.weights[j]);
    }
}

TEST_CASE("interaction hamiltonian: values, invariance, drift order")
{
    const SheetCurve pair = two_marker_pair({0.0, 0.0}, {0.0, 1.0});
    CHECK(interaction_hamiltonian(pair, 1.0) ==
          doctest::Approx(0.067008120508497152).epsilon(1e-9));

    SheetCurve ell = make_ellipse(1.0, 0.5, 32, two_pi);
    const double h0 = interaction_hamiltonian(ell, 0.5);
    SheetCurve moved = ell;
    for (auto& p : moved.positions)
        p += Vec2{3.0, -1.0};
    CHECK(interaction_hamiltonian(moved, 0.5) == doctest::Approx(h0).epsilon(1e-13));

    auto drift = [&](double dt) {
        SimState s;
        s.curve = make_ellipse(1.0, 0.5, 32, two_pi);
        SimConfig cfg;
        cfg.kernel = KernelSpec::br_alpha(0.5);
        cfg.dt = dt;
        cfg.t_end = 1.0;
        const double h_init = interaction_hamiltonian(s.curve, 0.5);
        s = run_steps(s, cfg, std::lround(1.0 / dt));
        return std::abs(interaction_hamiltonian(s.curve, 0.5) - h_init);
    };
    // the clean dt^4 window: coarser pairs carry a dt^5 tail, finer ones sit
    // on the roundoff floor of H
    const double ratio = drift(0.01) / drift(0.005);
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
}

TEST_CASE("reversibility within the integration error budget")
{
    SimState s;
    s.curve = make_circle(1.0, 32, two_pi);
    SimConfig cfg;
    cfg.kernel = KernelSpec::br_alpha(0.5);
    cfg.dt = 1e-3;
    cfg.t_end = 1.0;
    const SheetCurve initial = s.curve;
    s = run_steps(s, cfg, 1000);

    // negating the weights negates the induced field
    SimState back;
    back.curve = s.curve;
    for (auto& w : back.curve.weights)
        w = -w;
    back = run_steps(back, cfg, 1000);
    for (std::size_t j = 0; j < initial.size(); ++j)
        CHECK((back.curve.positions[j] - initial.positions[j]).norm() < 1e-10);
}

TEST_CASE("deterministic across worker counts")
{
    SheetCurve strip = make_flat_perturbed(2, 0.03, 100, 1.0, two_pi);
    const KernelSpec spec = KernelSpec::br_alpha(0.5).periodized(two_pi);
    const auto u1 = induced_velocity(strip, spec, 1);
    const auto u4 = induced_velocity(strip, spec, 4);
    const auto u7 = induced_velocity(strip, spec, 7);
    for (std::size_t j = 0; j < strip.size(); ++j) {
        CHECK(u1[j].x1 == u4[j].x1);
        CHECK(u1[j].x2 == u4[j].x2);
        CHECK(u1[j].x1 == u7[j].x1);
        CHECK(u1[j].x2 == u7[j].x2);
    }
}

TEST_CASE("topology/kernel mismatch and singularity errors")
{
    const SheetCurve strip = make_flat_perturbed(1, 0.0, 16, 1.0, two_pi);
    CHECK_THROWS_AS(induced_velocity(strip, KernelSpec::br_alpha(0.5)), MismatchError);
    CHECK_THROWS_AS(
        induced_velocity(strip, KernelSpec::br_alpha(0.5).periodized(3.0)),
        MismatchError);

    const SheetCurve circle = make_circle(1.0, 16, two_pi);
    CHECK_THROWS_AS(
        induced_velocity(circle, KernelSpec::br_alpha(0.5).periodized(two_pi)),
        MismatchError);

    SheetCurve coincident = two_marker_pair({0.0, 0.0}, {0.0, 0.0});
    CHECK_THROWS_AS(induced_velocity(coincident, KernelSpec::raw_br()),
                    SingularityError);
    // the regularized kernels accept coincident markers
    const auto u = induced_velocity(coincident, KernelSpec::br_alpha(1.0));
    CHECK(u[0].x1 == 0.0);
    CHECK(u[0].x2 == 0.0);
}

TEST_CASE("config validation")
{
    SimConfig cfg;
    cfg.kernel = KernelSpec::br_alpha(0.5);
    cfg.dt = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.dt = 2.0;
    cfg.t_end = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.dt = 0.5;
    cfg.output_every = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
