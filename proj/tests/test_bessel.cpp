#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bralpha/bessel.hpp"
#include "oracles.hpp"

#include <cmath>
#include <vector>

using namespace bralpha;

namespace {
std::vector<double> log_grid(double lo, double hi, int n)
{
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i)
        g[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
    return g;
}
} // namespace

TEST_CASE("K0 reference values")
{
    CHECK(bessel_k0(1.0) == doctest::Approx(0.42102443824070834).epsilon(1e-12));
    CHECK(bessel_k0(5.0) == doctest::Approx(3.6910983340425947e-3).epsilon(1e-12));
    CHECK(bessel_k0(1.0) == doctest::Approx(oracle::k0(1.0)).epsilon(1e-11));
    CHECK(bessel_k0(5.0) == doctest::Approx(oracle::k0(5.0)).epsilon(1e-11));

    // small-x asymptote -log(x/2) - gamma_E
    const double x = 1e-6;
    const double lead = -std::log(0.5 * x) - euler_gamma;
    CHECK(bessel_k0(x) == doctest::Approx(lead).epsilon(1e-9));
}

TEST_CASE("K1 reference values")
{
    CHECK(bessel_k1(1.0) == doctest::Approx(0.60190723019723458).epsilon(1e-12));
    CHECK(bessel_k1(5.0) == doctest::Approx(4.0446134454521643e-3).epsilon(1e-12));
    CHECK(bessel_k1(1.0) == doctest::Approx(oracle::k1(1.0)).epsilon(1e-11));
    CHECK(bessel_k1(5.0) == doctest::Approx(oracle::k1(5.0)).epsilon(1e-11));

    // x K1(x) -> 1
    const double x = 1e-8;
    CHECK(x * bessel_k1(x) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("scaled variants")
{
    CHECK(bessel_k0_scaled(50.0) == doctest::Approx(oracle::k0_scaled(50.0)).epsilon(1e-11));
    CHECK(std::abs(bessel_k0_scaled(50.0) - 0.17680715585742940) < 1e-6);

    const double e = std::exp(1.0);
    auto [k0e, k1e] = bessel_k0_k1_scaled(1.0);
    CHECK(k0e == doctest::Approx(e * 0.42102443824070834).epsilon(1e-12));
    CHECK(k1e == doctest::Approx(e * 0.60190723019723458).epsilon(1e-12));
    CHECK(std::abs(k0e - 1.1444630) < 2e-6);
    CHECK(std::abs(k1e - 1.6361535) < 2e-6);

    // definitional identity at x = 10
    CHECK(bessel_k0(10.0) ==
          doctest::Approx(std::exp(-10.0) * bessel_k0_scaled(10.0)).epsilon(1e-12));
}

TEST_CASE("positivity and monotonicity on a log grid")
{
    double prev_k0 = std::numeric_limits<double>::infinity();
    double prev_k1 = std::numeric_limits<double>::infinity();
    for (double x : log_grid(1e-6, 50.0, 400)) {
        const double v0 = bessel_k0(x);
        const double v1 = bessel_k1(x);
        CHECK(v0 > 0.0);
        CHECK(v1 > 0.0);
        CHECK(v0 < prev_k0);
        CHECK(v1 < prev_k1);
        prev_k0 = v0;
        prev_k1 = v1;
    }
}

TEST_CASE("derivative identity K0' = -K1 with second-order h-refinement")
{
    for (double x : {0.5, 1.0, 2.0, 5.0}) {
        double err_prev = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double h = 1e-3 / (1 << i);
            const double diff = (bessel_k0(x + h) - bessel_k0(x - h)) / (2.0 * h);
            const double err = std::abs(diff + bessel_k1(x));
            if (i > 0) {
                const double ratio = err_prev / err;
                CHECK(ratio > 3.0);
                CHECK(ratio < 5.0);
            }
            err_prev = err;
        }
    }
}

TEST_CASE("recurrence K2 = K0 + (2/x) K1 against quadrature K2")
{
    for (double x : {1.0, 2.0, 5.0}) {
        const double k2 = bessel_k0(x) + 2.0 / x * bessel_k1(x);
        CHECK(k2 == doctest::Approx(oracle::k2(x)).epsilon(1e-8));
    }
}

TEST_CASE("oracle agreement to 1e-10 over [1e-3, 30]")
{
    for (double x : log_grid(1e-3, 30.0, 200)) {
        CHECK(bessel_k0(x) == doctest::Approx(oracle::k0(x)).epsilon(1e-10));
        CHECK(bessel_k1(x) == doctest::Approx(oracle::k1(x)).epsilon(1e-10));
    }
}

TEST_CASE("branch seams are continuous")
{
    const auto& pol = bessel_policy();
    CHECK(pol.series_cutoff > 0.0);
    CHECK(pol.series_cutoff < pol.asymptotic_cutoff);
    CHECK(pol.target_rel_error <= 1e-10);
    for (double seam : {pol.series_cutoff, 8.0, pol.asymptotic_cutoff}) {
        const double lo = seam * (1.0 - 1e-12), hi = seam * (1.0 + 1e-12);
        CHECK(bessel_k0(lo) == doctest::Approx(bessel_k0(hi)).epsilon(1e-12));
        CHECK(bessel_k1(lo) == doctest::Approx(bessel_k1(hi)).epsilon(1e-12));
    }
}

TEST_CASE("domain errors and underflow policy")
{
    CHECK_THROWS_AS(bessel_k0(0.0), std::domain_error);
    CHECK_THROWS_AS(bessel_k0(-1.0), std::domain_error);
    CHECK_THROWS_AS(bessel_k1(0.0), std::domain_error);
    CHECK_THROWS_AS(bessel_k1_scaled(-2.0), std::domain_error);
    CHECK_THROWS_AS(bessel_k0(std::nan("")), std::domain_error);

    CHECK(bessel_k0(800.0) == 0.0); // e^{-x} underflow maps to exact zero
    CHECK(bessel_k1(800.0) == 0.0);
    CHECK(bessel_k0_scaled(800.0) > 0.0);
}

TEST_CASE("auxiliary combinations")
{
    constexpr double log2_minus_gamma = 0.11593151565841245;
    CHECK(bessel_k0_plus_log(0.0) == doctest::Approx(log2_minus_gamma).epsilon(1e-14));
    CHECK(bessel_k0_plus_log(1e-9) == doctest::Approx(log2_minus_gamma).epsilon(1e-12));
    CHECK(bessel_k0_plus_log(1.0) ==
          doctest::Approx(bessel_k0(1.0)).epsilon(1e-13)); // log(1) = 0
    CHECK(bessel_k0_plus_log(7.0) ==
          doctest::Approx(bessel_k0(7.0) + std::log(7.0)).epsilon(1e-13));

    CHECK(bessel_k1_deficit(0.0) == 0.0);
    for (double x : log_grid(1e-4, 30.0, 60)) {
        CHECK(bessel_k1_deficit(x) ==
              doctest::Approx(1.0 - x * oracle::k1(x)).epsilon(2e-10));
        CHECK(bessel_k1_deficit(x) > 0.0);
        CHECK(bessel_k1_deficit(x) < 1.0);
    }
}
