#pragma once

#include <utility>

namespace bralpha {

// Branch layout of the K0/K1 evaluators: ascending series below
// series_cutoff, Chebyshev fits in the midrange, scaled asymptotic series
// above asymptotic_cutoff.
struct BesselEvalPolicy {
    double series_cutoff = 2.0;
    double asymptotic_cutoff = 15.0;
    double target_rel_error = 1e-12;
};

const BesselEvalPolicy& bessel_policy();

// Modified Bessel functions of the second kind of orders zero and one.
// Domain is x > 0 (std::domain_error otherwise). For x large enough that
// e^{-x} underflows, the result is an exact 0 rather than subnormal noise.
double bessel_k0(double x);
double bessel_k1(double x);

// Overflow-safe scaled variants e^x K0(x) and e^x K1(x).
double bessel_k0_scaled(double x);
double bessel_k1_scaled(double x);
std::pair<double, double> bessel_k0_k1_scaled(double x);

// K0(x) + log(x) without cancellation; limit log(2) - gamma_E at x -> 0+.
// Accepts x = 0.
double bessel_k0_plus_log(double x);

// 1 - x*K1(x) without cancellation; limit 0 at x -> 0+, limit 1 at infinity.
// Vanishes like (x^2/4)(1 - 2*log(x/2) - 2*gamma_E) near 0. Accepts x = 0.
double bessel_k1_deficit(double x);

inline constexpr double euler_gamma = 0.57721566490153286060651209;

} // namespace bralpha
