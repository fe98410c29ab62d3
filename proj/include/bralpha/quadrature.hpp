#pragma once

#include <functional>

namespace bralpha {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long evaluations = 0;
};

// Adaptive Gauss-Kronrod (G7,K15) on a finite interval. Throws
// QuadratureError if the tolerance is not met within the depth budget.
QuadratureResult integrate(const std::function<double(double)>& f,
                           double a, double b,
                           double abs_tol = 1e-12, double rel_tol = 1e-12,
                           int max_depth = 48);

// integral_a^inf sin(omega x) g(x) dx for slowly decaying g: one partial
// integral per half-period of the sine, then iterated-mean acceleration of
// the alternating series of partials.
double integrate_sin_tail(const std::function<double(double)>& g,
                          double a, double omega,
                          double abs_tol = 1e-12, int max_half_periods = 200);

} // namespace bralpha
