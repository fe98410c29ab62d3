#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "bralpha/errors.hpp"

namespace bralpha {

struct Vec2 {
    double x1 = 0.0, x2 = 0.0;

    Vec2 perp() const { return {-x2, x1}; } // x-perp = (-x2, x1)
    double norm2() const { return x1 * x1 + x2 * x2; }
    double norm() const { return std::sqrt(norm2()); }

    Vec2& operator+=(Vec2 o) { x1 += o.x1; x2 += o.x2; return *this; }
    Vec2& operator-=(Vec2 o) { x1 -= o.x1; x2 -= o.x2; return *this; }
    Vec2& operator*=(double s) { x1 *= s; x2 *= s; return *this; }
    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
    friend Vec2 operator-(Vec2 a) { return {-a.x1, -a.x2}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x1, s * a.x2}; }
    friend Vec2 operator*(Vec2 a, double s) { return s * a; }
    friend bool operator==(Vec2 a, Vec2 b) { return a.x1 == b.x1 && a.x2 == b.x2; }
};

enum class KernelKind { RawBR, BRAlpha, Blob };

// Which desingularization is active, plus optional periodization in x1.
struct KernelSpec {
    KernelKind kind = KernelKind::RawBR;
    double alpha = 0.0; // regularization length, BRAlpha only
    double delta = 0.0; // blob width, Blob only
    std::optional<double> period;
    double image_tolerance = 1e-13; // tail truncation for periodized corrections

    static KernelSpec raw_br() { return {KernelKind::RawBR}; }
    static KernelSpec br_alpha(double a) { return {KernelKind::BRAlpha, a}; }
    static KernelSpec blob(double d) { return {KernelKind::Blob, 0.0, d}; }

    KernelSpec periodized(double L) const
    {
        KernelSpec s = *this;
        s.period = L;
        return s;
    }
    KernelSpec with_image_tolerance(double tol) const
    {
        KernelSpec s = *this;
        s.image_tolerance = tol;
        return s;
    }

    // Image count M for the truncated (K^alpha - K) correction sum.
    int image_count() const;

    void validate() const; // throws ConfigError
};

// Smoothed stream-function profile Psi^alpha(r) = (K0(r/alpha) + log r)/(2 pi),
// continued to r = 0 by its finite limit (log(2 alpha) - gamma_E)/(2 pi).
double psi_alpha(double r, double alpha);

// Radial derivative D Psi^alpha(r) = (1/r - K1(r/alpha)/alpha)/(2 pi);
// 0 at r = 0, bounded by C/alpha, positive for r > 0.
double d_psi_alpha(double r, double alpha);

// Helmholtz Green function G^alpha(x) = K0(|x|/alpha) / (2 pi alpha^2).
double g_alpha(Vec2 x, double alpha);

// Closed-form image sum of the raw Biot-Savart kernel over x1-translates:
// sum_m K(x + (mL, 0)) =
//   (1/2L) (-sinh(2 pi x2/L), sin(2 pi x1/L)) / (cosh(2 pi x2/L) - cos(2 pi x1/L))
Vec2 periodized_raw_br(Vec2 x, double L);

// The active kernel at separation x. Exactly odd: eval(-x) == -eval(x)
// bit for bit.
Vec2 eval_kernel(const KernelSpec& spec, Vec2 x);

inline constexpr double two_pi = 6.28318530717958647692528677;

namespace detail {
// Positive image shifts m*L, m = 1..m_max, whose worst-case contribution to
// the (K^alpha - K) correction sum clears 0.5% of the truncation tolerance.
// Shared by eval_kernel and the summation engine so both keep identical
// terms.
std::vector<double> active_alpha_image_shifts(double alpha, double L, double tol,
                                              int m_max);
} // namespace detail

} // namespace bralpha
