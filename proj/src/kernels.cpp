#include "bralpha/kernels.hpp"
#include "bralpha/bessel.hpp"

#include <cmath>
#include <complex>
#include <vector>

namespace bralpha {
namespace {

void check_alpha(double alpha, const char* fn)
{
    if (!(alpha > 0.0))
        throw std::domain_error(std::string(fn) + ": alpha must be positive");
}

bool negative_halfplane(Vec2 x)
{
    return x.x2 < 0.0 || (x.x2 == 0.0 && x.x1 < 0.0);
}

Vec2 raw_br(Vec2 x)
{
    const double r2 = x.norm2();
    if (r2 == 0.0)
        throw SingularityError("raw Biot-Savart kernel is singular at x = 0");
    return (1.0 / (two_pi * r2)) * x.perp();
}

// (K^alpha - K)(y) = -y-perp * (z K1(z)) / (2 pi |y|^2),  z = |y|/alpha.
// Decays like e^{-z}; bessel_k1 underflows to an exact 0 for large z.
Vec2 alpha_minus_raw(Vec2 y, double alpha)
{
    const double r2 = y.norm2();
    const double z = std::sqrt(r2) / alpha;
    const double zk1 = z * bessel_k1(z);
    return (-zk1 / (two_pi * r2)) * y.perp();
}

Vec2 blob_minus_raw(Vec2 y, double delta)
{
    const double r2 = y.norm2();
    const double d2 = delta * delta;
    return (-d2 / (two_pi * r2 * (r2 + d2))) * y.perp();
}

// periodized_raw_br(x) - raw_br(x): smooth through the origin, where both
// terms diverge identically. Small arguments go through the Laurent tail of
// cot, the rest through the two explicit evaluations (their cancellation is
// harmless in absolute terms away from the origin).
Vec2 periodization_bracket(Vec2 x, double L)
{
    const double pi = 0.5 * two_pi;
    const std::complex<double> zeta(pi * x.x1 / L, pi * x.x2 / L);
    if (std::abs(zeta) <= 0.3) {
        // cot(z) - 1/z = -z/3 - z^3/45 - 2 z^5/945 - z^7/4725 - 2 z^9/93555 - ...
        const std::complex<double> z2 = zeta * zeta;
        std::complex<double> s = -2.0 / 93555.0;
        s = s * z2 - 1.0 / 4725.0;
        s = s * z2 - 2.0 / 945.0;
        s = s * z2 - 1.0 / 45.0;
        s = s * z2 - 1.0 / 3.0;
        s *= zeta;
        // complex conjugate velocity w = u - i v = -i/(2L) (cot - 1/z)
        const std::complex<double> w = std::complex<double>(0.0, -0.5 / L) * s;
        return {w.real(), -w.imag()};
    }
    return periodized_raw_br(x, L) - raw_br(x);
}

int correction_images(double decay_length, double L, double tol)
{
    return static_cast<int>(std::ceil(decay_length / L * std::log(1.0 / tol))) + 1;
}

// Image count for the algebraically decaying blob correction,
// |K_delta - K|(y) <= delta^2 / (2 pi |y|^3).
int blob_images(double delta, double L, double tol)
{
    const double m = std::cbrt(delta * delta / (two_pi * tol)) / L;
    return static_cast<int>(std::ceil(m)) + 1;
}

Vec2 eval_periodized(const KernelSpec& spec, Vec2 x)
{
    const double L = *spec.period;
    // canonical representative of x modulo (L, 0)
    Vec2 xr{x.x1 - L * std::rint(x.x1 / L), x.x2};

    if (spec.kind == KernelKind::RawBR)
        return periodized_raw_br(xr, L);

    if (xr.norm2() == 0.0)
        return {0.0, 0.0}; // continuous limit; image pairs cancel

    Vec2 central, corr{0.0, 0.0};
    if (spec.kind == KernelKind::BRAlpha) {
        central = eval_kernel(KernelSpec::br_alpha(spec.alpha), xr);
        for (double sh : detail::active_alpha_image_shifts(
                 spec.alpha, L, spec.image_tolerance, spec.image_count())) {
            corr += alpha_minus_raw({xr.x1 - sh, xr.x2}, spec.alpha);
            corr += alpha_minus_raw({xr.x1 + sh, xr.x2}, spec.alpha);
        }
    } else {
        central = eval_kernel(KernelSpec::blob(spec.delta), xr);
        const int m_count = blob_images(spec.delta, L, spec.image_tolerance);
        for (int m = 1; m <= m_count; ++m) {
            corr += blob_minus_raw({xr.x1 - m * L, xr.x2}, spec.delta);
            corr += blob_minus_raw({xr.x1 + m * L, xr.x2}, spec.delta);
        }
    }
    return central + periodization_bracket(xr, L) + corr;
}

} // namespace

int KernelSpec::image_count() const
{
    if (!period)
        return 0;
    return correction_images(alpha, *period, image_tolerance);
}

namespace detail {
std::vector<double> active_alpha_image_shifts(double alpha, double L, double tol,
                                              int m_max)
{
    std::vector<double> out;
    for (int m = 1; m <= m_max; ++m) {
        const double rmin = (m - 0.5) * L;
        const double z = rmin / alpha;
        const double bound = z * bessel_k1(z) / (two_pi * rmin);
        if (bound >= 0.005 * tol)
            out.push_back(m * L);
    }
    return out;
}
} // namespace detail

void KernelSpec::validate() const
{
    switch (kind) {
    case KernelKind::RawBR:
        break;
    case KernelKind::BRAlpha:
        if (!(alpha > 0.0))
            throw ConfigError("KernelSpec: BRAlpha requires alpha > 0");
        break;
    case KernelKind::Blob:
        if (!(delta > 0.0))
            throw ConfigError("KernelSpec: Blob requires delta > 0");
        break;
    }
    if (period) {
        if (!(*period > 0.0))
            throw ConfigError("KernelSpec: period must be positive");
        if (!(image_tolerance > 0.0) || image_tolerance > 1e-6)
            throw ConfigError("KernelSpec: image_tolerance must lie in (0, 1e-6]");
    }
}

double psi_alpha(double r, double alpha)
{
    check_alpha(alpha, "psi_alpha");
    if (r < 0.0 || std::isnan(r))
        throw std::domain_error("psi_alpha: r must be nonnegative");
    // (K0(r/alpha) + log r)/(2 pi) = (k0_plus_log(r/alpha) + log alpha)/(2 pi);
    // at r = 0 this is the finite limit (log(2 alpha) - gamma_E)/(2 pi).
    return (bessel_k0_plus_log(r / alpha) + std::log(alpha)) / two_pi;
}

double d_psi_alpha(double r, double alpha)
{
    check_alpha(alpha, "d_psi_alpha");
    if (r < 0.0 || std::isnan(r))
        throw std::domain_error("d_psi_alpha: r must be nonnegative");
    if (r == 0.0)
        return 0.0;
    return bessel_k1_deficit(r / alpha) / (two_pi * r);
}

double g_alpha(Vec2 x, double alpha)
{
    check_alpha(alpha, "g_alpha");
    const double r = x.norm();
    if (r == 0.0)
        throw SingularityError("g_alpha: logarithmic singularity at x = 0");
    return bessel_k0(r / alpha) / (two_pi * alpha * alpha);
}

Vec2 periodized_raw_br(Vec2 x, double L)
{
    if (!(L > 0.0))
        throw std::domain_error("periodized_raw_br: period must be positive");
    if (negative_halfplane(x))
        return -periodized_raw_br(-x, L);

    const double w1 = two_pi * x.x1 / L;
    const double w2 = two_pi * x.x2 / L; // >= 0 after canonicalization
    // Scale numerator and denominator by e^{-w2} so large x2 cannot overflow:
    //   sinh w2 / (cosh w2 - cos w1) = (1 - q^2) / (1 + q^2 - 2 q cos w1)
    const double q = std::exp(-w2);
    const double c = std::cos(w1);
    const double den = 1.0 + q * q - 2.0 * q * c;
    if (den == 0.0)
        throw SingularityError("periodized_raw_br: lattice point");
    const double inv = 1.0 / (2.0 * L * den);
    return {-(1.0 - q * q) * inv, 2.0 * q * std::sin(w1) * inv};
}

Vec2 eval_kernel(const KernelSpec& spec, Vec2 x)
{
    spec.validate();
    if (!std::isfinite(x.x1) || !std::isfinite(x.x2))
        throw std::invalid_argument("eval_kernel: non-finite separation");
    if (negative_halfplane(x))
        return -eval_kernel(spec, -x); // oddness made structural

    if (spec.period)
        return eval_periodized(spec, x);

    switch (spec.kind) {
    case KernelKind::RawBR:
        return raw_br(x);
    case KernelKind::BRAlpha: {
        const double r2 = x.norm2();
        if (r2 == 0.0)
            return {0.0, 0.0};
        // K^alpha(x) = x-perp DPsi(|x|)/|x| = x-perp (1 - z K1(z))/(2 pi |x|^2)
        const double z = std::sqrt(r2) / spec.alpha;
        return (bessel_k1_deficit(z) / (two_pi * r2)) * x.perp();
    }
    case KernelKind::Blob: {
        const double r2 = x.norm2();
        return (1.0 / (two_pi * (r2 + spec.delta * spec.delta))) * x.perp();
    }
    }
    return {};
}

} // namespace bralpha
