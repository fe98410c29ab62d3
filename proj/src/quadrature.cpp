#include "bralpha/quadrature.hpp"
#include "bralpha/errors.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace bralpha {
namespace {

// Gauss 7 / Kronrod 15 nodes and weights on [-1, 1].
constexpr std::array<double, 8> xk = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr std::array<double, 8> wk = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
    double value, error;
};

Panel gk15(const std::function<double(double)>& f, double a, double b)
{
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fc = f(c);
    double result_k = wk[7] * fc;
    double result_g = wg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double fl = f(c - h * xk[i]);
        const double fr = f(c + h * xk[i]);
        result_k += wk[i] * (fl + fr);
        if (i % 2 == 1)
            result_g += wg[i / 2] * (fl + fr);
    }
    result_k *= h;
    result_g *= h;
    const double diff = std::abs(result_k - result_g);
    // standard QUADPACK error sharpening
    const double err = diff * std::sqrt(std::min(1.0, diff * 200.0));
    return {result_k, std::max(err, 1e-300)};
}

void adapt(const std::function<double(double)>& f, double a, double b,
           double tol, int depth, int max_depth,
           double& value, double& error, long& evals)
{
    Panel p = gk15(f, a, b);
    evals += 15;
    if (p.error <= tol || depth >= max_depth) {
        if (depth >= max_depth && p.error > tol)
            throw QuadratureError("adaptive quadrature stalled");
        value += p.value;
        error += p.error;
        return;
    }
    const double m = 0.5 * (a + b);
    adapt(f, a, m, 0.5 * tol, depth + 1, max_depth, value, error, evals);
    adapt(f, m, b, 0.5 * tol, depth + 1, max_depth, value, error, evals);
}

} // namespace

QuadratureResult integrate(const std::function<double(double)>& f,
                           double a, double b,
                           double abs_tol, double rel_tol, int max_depth)
{
    Panel whole = gk15(f, a, b);
    const double tol = std::max(abs_tol, rel_tol * std::abs(whole.value));
    QuadratureResult r;
    r.evaluations = 15;
    if (whole.error <= tol) {
        r.value = whole.value;
        r.error_estimate = whole.error;
        return r;
    }
    adapt(f, a, b, tol, 0, max_depth, r.value, r.error_estimate, r.evaluations);
    return r;
}

double integrate_sin_tail(const std::function<double(double)>& g,
                          double a, double omega,
                          double abs_tol, int max_half_periods)
{
    if (omega <= 0.0)
        throw std::invalid_argument("integrate_sin_tail: omega must be positive");
    const double half = 3.14159265358979323846264338328 / omega;
    // First zero of sin(omega x) at or after a.
    const long n0 = static_cast<long>(std::ceil(a * omega / 3.14159265358979323846264338328));
    const double first_zero = n0 * half;

    auto fs = [&](double x) { return std::sin(omega * x) * g(x); };

    double head = 0.0;
    if (first_zero > a)
        head = integrate(fs, a, first_zero, abs_tol * 0.1, 1e-13).value;

    // Partial integrals over half-periods alternate in sign; accelerate the
    // alternating series by iterated means of the partial sums.
    std::vector<double> partial_sums;
    partial_sums.reserve(max_half_periods);
    double acc = 0.0;
    double prev_est = 0.0;
    bool have_prev = false;
    for (int n = 0; n < max_half_periods; ++n) {
        const double lo = first_zero + n * half;
        const double hi = lo + half;
        acc += integrate(fs, lo, hi, abs_tol * 0.01, 1e-13).value;
        partial_sums.push_back(acc);
        if (partial_sums.size() >= 12) {
            std::vector<double> row = partial_sums;
            while (row.size() > 1) {
                for (size_t i = 0; i + 1 < row.size(); ++i)
                    row[i] = 0.5 * (row[i] + row[i + 1]);
                row.pop_back();
            }
            const double est = row.front();
            if (have_prev && std::abs(est - prev_est) < 0.5 * abs_tol)
                return head + est;
            prev_est = est;
            have_prev = true;
        }
    }
    // Fall through: use the fully averaged value.
    std::vector<double> row = partial_sums;
    while (row.size() > 1) {
        for (size_t i = 0; i + 1 < row.size(); ++i)
            row[i] = 0.5 * (row[i] + row[i + 1]);
        row.pop_back();
    }
    return head + row.front();
}

} // namespace bralpha
