#include "bralpha/dynamics.hpp"

#include <cmath>

namespace bralpha {
namespace {

void neumaier(double& s, double& c, double v)
{
    const double t = s + v;
    if (std::abs(s) >= std::abs(v))
        c += (s - t) + v;
    else
        c += (v - t) + s;
    s = t;
}

void check_consistency(const SheetCurve& curve, const KernelSpec& kernel)
{
    if (curve.topology == Topology::PeriodicStrip) {
        if (!kernel.period)
            throw MismatchError(
                "PeriodicStrip curve requires a periodized kernel");
        if (curve.shift.x2 != 0.0 ||
            std::abs(curve.shift.x1 - *kernel.period) >
                1e-12 * std::abs(*kernel.period))
            throw MismatchError(
                "kernel period must equal the strip shift (L, 0)");
    } else if (kernel.period) {
        throw MismatchError("periodized kernel on a non-periodic curve");
    }
}

SheetCurve displaced(const SheetCurve& base, const std::vector<Vec2>& dir, double h)
{
    SheetCurve c = base;
    for (std::size_t j = 0; j < c.positions.size(); ++j)
        c.positions[j] += h * dir[j];
    return c;
}

} // namespace

void SimConfig::validate() const
{
    kernel.validate();
    if (!(dt > 0.0))
        throw ConfigError("SimConfig: dt must be positive");
    if (!(t_end >= dt))
        throw ConfigError("SimConfig: dt must not exceed t_end");
    if (output_every < 1)
        throw ConfigError("SimConfig: output_every must be >= 1");
    if (workers < 1)
        throw ConfigError("SimConfig: workers must be >= 1");
}

long SimConfig::total_steps() const
{
    return std::lround(t_end / dt);
}

std::vector<Vec2> induced_velocity(const SheetCurve& curve, const KernelSpec& kernel,
                                   int workers)
{
    curve.validate();
    kernel.validate();
    check_consistency(curve, kernel);
    std::vector<Vec2> u;
    detail::accumulate_velocities(curve, kernel, u, workers);
    return u;
}

SimState step(const SimState& state, const SimConfig& config)
{
    config.validate();
    const SheetCurve& c0 = state.curve;
    const double h = config.dt;
    const int w = config.workers;

    SimState next;
    next.step_index = state.step_index + 1;
    next.t = static_cast<double>(next.step_index) * h;
    next.curve = c0;

    if (config.stepper == Stepper::Midpoint) {
        const auto k1 = induced_velocity(c0, config.kernel, w);
        const auto k2 =
            induced_velocity(displaced(c0, k1, 0.5 * h), config.kernel, w);
        for (std::size_t j = 0; j < c0.size(); ++j)
            next.curve.positions[j] += h * k2[j];
        return next;
    }

    const auto k1 = induced_velocity(c0, config.kernel, w);
    const auto k2 = induced_velocity(displaced(c0, k1, 0.5 * h), config.kernel, w);
    const auto k3 = induced_velocity(displaced(c0, k2, 0.5 * h), config.kernel, w);
    const auto k4 = induced_velocity(displaced(c0, k3, h), config.kernel, w);
    const double h6 = h / 6.0;
    for (std::size_t j = 0; j < c0.size(); ++j)
        next.curve.positions[j] +=
            h6 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    return next;
}

Vec2 linear_impulse(const SheetCurve& curve)
{
    double s1 = 0, c1 = 0, s2 = 0, c2 = 0;
    for (std::size_t j = 0; j < curve.size(); ++j) {
        neumaier(s1, c1, curve.weights[j] * curve.positions[j].x1);
        neumaier(s2, c2, curve.weights[j] * curve.positions[j].x2);
    }
    return {s1 + c1, s2 + c2};
}

double interaction_hamiltonian(const SheetCurve& curve, double alpha)
{
    const std::size_t n = curve.size();
    double s = 0, c = 0;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t l = j + 1; l < n; ++l) {
            Vec2 d = curve.positions[j] - curve.positions[l];
            if (curve.topology == Topology::PeriodicStrip) {
                double best = d.norm2();
                Vec2 dbest = d;
                for (double sgn : {1.0, -1.0}) {
                    const Vec2 cand = d - sgn * curve.shift;
                    if (cand.norm2() < best) {
                        best = cand.norm2();
                        dbest = cand;
                    }
                }
                d = dbest;
            }
            neumaier(s, c,
                     curve.weights[j] * curve.weights[l] * psi_alpha(d.norm(), alpha));
        }
    }
    return s + c;
}

} // namespace bralpha
