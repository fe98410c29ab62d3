#pragma once

#include <vector>

#include "bralpha/kernels.hpp"
#include "bralpha/sheet.hpp"

namespace bralpha {

enum class Stepper { RK4, Midpoint };

struct SimConfig {
    KernelSpec kernel;
    double dt = 1e-2;
    double t_end = 1.0;
    int output_every = 1;
    Stepper stepper = Stepper::RK4;
    int workers = 1;

    void validate() const;
    long total_steps() const;
};

struct SimState {
    double t = 0.0;
    long step_index = 0;
    SheetCurve curve;
};

// Velocity induced at every marker by the whole sheet:
//   u_j = sum_l w_l K(x_j - x_l)
// with the self term contributing (0,0) for the regularized kernels and
// being an error for RawBR at coincident markers. Per-target sums use
// Neumaier compensation over sources in fixed index order, so the result is
// bit-identical for any worker count.
std::vector<Vec2> induced_velocity(const SheetCurve& curve, const KernelSpec& kernel,
                                   int workers = 1);

// One fixed step of the configured stepper; markers keep their Gamma and
// weights (circulation rides with the markers).
SimState step(const SimState& state, const SimConfig& config);

// sum_j w_j x_j, compensated.
Vec2 linear_impulse(const SheetCurve& curve);

// H = sum_{j<l} w_j w_l Psi^alpha(|x_j - x_l|), nearest-image separation on
// periodic topologies. Conserved by the semi-discrete flow for the plain
// topologies; diagnostic only for PeriodicStrip.
double interaction_hamiltonian(const SheetCurve& curve, double alpha);

namespace detail {
// Internal summation engine behind induced_velocity.
void accumulate_velocities(const SheetCurve& curve, const KernelSpec& spec,
                           std::vector<Vec2>& out, int workers);
} // namespace detail

} // namespace bralpha
