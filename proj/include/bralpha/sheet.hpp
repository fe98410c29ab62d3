#pragma once

#include <string>
#include <vector>

#include "bralpha/errors.hpp"
#include "bralpha/kernels.hpp"

namespace bralpha {

enum class Topology { Closed, PeriodicStrip, OpenArc };

// Ordered Lagrangian markers (Gamma_j, x_j) with quadrature weights in Gamma.
//
// Closed:        markers store one circulation period P, positions close up.
// PeriodicStrip: x(Gamma + P) = x(Gamma) + shift; one fundamental period held.
// OpenArc:       finite circulation range, free ends.
struct SheetCurve {
    Topology topology = Topology::OpenArc;
    double period = 0.0; // circulation period P (Closed / PeriodicStrip)
    Vec2 shift{0.0, 0.0}; // spatial shift per period (PeriodicStrip)
    std::vector<double> gammas;
    std::vector<Vec2> positions;
    std::vector<double> weights;

    std::size_t size() const { return gammas.size(); }
    void validate() const; // throws ConfigError / DegenerateCurveError
};

struct RegularityReport {
    double chord_arc = 0.0;
    double lipschitz = 0.0;
    double holder_beta = 0.0;
    double min_pair_distance = 0.0;
};

// Trapezoid weights in Gamma: uniform P/N on periodic topologies, composite
// trapezoid on an open arc. Fills curve.weights.
void assign_weights(SheetCurve& curve);

// Discrete chord-arc constant |x|_*: min over marker pairs of chord length
// over circulation distance. Circulation distance is geodesic modulo P on
// periodic topologies; on a PeriodicStrip the chord uses the nearest of the
// m in {-1,0,1} shifted images.
double chord_arc_constant(const SheetCurve& curve);

// Discrete Lipschitz seminorm |x|_1: max of the same pairwise ratios.
double lipschitz_seminorm(const SheetCurve& curve);

// Discrete Holder seminorm |dx/dGamma|_beta of the derivative obtained from
// derivative_along, beta in (0,1).
double holder_seminorm(const SheetCurve& curve, double beta);

// dx/dGamma by 4th-order finite differences (Fornberg weights, exact for
// polynomial degree <= 4 on any grid); periodic wrap applies the shift,
// open-arc ends use one-sided stencils. Requires N >= 5.
std::vector<Vec2> derivative_along(const SheetCurve& curve);

// gamma_j = 1 / |x_Gamma(Gamma_j)|; DegenerateCurveError below 1e-12.
std::vector<double> vorticity_density(const SheetCurve& curve);

RegularityReport regularity_report(const SheetCurve& curve, double beta = 0.5);

// Scenario constructors.
SheetCurve make_circle(double radius, int n, double total_circulation);
SheetCurve make_ellipse(double semi_a, double semi_b, int n, double total_circulation);
// Flat sheet of uniform strength gamma0 on a strip of length L, perturbed in
// x2 by amplitude a at integer mode k: x(Gamma) = (Gamma/gamma0, a cos(2 pi k
// Gamma/(gamma0 L))), shift (L, 0).
SheetCurve make_flat_perturbed(int mode, double amplitude, int n, double gamma0,
                               double length);

struct ScenarioParams {
    double radius = 1.0;
    double semi_a = 1.0, semi_b = 0.5;
    double total_circulation = two_pi;
    int mode = 1;
    double amplitude = 0.0;
    double gamma0 = 1.0;
    double length = two_pi;
    int n = 128;
};

// name in {"circle", "ellipse", "flat_perturbed"}
SheetCurve build_scenario(const std::string& name, const ScenarioParams& params);

} // namespace bralpha
