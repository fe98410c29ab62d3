#pragma once

#include <stdexcept>
#include <string>

namespace bralpha {

// Kernel evaluated at a point where it is singular (raw Biot-Savart at the
// origin, periodized kernels at lattice points).
struct SingularityError : std::domain_error {
    using std::domain_error::domain_error;
};

// Curve locally collapsed: coincident markers at positive circulation
// separation, or |x_Gamma| below the collapse threshold.
struct DegenerateCurveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Too few markers for the requested stencil or study.
struct ResolutionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Kernel periodicity does not match the curve topology.
struct MismatchError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Mode amplitude left the linear band during a growth-rate fit.
struct RegimeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fit window holds too few snapshots.
struct WindowError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Adaptive quadrature failed to reach the requested tolerance.
struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientDataError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace bralpha
