#pragma once

#include <stdexcept>
#include <string>

namespace tlrcool {

struct InvalidParameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// B(omega) vanished: the effective susceptibility has a pole on the real axis,
// which only happens at (or beyond) an instability threshold.
struct SingularSusceptibility : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Asked for a stationary quantity of a non-stationary (unstable) system.
struct NoStationaryState : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The eigenvalue and Routh-Hurwitz stability routes returned different
// definite verdicts; indicates an internal inconsistency, never papered over.
struct MethodDisagreement : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// var_x / var_p produced a phonon number negative beyond numerical tolerance.
struct InconsistentVariances : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Constrained optimisation found no stable feasible point in bounds.
struct NoFeasiblePoint : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}
