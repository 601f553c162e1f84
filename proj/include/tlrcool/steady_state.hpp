#pragma once

#include <complex>
#include <vector>

#include "tlrcool/params.hpp"
#include "tlrcool/verdict.hpp"

namespace tlrcool {

// Which detuning the caller fixes. Theory curves usually scan the effective
// detuning delta; experiments set the bare detuning delta0 = omega_a -
// omega_d and the radiation-pressure shift moves the operating point.
enum class DetuningMode { given_delta0, given_delta };

struct DriveParams {
  std::complex<double> epsilon = 2.5e3; // drive amplitude [rad/s | omega_b]
  double delta0 = 1.0;                  // bare detuning omega_a - omega_d
};

// Fixes epsilon plus one of the two detunings.
struct DriveInput {
  std::complex<double> epsilon = 2.5e3;
  DetuningMode mode = DetuningMode::given_delta;
  double detuning = 1.0; // delta in given_delta mode, delta0 otherwise
};

// Classical operating point the fluctuations are linearised around.
struct WorkingPoint {
  double delta = 0;            // effective detuning
  std::complex<double> a_mean; // steady cavity amplitude
  double x_mean = 0;           // steady MR displacement
  double g_eff = 0;            // |g0 <a>|, linearised coupling magnitude
  double delta0 = 0;           // bare detuning consistent with delta
  DetuningMode mode = DetuningMode::given_delta;
  bool linearization_ok = true; // |<a>| >= 10
};

struct SteadyStateRoot {
  WorkingPoint point;
  Verdict verdict = Verdict::unstable;
  bool principal = false;
};

struct WorkingPointResult {
  WorkingPoint principal;
  std::vector<SteadyStateRoot> roots; // every real root, sorted by delta
  bool multistable = false;           // more than one dynamically stable root
};

// <a> = eps / (kappa + i delta).
std::complex<double> cavity_amplitude(std::complex<double> epsilon,
                                      double kappa, double delta);

// Operating point with the effective detuning prescribed; back-computes the
// bare detuning delta0 = delta + g0 <x>.
WorkingPoint working_point_at_delta(const SystemParams& params,
                                    std::complex<double> epsilon,
                                    double delta);

// Solves the self-consistency delta = delta0 - g0 <x>(delta), a cubic in
// delta. Every real root is returned with its stability verdict; the
// principal root is the one continuously connected to the eps = 0 solution
// (tracked by marching |eps| up from zero).
WorkingPointResult solve_working_point(const SystemParams& params,
                                       const DriveParams& drive);

WorkingPointResult solve_working_point(const SystemParams& params,
                                       const DriveInput& drive);

// Real roots of x^3 + b x^2 + c x + d, ascending, Newton-polished.
std::vector<double> solve_cubic_real(double b, double c, double d);

}
