#pragma once

#include <functional>
#include <vector>

#include "tlrcool/params.hpp"
#include "tlrcool/spectra.hpp"
#include "tlrcool/steady_state.hpp"

namespace tlrcool {

struct Peak {
  double center = 0;
  double width = 0;
};

struct PeakSet {
  std::vector<Peak> peaks;
  bool used_fallback = false; // fixed point failed, dense scan used
};

struct IntegrationOptions {
  double rel_tol = 1e-6;
  // |value| floor the relative tolerance is measured against, in the units
  // of the final integral (callers integrating spectra pass the zero-point
  // variance).
  double value_floor = 0;
  long eval_budget = 500000;
  // Hard outer truncation of the domain (model-validity scale). 0 = none.
  double omega_cutoff = 0;
  // Initial half-width of the core domain; 0 picks it from the peaks.
  double start_scale = 0;
  double growth_factor = 4.0;
  int max_growth_steps = 24;
};

struct QuadratureResult {
  double value = 0;
  double abs_error_estimate = 0;
  long n_evaluations = 0;
  int panels_used = 0;
  bool converged = false;
};

// Spectral features the integrator must not step over: the (shifted)
// mechanical resonances at +-omega_peak and the cavity features at
// +-sqrt(kappa^2 + delta^2). The mechanical peak solves the fixed point
// omega^2 = omega_b_eff^2(omega); if that fails to converge a dense scan of
// |chi_eff| brackets the maxima instead and the result is flagged.
PeakSet locate_peaks(const WorkingPoint& wp, const SystemParams& params);

// Globally adaptive Gauss-Kronrod (G7, K15) integral of f over the real
// line: panels seeded on breakpoints at every peak center +- {1,3,10,30}
// widths, worst-error panel bisected first, then the domain grows outward
// in annuli (x growth_factor) until the last annulus contributes less than
// rel_tol * max(|value|, value_floor) or omega_cutoff is reached. converged
// implies abs_error_estimate <= rel_tol * max(|value|, value_floor).
QuadratureResult integrate_spectrum(const std::function<double(double)>& f,
                                    const std::vector<Peak>& peaks,
                                    const IntegrationOptions& opts);

struct VariancePair {
  QuadratureResult var_x; // <dx^2> = (1/2pi) int S_x domega
  QuadratureResult var_p;
  PeakSet peaks;
};

// Variances of the linearised steady state by direct integration of S_x and
// S_p. The domain is truncated at opts.omega_cutoff (0 = params.omega_a,
// where the single-mode TLR model stops being meaningful; S_p only decays
// like 1/|omega| so its integral needs that physical cutoff).
VariancePair mechanical_variances(const WorkingPoint& wp,
                                  const SystemParams& params, double n_cav,
                                  ThermalNoiseModel model,
                                  IntegrationOptions opts = {});

}
