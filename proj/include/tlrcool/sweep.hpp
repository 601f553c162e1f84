#pragma once

#include <string>
#include <vector>

#include "tlrcool/cooling.hpp"

namespace tlrcool {

// One swept parameter. Supported names: delta, delta0, kappa, temperature,
// gamma_b, q_b, epsilon, g0, n_cav.
struct SweepAxis {
  std::string name;
  double min = 0;
  double max = 0;
  int count = 0;
  bool log = false;

  std::vector<double> values() const;
};

struct SweepSpec {
  std::vector<SweepAxis> axes; // 1 or 2
};

struct ModelInputs {
  SystemParams system; // natural units
  DriveInput drive;
};

struct SweepCell {
  double coord0 = 0;
  double coord1 = 0; // unused for 1D sweeps
  CoolingReport report;
  std::string error; // in-cell evaluation error text; empty when fine
};

struct SweepTable {
  SweepSpec spec;
  std::vector<SweepCell> cells; // row-major over axis0 (outer) x axis1
};

// Applies a named scalar to the model; throws ConfigError for unknown names.
void apply_parameter(const std::string& name, double value, ModelInputs& model);

// Evaluates the full pipeline on the grid. Cells are computed concurrently
// (workers threads) but the table layout and every number in it are
// independent of the worker count; per-cell failures are recorded in the
// cell, never dropped and never fatal.
SweepTable run_sweep(const ModelInputs& base, const SweepSpec& spec,
                     const EngineOptions& opts, int workers = 1);

struct OptimizeSpec {
  std::vector<std::string> free;               // 1 or 2 parameter names
  std::vector<std::pair<double, double>> bounds;
  int coarse_count = 33;      // coarse scan points per axis
  double param_tol = 1e-4;    // absolute bracket width to stop at [omega_b]
  bool require_weak_coupling = false;
  bool use_approx_objective = false; // n_bf_approx instead of n_bf_exact
};

struct OptimizeResult {
  std::vector<double> argmin;
  CoolingReport report; // full report at the optimum
  double objective = 0;
  long evaluations = 0;
};

// Minimises n_bf over the free parameters: deterministic coarse scan, then
// golden-section refinement per axis (cyclically for 2D). Unstable points
// and constraint violations are infeasible; ties resolve to the lowest
// parameter value. Throws NoFeasiblePoint if nothing in bounds is feasible.
OptimizeResult optimize(const ModelInputs& base, const OptimizeSpec& spec,
                        const EngineOptions& opts);

}
