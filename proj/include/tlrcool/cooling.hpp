#pragma once

#include <optional>
#include <utility>

#include "tlrcool/params.hpp"
#include "tlrcool/quadrature.hpp"
#include "tlrcool/spectra.hpp"
#include "tlrcool/steady_state.hpp"
#include "tlrcool/verdict.hpp"

namespace tlrcool {

// Dimensionless factors standing in for the usual "much greater / much less
// than" qualifiers.
struct RegimeThresholds {
  double much_greater = 10.0; // gamma_ca > 10 gamma_b
  double much_less = 0.1;     // gamma_b n_b < 0.1 gamma_ca n_ca
  double hq_cavity = 0.01;    // kappa^2 < 0.01 omega_b^2
};

struct RegimeFlags {
  bool stable = false;
  bool weak_coupling = false;       // |gamma_b_eff(omega_b)| < min(kappa, omega_b)
  bool high_quality_cavity = false; // kappa^2 << omega_b^2
  bool condition_20 = false;        // gamma_ca >> gamma_b within weak coupling
  bool condition_22 = false;        // gamma_b n_b << gamma_ca n_ca
  bool rwa_ok = false;              // |eps| < omega_a / 4
  bool linearization_ok = false;    // |<a>| > 10
};

struct CoolingLimits {
  double resolved_sideband = 0; // n_cav + kappa^2 / (4 omega_b^2)
  double doppler = 0;           // kappa / (2 omega_b)
  double classical_ratio = 0;   // omega_a / omega_b = T / T_eff, classical
  double optimal_delta = 0;     // sqrt(omega_b^2 + kappa^2)
  double n_ca_minimum = 0;      // n_ca at optimal_delta
};

enum class PointStatus { ok, unconverged, unstable, marginal };

const char* to_string(PointStatus s);

struct EngineOptions {
  IntegrationOptions quad;
  double stability_margin = 1e-12;
  RegimeThresholds regime;
  ThermalNoiseModel noise = ThermalNoiseModel::full_coth;
  std::optional<BathOccupations> bath_override;
};

// Full per-point result; natural units throughout.
struct CoolingReport {
  WorkingPoint wp;
  Verdict verdict = Verdict::unstable;
  PointStatus status = PointStatus::unstable;

  double var_x = 0, var_p = 0;          // quadrature moments
  double var_x_err = 0, var_p_err = 0;
  long quad_evaluations = 0;
  bool quad_converged = false;

  double var_x_approx = 0, var_p_approx = 0; // weak-coupling Lorentzian
  double n_bf_exact = 0;
  double n_bf_approx = 0;
  double t_eff = 0;
  bool t_eff_valid = false; // effective temperature meaningful only in the
                            // weak-coupling (thermal-like) regime
  double n_b = 0;           // MR bath occupation
  double n_cav = 0;         // TLR bath occupation
  double n_ca = 0;          // back-action limit occupation (NaN if delta<=0)
  double gamma_ca_wb = 0;   // gamma_ca at omega_b
  double gamma_b_eff_wb = 0;
  double equipartition_ratio = 0; // var_p / ((m omega_b)^2 var_x)
  CoolingLimits limits;
  RegimeFlags flags;
};

// Final phonon number from the moments: var_p/(2 hbar m omega_b)
// + m omega_b var_x/(2 hbar) - 1/2. Throws InconsistentVariances if the
// result is negative beyond -10 * tolerance.
double phonon_number(double var_x, double var_p, double m, double omega_b,
                     double tolerance = 1e-9);

// T with mean occupation n_bf at omega_b: hbar omega_b / (k_B ln(1/n+1)).
// Natural units return quanta. n = 0 gives 0.
double effective_temperature(double n_bf, double omega_b,
                             Units units = Units::natural);

// Weak-coupling variances: <dx^2> = [S'_th(wb) + S'_ca(wb)] /
// (2 m^2 wb^2 |gamma_b_eff(wb)|), <dp^2> = (m wb)^2 <dx^2>.
std::pair<double, double> variances_approx(const WorkingPoint& wp,
                                           const SystemParams& params,
                                           const BathOccupations& bath);

// Back-action limit occupation
// (2 n_cav + 1)(kappa^2 + delta^2 + omega_b^2)/(4 omega_b delta) - 1/2.
// Throws std::domain_error for delta <= 0 (heating side).
double induced_phonon_number(double delta, double kappa, double omega_b,
                             double n_cav);

double optimal_detuning(double kappa, double omega_b);

// Rate-weighted balance (gamma_b n_b + gamma_ca n_ca)/(gamma_b + gamma_ca).
double phonon_number_weighted(double gamma_b, double n_b, double gamma_ca_wb,
                              double n_ca);

CoolingLimits cooling_limits(const SystemParams& params, double n_cav);

RegimeFlags classify_regime(const WorkingPoint& wp, const SystemParams& params,
                            const BathOccupations& bath,
                            const RegimeThresholds& thresholds = {});

// Full pipeline at one operating point: solve the working point, classify
// stability, integrate the spectra when strictly stable, and assemble every
// headline quantity. Unstable or marginal points come back with sentinel
// (NaN) moments and the corresponding status, never an exception.
CoolingReport evaluate_cooling(const SystemParams& params,
                               const DriveInput& drive,
                               const EngineOptions& opts = {});

}
