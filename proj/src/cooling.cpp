#include "tlrcool/cooling.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "tlrcool/errors.hpp"
#include "tlrcool/stability.hpp"

namespace tlrcool {

namespace {
constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();
}

const char* to_string(PointStatus s) {
  switch (s) {
    case PointStatus::ok: return "ok";
    case PointStatus::unconverged: return "unconverged";
    case PointStatus::marginal: return "marginal";
    default: return "unstable";
  }
}

double phonon_number(double var_x, double var_p, double m, double omega_b,
                     double tolerance) {
  if (!(m > 0) || !(omega_b > 0))
    throw InvalidParameter("phonon_number needs m, omega_b > 0");
  const double n =
      var_p / (2.0 * m * omega_b) + 0.5 * m * omega_b * var_x - 0.5;
  if (n < -10.0 * std::abs(tolerance))
    throw InconsistentVariances(
        "variances give phonon number " + std::to_string(n) +
        ", negative beyond tolerance " + std::to_string(tolerance));
  return std::max(n, 0.0);
}

double effective_temperature(double n_bf, double omega_b, Units units) {
  if (!(n_bf >= 0)) throw InvalidParameter("occupation must be non-negative");
  if (n_bf == 0) return 0.0;
  return temperature_for_occupation(omega_b, n_bf, units);
}

std::pair<double, double> variances_approx(const WorkingPoint& wp,
                                           const SystemParams& params,
                                           const BathOccupations& bath) {
  const double wb = params.omega_b;
  const double sth = s_th(wb, params).symmetrized;
  const double sca = s_ca(wb, wp, params, bath.n_cav).symmetrized;
  const double geff = std::abs(gamma_b_eff(wb, wp, params));
  const double var_x =
      (sth + sca) / (2.0 * params.m * params.m * wb * wb * geff);
  const double mw = params.m * wb;
  return {var_x, mw * mw * var_x};
}

double induced_phonon_number(double delta, double kappa, double omega_b,
                             double n_cav) {
  if (!(delta > 0))
    throw std::domain_error(
        "induced_phonon_number is defined for delta > 0 (cooling side)");
  const double num = (2.0 * n_cav + 1.0) *
                     (kappa * kappa + delta * delta + omega_b * omega_b);
  return num / (4.0 * omega_b * delta) - 0.5;
}

double optimal_detuning(double kappa, double omega_b) {
  return std::hypot(omega_b, kappa);
}

double phonon_number_weighted(double gamma_b, double n_b, double gamma_ca_wb,
                              double n_ca) {
  return (gamma_b * n_b + gamma_ca_wb * n_ca) / (gamma_b + gamma_ca_wb);
}

CoolingLimits cooling_limits(const SystemParams& params, double n_cav) {
  CoolingLimits lim;
  const double wb = params.omega_b;
  const double k = params.kappa;
  lim.resolved_sideband = n_cav + k * k / (4.0 * wb * wb);
  lim.doppler = k / (2.0 * wb);
  lim.classical_ratio = params.omega_a / wb;
  lim.optimal_delta = optimal_detuning(k, wb);
  lim.n_ca_minimum = induced_phonon_number(lim.optimal_delta, k, wb, n_cav);
  return lim;
}

RegimeFlags classify_regime(const WorkingPoint& wp, const SystemParams& params,
                            const BathOccupations& bath,
                            const RegimeThresholds& th) {
  RegimeFlags f;
  const double wb = params.omega_b;
  const double gca = gamma_ca(wb, wp, params);
  const double geff = params.gamma_b + gca;
  f.weak_coupling = std::abs(geff) < std::min(params.kappa, wb);
  f.high_quality_cavity = params.kappa * params.kappa < th.hq_cavity * wb * wb;
  f.condition_20 = f.weak_coupling && gca > th.much_greater * params.gamma_b;
  f.linearization_ok = std::abs(wp.a_mean) > 10.0;
  // drive amplitude reconstructed from the operating point
  const double eps_abs =
      std::abs(wp.a_mean) * std::hypot(params.kappa, wp.delta);
  f.rwa_ok = eps_abs < params.omega_a / 4.0;
  if (wp.delta > 0 && gca > 0) {
    const double nca =
        induced_phonon_number(wp.delta, params.kappa, wb, bath.n_cav);
    f.condition_22 = params.gamma_b * bath.n_mech < th.much_less * gca * nca;
  }
  return f;
}

CoolingReport evaluate_cooling(const SystemParams& params,
                               const DriveInput& drive,
                               const EngineOptions& opts) {
  params.validate();
  if (params.units != Units::natural)
    throw InvalidParameter(
        "evaluate_cooling expects natural units; convert with "
        "to_natural_units first");

  CoolingReport r;
  const WorkingPointResult sol = solve_working_point(params, drive);
  r.wp = sol.principal;
  r.verdict = is_stable(drift_matrix(r.wp, params), opts.stability_margin);

  const BathOccupations bath =
      opts.bath_override ? *opts.bath_override : bath_occupations(params);
  r.n_b = bath.n_mech;
  r.n_cav = bath.n_cav;

  const double wb = params.omega_b;
  r.gamma_ca_wb = gamma_ca(wb, r.wp, params);
  r.gamma_b_eff_wb = params.gamma_b + r.gamma_ca_wb;
  r.flags = classify_regime(r.wp, params, bath, opts.regime);
  r.flags.stable = r.verdict == Verdict::stable;
  r.limits = cooling_limits(params, bath.n_cav);

  r.n_ca = r.wp.delta > 0
               ? induced_phonon_number(r.wp.delta, params.kappa, wb, bath.n_cav)
               : nan_v;

  const auto [vxa, vpa] = variances_approx(r.wp, params, bath);
  r.var_x_approx = vxa;
  r.var_p_approx = vpa;
  r.n_bf_approx =
      r.wp.delta > 0 && r.gamma_ca_wb > 0
          ? phonon_number_weighted(params.gamma_b, r.n_b, r.gamma_ca_wb, r.n_ca)
          : phonon_number(vxa, vpa, params.m, wb, 1e-9);

  if (r.verdict != Verdict::stable) {
    r.status = r.verdict == Verdict::marginal ? PointStatus::marginal
                                              : PointStatus::unstable;
    r.var_x = r.var_p = nan_v;
    r.var_x_err = r.var_p_err = nan_v;
    r.n_bf_exact = nan_v;
    r.t_eff = nan_v;
    r.equipartition_ratio = nan_v;
    r.t_eff_valid = false;
    return r;
  }

  ThermalNoiseModel model = opts.noise;
  VariancePair vs =
      mechanical_variances(r.wp, params, bath.n_cav, model, opts.quad);
  r.var_x = vs.var_x.value;
  r.var_p = vs.var_p.value;
  r.var_x_err = vs.var_x.abs_error_estimate;
  r.var_p_err = vs.var_p.abs_error_estimate;
  r.quad_evaluations = vs.var_x.n_evaluations + vs.var_p.n_evaluations;
  r.quad_converged = vs.var_x.converged && vs.var_p.converged;

  const double n_tol = r.var_p_err / (2.0 * params.m * wb) +
                       0.5 * params.m * wb * r.var_x_err;
  r.n_bf_exact = phonon_number(r.var_x, r.var_p, params.m, wb,
                               std::max(n_tol, 1e-12));
  r.t_eff = effective_temperature(r.n_bf_exact, wb);
  r.t_eff_valid = r.flags.weak_coupling;
  const double mw = params.m * wb;
  r.equipartition_ratio = r.var_p / (mw * mw * r.var_x);
  r.status = r.quad_converged ? PointStatus::ok : PointStatus::unconverged;
  return r;
}

}
