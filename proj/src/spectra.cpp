#include "tlrcool/spectra.hpp"

#include <cmath>
#include <stdexcept>

#include "tlrcool/errors.hpp"

namespace tlrcool {

double coth_stable(double x) {
  // 1 + 2/expm1(2x): exact in both tails, no cancellation near 0,
  // odd in x by construction. expm1 overflow gives the correct +-1.
  return 1.0 + 2.0 / std::expm1(2.0 * x);
}

double cavity_factor(double omega, double kappa, double delta) {
  const double u = kappa * kappa + delta * delta - omega * omega;
  return u * u + 4.0 * kappa * kappa * omega * omega;
}

SpectralIntermediates spectral_intermediates(double omega,
                                             const WorkingPoint& wp,
                                             const SystemParams& params) {
  const double kap = params.kappa;
  const double delta = wp.delta;
  const std::complex<double> kio(kap, omega);
  const std::complex<double> p = kio * kio + delta * delta;

  SpectralIntermediates out;
  const std::complex<double> mech(
      params.omega_b * params.omega_b - omega * omega,
      params.gamma_b * omega);
  out.b_of_omega =
      params.m * mech * p - 2.0 * wp.g_eff * wp.g_eff * delta;
  out.c_of_omega = std::sqrt(2.0 * kap) * params.g0 * wp.a_mean *
                   std::complex<double>(kap, omega + delta);
  out.cavity_factor = std::norm(p);
  return out;
}

double gamma_ca(double omega, const WorkingPoint& wp,
                const SystemParams& params) {
  const double cf = cavity_factor(omega, params.kappa, wp.delta);
  return 4.0 * wp.g_eff * wp.g_eff * params.kappa * wp.delta / (params.m * cf);
}

double gamma_b_eff(double omega, const WorkingPoint& wp,
                   const SystemParams& params) {
  return params.gamma_b + gamma_ca(omega, wp, params);
}

double omega_b_eff_sq(double omega, const WorkingPoint& wp,
                      const SystemParams& params) {
  const double kap = params.kappa;
  const double shift = (kap * kap - omega * omega + wp.delta * wp.delta) *
                       gamma_ca(omega, wp, params) / (2.0 * kap);
  return params.omega_b * params.omega_b - shift;
}

std::complex<double> chi_eff(double omega, const WorkingPoint& wp,
                             const SystemParams& params) {
  const double kap = params.kappa;
  const std::complex<double> kio(kap, omega);
  const std::complex<double> p = kio * kio + wp.delta * wp.delta;
  const std::complex<double> mech(
      params.omega_b * params.omega_b - omega * omega,
      params.gamma_b * omega);
  const std::complex<double> coupling_term =
      std::complex<double>(2.0 * wp.g_eff * wp.g_eff * wp.delta, 0.0);
  const std::complex<double> b = params.m * mech * p - coupling_term;
  const double scale = std::abs(params.m * mech * p) + std::abs(coupling_term);
  if (std::abs(b) <= 1e-14 * scale)
    throw SingularSusceptibility(
        "B(omega) vanishes at omega = " + std::to_string(omega) +
        ": working point is at an instability threshold");
  return p / b;
}

std::complex<double> chi_eff_resonant_form(double omega, const WorkingPoint& wp,
                                           const SystemParams& params) {
  const std::complex<double> den(
      omega_b_eff_sq(omega, wp, params) - omega * omega,
      omega * gamma_b_eff(omega, wp, params));
  return 1.0 / (params.m * den);
}

NoisePair s_th(double omega, const SystemParams& params,
               ThermalNoiseModel model) {
  const double gm = params.gamma_b * params.m;
  const double t = params.mech_temperature();
  NoisePair out;
  if (model == ThermalNoiseModel::white_classical) {
    out.raw = 2.0 * gm * t;
    out.symmetrized = out.raw;
    return out;
  }
  if (t == 0.0) {
    out.raw = omega > 0.0 ? 2.0 * gm * omega : 0.0;
    out.symmetrized = gm * std::abs(omega);
    return out;
  }
  if (omega == 0.0) {
    // omega coth(omega/2T) -> 2T
    out.raw = 2.0 * gm * t;
    out.symmetrized = out.raw;
    return out;
  }
  const double c = coth_stable(omega / (2.0 * t));
  out.raw = gm * omega * (1.0 + c);
  out.symmetrized = gm * omega * c;
  return out;
}

NoisePair s_ca(double omega, const WorkingPoint& wp,
               const SystemParams& params, double n_cav) {
  const double kap = params.kappa;
  const double delta = wp.delta;
  const double pref = 2.0 * wp.g_eff * wp.g_eff * kap /
                      cavity_factor(omega, kap, delta);
  const double even = (2.0 * n_cav + 1.0) *
                      (kap * kap + delta * delta + omega * omega);
  NoisePair out;
  out.raw = pref * (even + 2.0 * omega * delta);
  out.symmetrized = pref * even;
  return out;
}

double s_ca_via_gamma(double omega, const WorkingPoint& wp,
                      const SystemParams& params, double n_cav) {
  const double delta = wp.delta;
  if (delta == 0.0)
    throw std::domain_error(
        "s_ca_via_gamma is 0/0 at delta = 0; use the direct form");
  const double kap = params.kappa;
  const double even = (2.0 * n_cav + 1.0) *
                      (kap * kap + delta * delta + omega * omega);
  return params.m * (even / (2.0 * delta) + omega) *
         gamma_ca(omega, wp, params);
}

double s_x(double omega, const WorkingPoint& wp, const SystemParams& params,
           double n_cav, ThermalNoiseModel model) {
  const double chi2 = std::norm(chi_eff(omega, wp, params));
  return chi2 *
         (s_th(omega, params, model).raw + s_ca(omega, wp, params, n_cav).raw);
}

double s_p(double omega, const WorkingPoint& wp, const SystemParams& params,
           double n_cav, ThermalNoiseModel model) {
  const double mw = params.m * omega;
  return mw * mw * s_x(omega, wp, params, n_cav, model);
}

SpectrumSample sample_spectrum(double omega, const WorkingPoint& wp,
                               const SystemParams& params, double n_cav,
                               ThermalNoiseModel model) {
  SpectrumSample s;
  s.omega = omega;
  const NoisePair th = s_th(omega, params, model);
  const NoisePair ca = s_ca(omega, wp, params, n_cav);
  s.s_th = th.raw;
  s.s_th_sym = th.symmetrized;
  s.s_ca = ca.raw;
  s.s_ca_sym = ca.symmetrized;
  s.chi_eff = chi_eff(omega, wp, params);
  s.s_x = std::norm(s.chi_eff) * (th.raw + ca.raw);
  const double mw = params.m * omega;
  s.s_p = mw * mw * s.s_x;
  s.gamma_ca = gamma_ca(omega, wp, params);
  s.omega_b_eff_sq = omega_b_eff_sq(omega, wp, params);
  s.gamma_b_eff = params.gamma_b + s.gamma_ca;
  return s;
}

}
