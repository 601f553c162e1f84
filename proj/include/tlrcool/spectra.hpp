#pragma once

#include <complex>

#include "tlrcool/params.hpp"
#include "tlrcool/steady_state.hpp"

namespace tlrcool {

// Mechanical bath model used in the displacement spectrum. full_coth is the
// physical quantum spectrum; white_classical replaces the thermal force with
// the flat 2 gamma_b m k_B T weight of the classical Langevin equation, so
// the quadrature pipeline integrates exactly the model the Lyapunov oracle
// solves.
enum class ThermalNoiseModel { full_coth, white_classical };

// One-sided ("raw") and frequency-symmetrized values of a noise spectrum.
struct NoisePair {
  double raw = 0;
  double symmetrized = 0;
};

struct SpectralIntermediates {
  std::complex<double> b_of_omega;  // denominator polynomial B(omega)
  std::complex<double> c_of_omega;  // cavity-to-MR transfer C(omega)
  double cavity_factor = 0;         // |(kappa + i omega)^2 + delta^2|^2
};

// Everything the spectrum table reports at one frequency.
struct SpectrumSample {
  double omega = 0;
  double s_x = 0;
  double s_p = 0;
  double s_th = 0;      // raw thermal force spectrum
  double s_th_sym = 0;
  double s_ca = 0;      // raw back-action force spectrum
  double s_ca_sym = 0;
  std::complex<double> chi_eff;
  double gamma_ca = 0;
  double omega_b_eff_sq = 0;
  double gamma_b_eff = 0;
};

// coth via expm1; accurate from |x| ~ 1e-300 to ~ 700.
double coth_stable(double x);

// |(kappa + i omega)^2 + delta^2|^2 = (kappa^2 + delta^2 - omega^2)^2
//                                     + 4 kappa^2 omega^2.
double cavity_factor(double omega, double kappa, double delta);

SpectralIntermediates spectral_intermediates(double omega,
                                             const WorkingPoint& wp,
                                             const SystemParams& params);

// Back-action damping rate 4 hbar |G|^2 kappa delta / (m |...|^2); carries
// the sign of delta (delta < 0 anti-damps).
double gamma_ca(double omega, const WorkingPoint& wp,
                const SystemParams& params);

double gamma_b_eff(double omega, const WorkingPoint& wp,
                   const SystemParams& params);

// Back-action-shifted squared resonance frequency; can go negative (static
// instability).
double omega_b_eff_sq(double omega, const WorkingPoint& wp,
                      const SystemParams& params);

// Effective MR susceptibility [(kappa+i omega)^2 + delta^2] / B(omega).
// Throws SingularSusceptibility if B vanishes.
std::complex<double> chi_eff(double omega, const WorkingPoint& wp,
                             const SystemParams& params);

// Same quantity through the resonant form
// 1 / (m [omega_b_eff^2 - omega^2 + i omega gamma_b_eff]); kept separate so
// the two can be checked against each other.
std::complex<double> chi_eff_resonant_form(double omega, const WorkingPoint& wp,
                                           const SystemParams& params);

// Thermal Langevin force spectrum, raw and symmetrized. Uses the mechanical
// bath temperature. omega = 0 and T = 0 handled by their analytic limits.
NoisePair s_th(double omega, const SystemParams& params,
               ThermalNoiseModel model = ThermalNoiseModel::full_coth);

// Radiation-pressure (current-noise) force spectrum for cavity occupation
// n_cav; direct form, finite at delta = 0.
NoisePair s_ca(double omega, const WorkingPoint& wp,
               const SystemParams& params, double n_cav);

// Raw back-action spectrum written through gamma_ca; identical to
// s_ca().raw for delta != 0, used for cross-checking.
double s_ca_via_gamma(double omega, const WorkingPoint& wp,
                      const SystemParams& params, double n_cav);

// Displacement noise spectrum |chi_eff|^2 (S_th + S_ca).
double s_x(double omega, const WorkingPoint& wp, const SystemParams& params,
           double n_cav, ThermalNoiseModel model = ThermalNoiseModel::full_coth);

// Momentum spectrum (m omega)^2 S_x.
double s_p(double omega, const WorkingPoint& wp, const SystemParams& params,
           double n_cav, ThermalNoiseModel model = ThermalNoiseModel::full_coth);

SpectrumSample sample_spectrum(double omega, const WorkingPoint& wp,
                               const SystemParams& params, double n_cav,
                               ThermalNoiseModel model = ThermalNoiseModel::full_coth);

}
