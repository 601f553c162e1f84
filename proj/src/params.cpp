#include "tlrcool/params.hpp"

#include <cmath>
#include <string>

#include "tlrcool/constants.hpp"
#include "tlrcool/errors.hpp"

namespace tlrcool {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidParameter(msg);
}

}

void SystemParams::validate() const {
  require(std::isfinite(m) && m > 0, "mass must be positive");
  require(std::isfinite(omega_b) && omega_b > 0, "omega_b must be positive");
  require(std::isfinite(omega_a) && omega_a > 0, "omega_a must be positive");
  require(std::isfinite(kappa) && kappa > 0, "kappa must be positive");
  require(std::isfinite(gamma_b) && gamma_b >= 0,
          "gamma_b must be non-negative");
  require(std::isfinite(g0) && g0 >= 0, "g0 must be non-negative");
  require(std::isfinite(temperature) && temperature >= 0,
          "temperature must be non-negative");
  if (t_cav) require(std::isfinite(*t_cav) && *t_cav >= 0,
                     "t_cav must be non-negative");
  if (t_mech) require(std::isfinite(*t_mech) && *t_mech >= 0,
                      "t_mech must be non-negative");
}

std::vector<std::string> SystemParams::warnings() const {
  std::vector<std::string> out;
  if (omega_b / omega_a > 0.01)
    out.push_back("omega_b/omega_a > 0.01: the dispersive single-mode TLR "
                  "description is strained");
  if (gamma_b >= omega_b)
    out.push_back("gamma_b >= omega_b: MR is overdamped, resonance picture "
                  "does not apply");
  return out;
}

double HardwareParams::omega_a_prime() const {
  validate();
  return 1.0 / std::sqrt(la * ca);
}

void HardwareParams::validate() const {
  require(std::isfinite(cg0) && cg0 >= 0, "cg0 must be non-negative");
  require(std::isfinite(d) && d > 0, "gap d must be positive");
  require(std::isfinite(ca) && ca > 0, "ca must be positive");
  require(std::isfinite(la) && la > 0, "la must be positive");
  require(std::isfinite(power) && power >= 0, "power must be non-negative");
}

UnitScales scales_of(const SystemParams& si) {
  return UnitScales{si.m, si.omega_b};
}

SystemParams to_natural_units(const SystemParams& params) {
  params.validate();
  if (params.units == Units::natural) return params;

  const double wb = params.omega_b;
  // zero-point length of the bare MR, the natural displacement unit
  const double x0 = std::sqrt(si_hbar / (params.m * wb));
  const double quantum = si_hbar * wb / si_kb; // one phonon in kelvin

  SystemParams out = params;
  out.units = Units::natural;
  out.m = 1.0;
  out.omega_b = 1.0;
  out.gamma_b = params.gamma_b / wb;
  out.omega_a = params.omega_a / wb;
  out.kappa = params.kappa / wb;
  out.g0 = params.g0 * x0 / wb;
  out.temperature = params.temperature / quantum;
  if (params.t_cav) out.t_cav = *params.t_cav / quantum;
  if (params.t_mech) out.t_mech = *params.t_mech / quantum;
  return out;
}

SystemParams to_si_units(const SystemParams& natural, const UnitScales& scales) {
  natural.validate();
  if (natural.units == Units::si) return natural;
  require(scales.mass > 0 && scales.frequency > 0,
          "unit scales must be positive");

  const double wb = scales.frequency;
  const double m = scales.mass;
  const double x0 = std::sqrt(si_hbar / (m * wb));
  const double quantum = si_hbar * wb / si_kb;

  SystemParams out = natural;
  out.units = Units::si;
  out.m = m * natural.m;
  out.omega_b = wb * natural.omega_b;
  out.gamma_b = natural.gamma_b * wb;
  out.omega_a = natural.omega_a * wb;
  out.kappa = natural.kappa * wb;
  out.g0 = natural.g0 * wb / x0;
  out.temperature = natural.temperature * quantum;
  if (natural.t_cav) out.t_cav = *natural.t_cav * quantum;
  if (natural.t_mech) out.t_mech = *natural.t_mech * quantum;
  return out;
}

double derive_coupling(const HardwareParams& hw) {
  hw.validate();
  // g0 = Cg0 V_rms^2 / (hbar d), V_rms^2 = hbar omega_a' / Ca
  return hw.cg0 * hw.omega_a_prime() / (hw.ca * hw.d);
}

double derive_omega_a(const HardwareParams& hw) {
  hw.validate();
  return hw.omega_a_prime() * (1.0 + hw.cg0 / hw.ca);
}

double drive_from_power(double power, double kappa, double omega_a_prime) {
  if (!(std::isfinite(power) && power >= 0))
    throw InvalidParameter("power must be non-negative");
  if (!(std::isfinite(kappa) && kappa > 0))
    throw InvalidParameter("kappa must be positive");
  if (!(std::isfinite(omega_a_prime) && omega_a_prime > 0))
    throw InvalidParameter("omega_a_prime must be positive");
  return std::sqrt(2.0 * kappa * power / (si_hbar * omega_a_prime));
}

double thermal_occupation(double omega, double temperature, Units units) {
  if (!(std::isfinite(omega) && omega > 0))
    throw InvalidParameter("occupation needs omega > 0");
  if (!(std::isfinite(temperature) && temperature >= 0))
    throw InvalidParameter("temperature must be non-negative");
  if (temperature == 0) return 0.0;
  const double x = units == Units::natural
                       ? omega / temperature
                       : si_hbar * omega / (si_kb * temperature);
  if (x > 700.0) return 0.0; // below double underflow anyway
  return 1.0 / std::expm1(x);
}

double temperature_for_occupation(double omega, double n, Units units) {
  if (!(std::isfinite(omega) && omega > 0))
    throw InvalidParameter("occupation inverse needs omega > 0");
  if (!(std::isfinite(n) && n >= 0))
    throw InvalidParameter("occupation must be non-negative");
  if (n == 0) return 0.0;
  const double x = std::log1p(1.0 / n); // hbar omega / k_B T
  const double t_nat = omega / x;
  return units == Units::natural ? t_nat : si_hbar * t_nat / si_kb;
}

BathOccupations thermal_occupations(double temperature, double omega_a,
                                    double omega_b, Units units) {
  BathOccupations occ;
  occ.n_cav = thermal_occupation(omega_a, temperature, units);
  occ.n_mech = thermal_occupation(omega_b, temperature, units);
  return occ;
}

BathOccupations bath_occupations(const SystemParams& params) {
  BathOccupations occ;
  occ.n_cav =
      thermal_occupation(params.omega_a, params.cavity_temperature(), params.units);
  occ.n_mech =
      thermal_occupation(params.omega_b, params.mech_temperature(), params.units);
  return occ;
}

}
