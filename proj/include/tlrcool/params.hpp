#pragma once

#include <optional>
#include <string>
#include <vector>

namespace tlrcool {

enum class Units { natural, si };

// Static parameters of the coupled mechanical resonator (MR) + transmission
// line resonator (TLR) system.
//
// Natural units set hbar = k_B = m = omega_b = 1: rates and frequencies are
// in omega_b, temperatures in hbar*omega_b/k_B (phonon quanta), the coupling
// g0 in omega_b*sqrt(m*omega_b/hbar), i.e. omega_b per zero-point length.
// The whole engine works in natural units; SI enters and leaves only through
// to_natural_units / to_si_units.
struct SystemParams {
  double m = 1.0;             // effective MR mass           [kg | 1]
  double omega_b = 1.0;       // MR angular frequency        [rad/s | 1]
  double gamma_b = 2.5e-5;    // MR intrinsic damping rate   [rad/s | omega_b]
  double omega_a = 2.0e4;     // shifted TLR frequency       [rad/s | omega_b]
  double kappa = 1.0;         // TLR amplitude decay rate    [rad/s | omega_b]
  double g0 = 3.0e-5;         // capacitive coupling         [rad/(s m) | natural]
  double temperature = 6.0e3; // shared bath temperature     [K | quanta]
  std::optional<double> t_cav;  // per-bath override, defaults to temperature
  std::optional<double> t_mech;
  Units units = Units::natural;

  double cavity_temperature() const { return t_cav.value_or(temperature); }
  double mech_temperature() const { return t_mech.value_or(temperature); }

  double quality_factor() const { return omega_b / gamma_b; }

  // Throws InvalidParameter on out-of-domain values (m, omega_b, kappa,
  // omega_a must be positive; gamma_b, g0, temperatures non-negative).
  void validate() const;

  // Soft model-validity notes, e.g. omega_b/omega_a > 0.01 strains the
  // dispersive TLR description. Never fatal.
  std::vector<std::string> warnings() const;
};

// Hardware-level TLR description; SI only.
struct HardwareParams {
  double cg0 = 0;   // MR-TLR capacitance at rest gap  [F]
  double d = 0;     // rest gap                        [m]
  double ca = 0;    // TLR capacitance                 [F]
  double la = 0;    // TLR inductance                  [H]
  double power = 0; // feed line drive power           [W]

  double omega_a_prime() const; // bare TLR frequency 1/sqrt(La Ca) [rad/s]
  void validate() const;
};

// Mean thermal occupations of the two baths at their respective frequencies.
struct BathOccupations {
  double n_cav = 0;  // TLR bath (often ~0 for GHz at mK)
  double n_mech = 0; // MR bath
};

// SI anchors of a natural-unit parameter set; enough to invert the scaling.
struct UnitScales {
  double mass = 1.0;      // kg per natural mass unit
  double frequency = 1.0; // rad/s per natural frequency unit
};

UnitScales scales_of(const SystemParams& si);

// Rescales an SI parameter set to natural units (identity if already
// natural). Inverse of to_si_units to ~1e-12 relative.
SystemParams to_natural_units(const SystemParams& params);
SystemParams to_si_units(const SystemParams& natural, const UnitScales& scales);

// g0 = Cg0 * V_rms^2 / (hbar d) with V_rms^2 = hbar * omega_a' / Ca,
// i.e. g0 = Cg0 * omega_a' / (Ca * d).                       [rad/(s m)]
double derive_coupling(const HardwareParams& hw);

// Coupling-shifted TLR frequency omega_a = omega_a' (1 + Cg0/Ca).  [rad/s]
double derive_omega_a(const HardwareParams& hw);

// Steady drive amplitude |eps| = sqrt(2 kappa P / (hbar omega_a')). [rad/s]
double drive_from_power(double power, double kappa, double omega_a_prime);

// Bose occupation at angular frequency omega and temperature T, in either
// unit system. T = 0 returns 0. Uses expm1 so large T stays accurate.
double thermal_occupation(double omega, double temperature, Units units);

// Inverse of thermal_occupation in T: the temperature giving occupation n.
double temperature_for_occupation(double omega, double n, Units units);

BathOccupations thermal_occupations(double temperature, double omega_a,
                                    double omega_b,
                                    Units units = Units::natural);

// Occupations implied by a SystemParams (honouring per-bath overrides).
BathOccupations bath_occupations(const SystemParams& params);

}
