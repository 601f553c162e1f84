#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "tlrcool/cooling.hpp"
#include "tlrcool/errors.hpp"

#include "test_helpers.hpp"

using namespace tlrcool;
using namespace tlrtest;
using doctest::Approx;

namespace {

DriveInput default_drive(double delta = 1.0) {
  DriveInput d;
  d.epsilon = 2.5e3;
  d.mode = DetuningMode::given_delta;
  d.detuning = delta;
  return d;
}

} // namespace

TEST_CASE("backaction occupation limit") {
  // (2N+1)(kappa^2 + delta^2 + omega_b^2)/(4 omega_b delta) - 1/2
  CHECK(induced_phonon_number(1.0, 0.1, 1.0, 0.0) == Approx(0.0025).epsilon(1e-14));
  CHECK(induced_phonon_number(std::sqrt(26.0), 5.0, 1.0, 0.0) ==
        Approx(2.0495097567963924).epsilon(1e-13));
  CHECK(induced_phonon_number(1.0, 0.1, 1.0, 0.25) ==
        Approx(1.5 * 2.01 / 4.0 - 0.5).epsilon(1e-13));

  // the quoted optimum really is the minimum over the detuning
  const double opt = optimal_detuning(5.0, 1.0);
  CHECK(opt == Approx(std::sqrt(26.0)).epsilon(1e-15));
  CHECK(induced_phonon_number(opt, 5.0, 1.0, 0.0) <
        induced_phonon_number(opt * 1.01, 5.0, 1.0, 0.0));
  CHECK(induced_phonon_number(opt, 5.0, 1.0, 0.0) <
        induced_phonon_number(opt * 0.99, 5.0, 1.0, 0.0));

  CHECK_THROWS_AS(induced_phonon_number(0.0, 0.1, 1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(induced_phonon_number(-1.0, 0.1, 1.0, 0.0), std::domain_error);
}

TEST_CASE("cooling limits summary") {
  const SystemParams p = resolved_cavity_params();
  const double n_cav = 0.0369937;
  const CoolingLimits lim = cooling_limits(p, n_cav);

  CHECK(lim.resolved_sideband == Approx(n_cav + 0.01 / 4.0).epsilon(1e-13));
  CHECK(lim.doppler == Approx(0.05).epsilon(1e-13));
  CHECK(lim.classical_ratio == Approx(2e4).epsilon(1e-13));
  CHECK(lim.optimal_delta == Approx(std::sqrt(1.01)).epsilon(1e-13));
  CHECK(lim.n_ca_minimum ==
        Approx(induced_phonon_number(lim.optimal_delta, 0.1, 1.0, n_cav))
            .epsilon(1e-13));
}

TEST_CASE("effective temperature") {
  CHECK(effective_temperature(0.16, 1.0) ==
        Approx(0.50479518350490837).epsilon(1e-13));
  CHECK(effective_temperature(0.0, 1.0) == 0.0);

  for (double n : {1e-4, 0.5, 300.0}) {
    const double t = effective_temperature(n, 1.0);
    CHECK(thermal_occupation(1.0, t, Units::natural) == Approx(n).epsilon(1e-12));
  }

  // SI output scales with hbar omega / k_B
  const double t_si = effective_temperature(0.16, kOmegaBSi, Units::si);
  CHECK(t_si == Approx(0.50479518350490837 * si_hbar * kOmegaBSi / si_kb)
                    .epsilon(1e-12));
}

TEST_CASE("phonon number from moments") {
  for (double n : {0.0, 0.16, 5999.5})
    CHECK(phonon_number(n + 0.5, n + 0.5, 1.0, 1.0) == Approx(n).epsilon(1e-12));

  // asymmetric variances average
  CHECK(phonon_number(0.3, 0.9, 1.0, 1.0) == Approx(0.1).epsilon(1e-12));

  // slightly negative from roundoff is clamped, grossly negative throws
  CHECK(phonon_number(0.5 - 1e-12, 0.5 - 1e-12, 1.0, 1.0) >= -1e-9);
  CHECK_THROWS_AS(phonon_number(0.2, 0.2, 1.0, 1.0), InconsistentVariances);
}

TEST_CASE("rate-weighted balance") {
  CHECK(phonon_number_weighted(2.5e-5, 326.8, 0.0555542, 0.0025) ==
        Approx((2.5e-5 * 326.8 + 0.0555542 * 0.0025) / (2.5e-5 + 0.0555542))
            .epsilon(1e-14));
  CHECK(phonon_number_weighted(1e-5, 42.0, 0.0, 0.0) == Approx(42.0).epsilon(1e-14));
}

TEST_CASE("full report at the reference point") {
  SystemParams p; // kappa = 1, T = 6e3
  const CoolingReport r = evaluate_cooling(p, default_drive());

  CHECK(r.status == PointStatus::ok);
  CHECK(r.verdict == Verdict::stable);
  CHECK(r.quad_converged);

  CHECK(r.n_cav == Approx(0.0369937).epsilon(1e-5));
  CHECK(r.n_b == Approx(thermal_occupation(1.0, 6e3, Units::natural)).epsilon(1e-12));
  // 4 g0^2 |a|^2 kappa delta / CF = 4 * 9e-10 * 3.125e6 / 5 at this point
  CHECK(r.gamma_ca_wb == Approx(0.00225).epsilon(1e-12));
  CHECK(r.gamma_b_eff_wb == Approx(r.gamma_ca_wb + p.gamma_b).epsilon(1e-12));

  // internal consistency of the assembled numbers
  CHECK(r.n_bf_approx ==
        Approx(phonon_number_weighted(p.gamma_b, r.n_b, r.gamma_ca_wb, r.n_ca))
            .epsilon(1e-12));
  CHECK(r.n_bf_exact ==
        Approx(phonon_number(r.var_x, r.var_p, 1.0, 1.0)).epsilon(1e-12));
  CHECK(r.n_bf_approx == Approx(66.2307051).epsilon(1e-6));
  CHECK(r.equipartition_ratio == Approx(r.var_p / r.var_x).epsilon(1e-12));
  CHECK(r.t_eff == Approx(effective_temperature(r.n_bf_exact, 1.0)).epsilon(1e-12));
  CHECK(r.t_eff_valid == r.flags.weak_coupling);
  CHECK(r.wp.delta == 1.0);
  CHECK(r.n_ca == Approx(induced_phonon_number(1.0, 1.0, 1.0, r.n_cav)).epsilon(1e-12));
}

TEST_CASE("regime flags at the sideband-resolved point") {
  SystemParams p = resolved_cavity_params();
  p.temperature = quanta_of_kelvin(0.010);
  const CoolingReport r = evaluate_cooling(p, default_drive());

  CHECK(r.flags.stable);
  CHECK(r.flags.weak_coupling);
  CHECK(r.flags.condition_20);  // gamma_ca ~ 0.056 >> 10 gamma_b
  // thermal load still dominates the backaction floor at 10 mK
  CHECK_FALSE(r.flags.condition_22);
  CHECK(r.flags.rwa_ok);        // |eps| = 2.5e3 < omega_a/4
  CHECK(r.flags.linearization_ok);
  // kappa^2 = 0.01 omega_b^2 sits exactly on the strict threshold
  CHECK_FALSE(r.flags.high_quality_cavity);

  SystemParams hq = p;
  hq.kappa = 0.09;
  CHECK(evaluate_cooling(hq, default_drive()).flags.high_quality_cavity);

  DriveInput strong = default_drive();
  strong.epsilon = 6000.0;
  CHECK_FALSE(evaluate_cooling(p, strong).flags.rwa_ok);

  // backaction-dominated regime flips the load balance
  SystemParams cold = resolved_cavity_params();
  cold.temperature = 0.0;
  cold.gamma_b = 1e-9;
  CHECK(evaluate_cooling(cold, default_drive()).flags.condition_22);
}

TEST_CASE("unstable point yields sentinels") {
  SystemParams p;
  const CoolingReport r = evaluate_cooling(p, default_drive(-1.0));

  CHECK(r.status == PointStatus::unstable);
  CHECK(r.verdict == Verdict::unstable);
  CHECK_FALSE(r.flags.stable);
  CHECK(std::isnan(r.var_x));
  CHECK(std::isnan(r.n_bf_exact));
  CHECK(std::isnan(r.t_eff));
  CHECK_FALSE(r.t_eff_valid);
}

TEST_CASE("marginal point yields sentinels") {
  SystemParams p;
  p.g0 = 0.0;
  p.gamma_b = 0.0;
  const CoolingReport r = evaluate_cooling(p, default_drive());
  CHECK(r.status == PointStatus::marginal);
  CHECK(std::isnan(r.var_x));
}

TEST_CASE("natural and si inputs give the same physics") {
  SystemParams si;
  si.units = Units::si;
  si.m = kMassSi;
  si.omega_b = kOmegaBSi;
  si.gamma_b = 2.5e-5 * kOmegaBSi;
  si.omega_a = 2e4 * kOmegaBSi;
  si.kappa = 0.1 * kOmegaBSi;
  si.g0 = 3e-5 * kOmegaBSi * std::sqrt(kMassSi * kOmegaBSi / si_hbar);
  si.temperature = 0.010;

  const CoolingReport from_si = evaluate_cooling(to_natural_units(si), default_drive());
  SystemParams nat = resolved_cavity_params();
  nat.temperature = quanta_of_kelvin(0.010);
  const CoolingReport direct = evaluate_cooling(nat, default_drive());

  CHECK(rel_dev(from_si.n_bf_exact, direct.n_bf_exact) < 1e-9);
  CHECK(rel_dev(from_si.n_bf_approx, direct.n_bf_approx) < 1e-9);
  CHECK(rel_dev(from_si.gamma_ca_wb, direct.gamma_ca_wb) < 1e-9);
  CHECK(rel_dev(from_si.equipartition_ratio, direct.equipartition_ratio) < 1e-9);
  CHECK(from_si.flags.weak_coupling == direct.flags.weak_coupling);
}

TEST_CASE("thermal noise model switch") {
  SystemParams p;
  p.temperature = 1.0; // deep quantum regime: the models genuinely differ

  EngineOptions coth;
  EngineOptions white;
  white.noise = ThermalNoiseModel::white_classical;

  const CoolingReport rc = evaluate_cooling(p, default_drive(), coth);
  const CoolingReport rw = evaluate_cooling(p, default_drive(), white);
  CHECK(rc.var_x > rw.var_x); // zero-point weight is missing from the white model

  // at 6e3 quanta the two agree to ~coth(1/2T) - 1
  SystemParams hot;
  const CoolingReport hc = evaluate_cooling(hot, default_drive(), coth);
  const CoolingReport hw = evaluate_cooling(hot, default_drive(), white);
  CHECK(rel_dev(hc.var_x, hw.var_x) < 1e-4);
}

TEST_CASE("approximate and exact variances in the weak-coupling regime") {
  SystemParams p;
  const WorkingPointResult w = solve_working_point(p, DriveInput{});
  const auto [vx, vp] = variances_approx(w.principal, p, bath_occupations(p));
  CHECK(vx > 0);
  CHECK(vp == Approx(vx).epsilon(1e-12)); // (m omega_b)^2 = 1

  const CoolingReport r = evaluate_cooling(p, default_drive());
  CHECK(r.var_x_approx == Approx(vx).epsilon(1e-12));
  // kappa = omega_b: the Lorentzian formula holds to a fraction of a percent
  CHECK(rel_dev(r.var_x, r.var_x_approx) < 5e-3);
}
