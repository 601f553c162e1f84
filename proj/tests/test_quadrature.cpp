#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tlrcool/params.hpp"
#include "tlrcool/quadrature.hpp"
#include "tlrcool/spectra.hpp"

#include "test_helpers.hpp"

using namespace tlrcool;
using namespace tlrtest;
using doctest::Approx;

namespace {

double lorentzian(double x, double c, double w) {
  return (w / M_PI) / ((x - c) * (x - c) + w * w);
}

} // namespace

TEST_CASE("unit lorentzians") {
  IntegrationOptions opts;
  opts.rel_tol = 1e-9;

  auto r = integrate_spectrum([](double x) { return lorentzian(x, 0.3, 1e-3); },
                              {{0.3, 1e-3}}, opts);
  CHECK(r.converged);
  CHECK(r.value == Approx(1.0).epsilon(1e-8));

  // six orders narrower, same answer
  r = integrate_spectrum([](double x) { return lorentzian(x, -2.0, 1e-9); },
                         {{-2.0, 1e-9}}, opts);
  CHECK(r.converged);
  CHECK(r.value == Approx(1.0).epsilon(1e-8));

  // two far-apart resonances
  r = integrate_spectrum(
      [](double x) { return lorentzian(x, -5.0, 1e-4) + lorentzian(x, 5.0, 1e-4); },
      {{-5.0, 1e-4}, {5.0, 1e-4}}, opts);
  CHECK(r.converged);
  CHECK(r.value == Approx(2.0).epsilon(1e-8));
}

TEST_CASE("slow algebraic tail") {
  IntegrationOptions opts;
  opts.rel_tol = 1e-8;
  const auto r = integrate_spectrum([](double x) { return 1.0 / (1.0 + x * x); },
                                    {{0.0, 1.0}}, opts);
  CHECK(r.converged);
  CHECK(r.value == Approx(M_PI).epsilon(1e-7));
}

TEST_CASE("hard domain truncation") {
  IntegrationOptions opts;
  opts.rel_tol = 1e-10;
  opts.omega_cutoff = 10.0;
  const auto r = integrate_spectrum([](double x) { return 1.0 / (1.0 + x * x); },
                                    {{0.0, 1.0}}, opts);
  CHECK(r.value == Approx(2.0 * std::atan(10.0)).epsilon(1e-8));
}

TEST_CASE("honest convergence flag") {
  IntegrationOptions opts;
  opts.rel_tol = 1e-12;
  opts.eval_budget = 120; // far too small
  const auto r = integrate_spectrum(
      [](double x) { return lorentzian(x, -5.0, 1e-7) + lorentzian(x, 5.0, 1e-7); },
      {{-5.0, 1e-7}, {5.0, 1e-7}}, opts);
  CHECK_FALSE(r.converged);
  CHECK(std::isfinite(r.value));
  // the initial panel seeding is not interruptible, but the budget must stop
  // the refinement right after it
  CHECK(r.n_evaluations <= 600);
}

TEST_CASE("spectral peaks are located") {
  SystemParams p; // kappa = 1
  const WorkingPoint wp = working_point_at_delta(p, 2500.0, 1.0);
  const PeakSet ps = locate_peaks(wp, p);
  CHECK_FALSE(ps.used_fallback);
  REQUIRE(ps.peaks.size() >= 2);

  bool mech_found = false, cav_found = false;
  for (const Peak& pk : ps.peaks) {
    CHECK(pk.width > 0);
    const double c = std::abs(pk.center);
    // mechanical peak solves c^2 = omega_eff^2(c)
    if (std::abs(c * c - omega_b_eff_sq(c, wp, p)) < 1e-6) mech_found = true;
    if (std::abs(c - std::sqrt(p.kappa * p.kappa + 1.0)) < 1e-6) cav_found = true;
  }
  CHECK(mech_found);
  CHECK(cav_found);

  const SystemParams narrow = resolved_cavity_params();
  const WorkingPoint wn = working_point_at_delta(narrow, 2500.0, 1.0);
  const PeakSet ns = locate_peaks(wn, narrow);
  bool narrow_cav = false;
  for (const Peak& pk : ns.peaks)
    if (std::abs(std::abs(pk.center) - std::sqrt(1.01)) < 1e-6) narrow_cav = true;
  CHECK(narrow_cav);
}

TEST_CASE("uncoupled variances, white thermal noise") {
  SystemParams p;
  p.g0 = 0.0;
  const WorkingPoint wp = working_point_at_delta(p, 2500.0, 1.0);
  const VariancePair v =
      mechanical_variances(wp, p, 0.0369937, ThermalNoiseModel::white_classical);

  CHECK(v.var_x.converged);
  CHECK(v.var_p.converged);
  // classical equipartition: <x^2> = k_B T / (m omega_b^2), <p^2> = m k_B T
  CHECK(v.var_x.value == Approx(6e3).epsilon(1e-6));
  CHECK(v.var_p.value == Approx(6e3).epsilon(1e-6));
}

TEST_CASE("uncoupled variances, full thermal spectrum") {
  SystemParams p;
  p.g0 = 0.0;
  const WorkingPoint wp = working_point_at_delta(p, 2500.0, 1.0);
  const VariancePair v =
      mechanical_variances(wp, p, 0.0369937, ThermalNoiseModel::full_coth);

  const double expected = thermal_occupation(1.0, 6e3, Units::natural) + 0.5;
  CHECK(v.var_x.value == Approx(expected).epsilon(1e-4));
  CHECK(v.var_p.value == Approx(expected).epsilon(1e-4));
}

TEST_CASE("raw and symmetrized integrands give the same variance") {
  SystemParams p;
  const WorkingPoint wp = working_point_at_delta(p, 2500.0, 1.0);
  const double n_cav = 0.0369937;
  const PeakSet ps = locate_peaks(wp, p);

  IntegrationOptions opts;
  opts.rel_tol = 1e-9;
  opts.omega_cutoff = p.omega_a;

  auto raw = [&](double w) { return s_x(w, wp, p, n_cav) / (2 * M_PI); };
  auto sym = [&](double w) {
    const double weight =
        s_th(w, p).symmetrized + s_ca(w, wp, p, n_cav).symmetrized;
    return std::norm(chi_eff(w, wp, p)) * weight / (2 * M_PI);
  };
  const double vr = integrate_spectrum(raw, ps.peaks, opts).value;
  const double vs = integrate_spectrum(sym, ps.peaks, opts).value;
  CHECK(rel_dev(vr, vs) < 1e-8);
}

TEST_CASE("halving the tolerance stays within the error estimate") {
  SystemParams p;
  const WorkingPoint wp = working_point_at_delta(p, 2500.0, 1.0);

  IntegrationOptions coarse;
  coarse.rel_tol = 1e-6;
  IntegrationOptions fine;
  fine.rel_tol = 5e-7;

  const VariancePair a =
      mechanical_variances(wp, p, 0.0369937, ThermalNoiseModel::full_coth, coarse);
  const VariancePair b =
      mechanical_variances(wp, p, 0.0369937, ThermalNoiseModel::full_coth, fine);

  CHECK(std::abs(a.var_x.value - b.var_x.value) <= a.var_x.abs_error_estimate);
  CHECK(std::abs(a.var_p.value - b.var_p.value) <= a.var_p.abs_error_estimate);
}

TEST_CASE("momentum tail needs the physical cutoff") {
  SystemParams p;
  const WorkingPoint wp = working_point_at_delta(p, 2500.0, 1.0);

  IntegrationOptions narrow_cut;
  narrow_cut.omega_cutoff = 50.0;
  IntegrationOptions wide_cut;
  wide_cut.omega_cutoff = 2e4;

  const double vp_narrow =
      mechanical_variances(wp, p, 0.0369937, ThermalNoiseModel::full_coth, narrow_cut)
          .var_p.value;
  const double vp_wide =
      mechanical_variances(wp, p, 0.0369937, ThermalNoiseModel::full_coth, wide_cut)
          .var_p.value;
  // the zero-point tail keeps adding (logarithmically) out to the cutoff
  CHECK(vp_wide > vp_narrow);
  CHECK(rel_dev(vp_wide, vp_narrow) < 1e-3); // but it is a tiny correction
}

TEST_CASE("exhausted budget is reported, not hidden") {
  SystemParams p;
  const WorkingPoint wp = working_point_at_delta(p, 2500.0, 1.0);
  IntegrationOptions opts;
  opts.eval_budget = 60;
  const VariancePair v =
      mechanical_variances(wp, p, 0.0369937, ThermalNoiseModel::full_coth, opts);
  CHECK_FALSE(v.var_x.converged);
  CHECK(std::isfinite(v.var_x.value));
}
