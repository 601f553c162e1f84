#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <functional>
#include <string>

#include "tlrcool/config.hpp"
#include "tlrcool/errors.hpp"

#include "test_helpers.hpp"

using namespace tlrcool;
using namespace tlrtest;
using doctest::Approx;

namespace {

bool error_mentions(const std::function<void()>& f, const std::string& needle) {
  try {
    f();
  } catch (const std::exception& e) {
    return std::string(e.what()).find(needle) != std::string::npos;
  }
  return false;
}

std::string resolved_value(const RunConfig& cfg, const std::string& key) {
  for (const auto& [k, v] : cfg.resolved)
    if (k == key) return v;
  return "<missing>";
}

} // namespace

TEST_CASE("defaults") {
  const RunConfig cfg = default_config();
  CHECK(cfg.system.kappa == 1.0);
  CHECK(cfg.system.gamma_b == 2.5e-5);
  CHECK(cfg.system.omega_a == 2e4);
  CHECK(cfg.system.g0 == 3e-5);
  CHECK(cfg.system.temperature == 6e3);
  CHECK(std::abs(cfg.drive.epsilon) == 2.5e3);
  CHECK(cfg.drive.mode == DetuningMode::given_delta);
  CHECK(cfg.drive.detuning == 1.0);
  CHECK(cfg.input_units == Units::natural);
  CHECK(cfg.format == "csv");
  CHECK(cfg.workers == 0);
  CHECK(cfg.spectrum.omega_min == -3.0);
  CHECK(cfg.spectrum.omega_max == 3.0);
  CHECK(cfg.spectrum.count == 601);

  // canonical echo is sorted and duplicate-free
  REQUIRE(!cfg.resolved.empty());
  for (std::size_t k = 1; k < cfg.resolved.size(); ++k)
    CHECK(cfg.resolved[k - 1].first < cfg.resolved[k].first);
  CHECK(resolved_value(cfg, "system.kappa") == "1");
}

TEST_CASE("parsing, comments and overrides") {
  const RunConfig cfg = parse_config_text(
      "# leading comment\n"
      "[system]\n"
      "kappa = 0.2   # trailing comment\n"
      "temperature = 327.3 ; alt comment style\n"
      "[drive]\n"
      "epsilon = 2.0e3\n");
  CHECK(cfg.system.kappa == 0.2);
  CHECK(cfg.system.temperature == 327.3);
  CHECK(std::abs(cfg.drive.epsilon) == 2000.0);

  const RunConfig with = parse_config_text("[system]\nkappa = 0.2\n",
                                           {"system.kappa=0.5", "drive.delta=1.2"});
  CHECK(with.system.kappa == 0.5);
  CHECK(with.drive.detuning == 1.2);
  CHECK(resolved_value(with, "system.kappa") == "0.5");

  CHECK_THROWS_AS(default_config({"nokey"}), ConfigError);
  CHECK_THROWS_AS(default_config({"system=1"}), ConfigError);
}

TEST_CASE("unknown names are hard errors that name the offender") {
  CHECK(error_mentions([] { parse_config_text("[systm]\nkappa = 1\n"); }, "systm"));
  CHECK(error_mentions([] { parse_config_text("[system]\nkapa = 1\n"); }, "kapa"));
  CHECK(error_mentions([] { default_config({"system.frobnicate=1"}); },
                       "frobnicate"));
}

TEST_CASE("mutually exclusive keys") {
  CHECK_THROWS_AS(parse_config_text("[drive]\ndelta = 1\ndelta0 = 1.1\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_text("[system]\ngamma_b = 1e-5\nq_b = 1e5\n"),
                  ConfigError);
  CHECK_THROWS_AS(
      parse_config_text("[system]\nt_cav = 100\n[bath]\nn_cav = 0.1\n"),
      ConfigError);

  // an override replaces its exclusive partner instead of colliding with it
  const RunConfig cfg =
      parse_config_text("[drive]\ndelta = 1\n", {"drive.delta0=1.05"});
  CHECK(cfg.drive.mode == DetuningMode::given_delta0);
  CHECK(cfg.drive.detuning == 1.05);

  const RunConfig q = parse_config_text("[system]\nq_b = 1e5\n");
  CHECK(q.system.gamma_b == Approx(1e-5).epsilon(1e-14));
}

TEST_CASE("si block grammar") {
  const RunConfig cfg = parse_config_text(
      "[system]\n"
      "units = si\n"
      "m = 1.5e-13 kg\n"
      "omega_b = 4 MHz\n"
      "gamma_b = 100 Hz\n"
      "omega_a = 2e4*omega_b\n"
      "kappa = 0.1*omega_b\n"
      "g0 = 3e-5*g0_unit\n"
      "temperature = 10 mK\n");

  CHECK(cfg.input_units == Units::si);
  CHECK(cfg.scales.mass == 1.5e-13);
  CHECK(cfg.scales.frequency == 4e6);
  CHECK(cfg.system.units == Units::natural);
  CHECK(cfg.system.m == Approx(1.0).epsilon(1e-14));
  CHECK(cfg.system.omega_b == Approx(1.0).epsilon(1e-14));
  CHECK(cfg.system.gamma_b == Approx(2.5e-5).epsilon(1e-13));
  CHECK(cfg.system.omega_a == Approx(2e4).epsilon(1e-13));
  CHECK(cfg.system.kappa == Approx(0.1).epsilon(1e-13));
  CHECK(cfg.system.g0 == Approx(3e-5).epsilon(1e-12));
  CHECK(cfg.system.temperature == Approx(327.300847817).epsilon(1e-10));

  // SI needs both anchors
  CHECK_THROWS_AS(parse_config_text("[system]\nunits = si\nomega_b = 4 MHz\n"),
                  ConfigError);
  // unit suffixes are an SI-block feature
  CHECK_THROWS_AS(parse_config_text("[system]\nkappa = 4 MHz\n"), ConfigError);
}

TEST_CASE("quantity grammar") {
  CHECK(parse_quantity("1.5", "frequency", Units::natural, 0, 0) == 1.5);
  CHECK(parse_quantity("-2.25e-1", "frequency", Units::natural, 0, 0) == -0.225);

  // frequency suffixes follow the angular convention: 4 MHz = 4e6 rad/s
  CHECK(parse_quantity("4 MHz", "frequency", Units::si, 4e6, 1.5e-13) == 4e6);
  CHECK(parse_quantity("100 Hz", "frequency", Units::si, 4e6, 1.5e-13) == 100.0);
  CHECK(parse_quantity("2 GHz", "frequency", Units::si, 4e6, 1.5e-13) == 2e9);
  CHECK(parse_quantity("10 mK", "temperature", Units::si, 4e6, 1.5e-13) == 0.010);
  CHECK(parse_quantity("1 fF", "capacitance", Units::si, 4e6, 1.5e-13) == 1e-15);
  CHECK(parse_quantity("0.25 nH", "inductance", Units::si, 4e6, 1.5e-13) == 2.5e-10);
  CHECK(parse_quantity("3 uW", "power", Units::si, 4e6, 1.5e-13) == 3e-6);
  CHECK(parse_quantity("1 um", "length", Units::si, 4e6, 1.5e-13) == 1e-6);
  CHECK(parse_quantity("1.5e-13 kg", "mass", Units::si, 4e6, 1.5e-13) == 1.5e-13);
  CHECK(parse_quantity("0.15 ng", "mass", Units::si, 4e6, 1.5e-13) ==
        Approx(1.5e-13).epsilon(1e-15));
  CHECK(parse_quantity("150 fg", "mass", Units::si, 4e6, 1.5e-13) ==
        Approx(1.5e-16).epsilon(1e-15));

  // anchored multipliers
  CHECK(parse_quantity("2*omega_b", "frequency", Units::si, 4e6, 1.5e-13) == 8e6);
  CHECK(parse_quantity("3e-5*g0_unit", "coupling", Units::si, 4e6, 1.5e-13) ==
        Approx(9051463213189201.2).epsilon(1e-12));

  CHECK_THROWS_AS(parse_quantity("abc", "frequency", Units::natural, 0, 0),
                  ConfigError);
  CHECK_THROWS_AS(parse_quantity("1 parsec", "length", Units::si, 4e6, 1.5e-13),
                  ConfigError);
  // a suffix of the wrong dimension is rejected
  CHECK_THROWS_AS(parse_quantity("1 mK", "frequency", Units::si, 4e6, 1.5e-13),
                  ConfigError);
}

TEST_CASE("hardware block derives the coupling chain") {
  const std::string base =
      "[system]\n"
      "units = si\n"
      "m = 1.5e-13 kg\n"
      "omega_b = 4 MHz\n"
      "kappa = 0.1*omega_b\n"
      "temperature = 10 mK\n"
      "[hardware]\n"
      "cg0 = 1 fF\n"
      "d = 1 um\n"
      "ca = 1 pF\n"
      "la = 0.25330295910584444 nH\n";

  const RunConfig cfg = parse_config_text(base);
  REQUIRE(cfg.hardware.has_value());
  const double wap = cfg.hardware->omega_a_prime();
  CHECK(wap == Approx(2 * M_PI * 1e10).epsilon(1e-9));
  // omega_a = omega_a' (1 + Cg0/Ca), scaled to natural units
  CHECK(cfg.system.omega_a == Approx(wap * 1.001 / 4e6).epsilon(1e-12));
  // g0 = Cg0 omega_a' / (Ca d), scaled by the natural coupling unit
  const double gs = 4e6 * std::sqrt(1.5e-13 * 4e6 / si_hbar);
  CHECK(cfg.system.g0 == Approx(62831853071795.865 / gs).epsilon(1e-12));

  // a feed power sets the drive amplitude
  const RunConfig driven = parse_config_text(base + "power = 1 pW\n");
  const double eps_si = drive_from_power(1e-12, 0.1 * 4e6, wap);
  CHECK(std::abs(driven.drive.epsilon) == Approx(eps_si / 4e6).epsilon(1e-12));

  // hardware description requires SI anchors
  CHECK_THROWS_AS(parse_config_text("[hardware]\ncg0 = 1e-15\nd = 1e-6\n"
                                    "ca = 1e-12\nla = 2.5e-10\n"),
                  ConfigError);
}

TEST_CASE("bath occupation overrides") {
  const RunConfig zero = parse_config_text("[bath]\nn_cav = 0\n");
  REQUIRE(zero.system.t_cav.has_value());
  CHECK(*zero.system.t_cav == 0.0);

  const RunConfig quarter = parse_config_text("[bath]\nn_cav = 0.25\nn_mech = 10\n");
  CHECK(thermal_occupation(quarter.system.omega_a, *quarter.system.t_cav,
                           Units::natural) == Approx(0.25).epsilon(1e-12));
  CHECK(thermal_occupation(1.0, *quarter.system.t_mech, Units::natural) ==
        Approx(10.0).epsilon(1e-12));
}

TEST_CASE("sweep and optimize blocks") {
  const RunConfig cfg = parse_config_text(
      "[sweep]\n"
      "axis1 = delta 0.5 2.0 31 lin\n"
      "axis2 = kappa 0.1 1 3 log\n"
      "[optimize]\n"
      "free = delta\n"
      "delta_min = 0.5\n"
      "delta_max = 2\n"
      "coarse = 41\n"
      "objective = approx\n"
      "require_weak_coupling = true\n");

  REQUIRE(cfg.sweep.axes.size() == 2);
  CHECK(cfg.sweep.axes[0].name == "delta");
  CHECK(cfg.sweep.axes[0].count == 31);
  CHECK_FALSE(cfg.sweep.axes[0].log);
  CHECK(cfg.sweep.axes[1].log);

  REQUIRE(cfg.optimize.free.size() == 1);
  CHECK(cfg.optimize.bounds[0].first == 0.5);
  CHECK(cfg.optimize.bounds[0].second == 2.0);
  CHECK(cfg.optimize.coarse_count == 41);
  CHECK(cfg.optimize.use_approx_objective);
  CHECK(cfg.optimize.require_weak_coupling);

  CHECK_THROWS_AS(parse_config_text("[sweep]\naxis1 = delta 0.5 2.0 31\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_text("[sweep]\naxis2 = kappa 0.1 1 3 log\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_text("[optimize]\nfree = delta\n"), ConfigError);
  CHECK_THROWS_AS(
      parse_config_text("[optimize]\nfree = detuning\ndetuning_min = 1\n"
                        "detuning_max = 2\n"),
      ConfigError);
}

TEST_CASE("tolerance and output blocks") {
  const RunConfig cfg = parse_config_text(
      "[tolerances]\n"
      "quad_rel_tol = 1e-7\n"
      "eval_budget = 100000\n"
      "noise_model = white\n"
      "[spectrum]\n"
      "omega_min = -2\n"
      "omega_max = 2\n"
      "count = 11\n"
      "[output]\n"
      "format = json\n"
      "workers = 3\n");
  CHECK(cfg.engine.quad.rel_tol == 1e-7);
  CHECK(cfg.engine.quad.eval_budget == 100000);
  CHECK(cfg.engine.noise == ThermalNoiseModel::white_classical);
  CHECK(cfg.spectrum.count == 11);
  CHECK(cfg.format == "json");
  CHECK(cfg.workers == 3);

  CHECK_THROWS_AS(parse_config_text("[tolerances]\neval_budget = 50\n"),
                  ConfigError);
  CHECK(error_mentions(
      [] { parse_config_text("[output]\nformat = xml\n"); }, "csv or json"));
  CHECK_THROWS_AS(parse_config_text("[output]\nworkers = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[tolerances]\nnoise_model = pink\n"),
                  ConfigError);
}

TEST_CASE("resolved echo is deterministic and override-aware") {
  const std::string text = "[system]\nkappa = 0.2\n[drive]\ndelta0 = 1.05\n";
  const RunConfig a = parse_config_text(text);
  const RunConfig b = parse_config_text(text);
  CHECK(resolved_config_text(a) == resolved_config_text(b));
  CHECK(resolved_value(a, "drive.mode") == "delta0");

  const RunConfig c = parse_config_text(text, {"system.kappa=0.3"});
  CHECK(resolved_config_text(a) != resolved_config_text(c));
  CHECK(resolved_value(c, "system.kappa") == "0.29999999999999999");
}

TEST_CASE("config files load like inline text") {
  const std::string path = "/tmp/tlrcool_cfg_test.ini";
  {
    std::ofstream out(path);
    out << "[system]\nkappa = 0.2\n";
  }
  const RunConfig file = load_config_file(path);
  const RunConfig text = parse_config_text("[system]\nkappa = 0.2\n");
  CHECK(resolved_config_text(file) == resolved_config_text(text));
  std::remove(path.c_str());

  CHECK_THROWS_AS(load_config_file("/nonexistent/tlrcool.ini"), ConfigError);
}
