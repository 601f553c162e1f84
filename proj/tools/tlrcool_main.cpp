#include <cmath>
#include <complex>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tlrcool/config.hpp"
#include "tlrcool/cooling.hpp"
#include "tlrcool/errors.hpp"
#include "tlrcool/lyapunov.hpp"
#include "tlrcool/serialize.hpp"
#include "tlrcool/spectra.hpp"
#include "tlrcool/steady_state.hpp"
#include "tlrcool/sweep.hpp"
#include "tlrcool/version.hpp"

namespace {

using namespace tlrcool;

// 0 success, 1 usage/config, 2 no usable stationary point, 3 unconverged,
// 4 validation failure

int status_exit(PointStatus s) {
  switch (s) {
    case PointStatus::ok: return 0;
    case PointStatus::unconverged: return 3;
    default: return 2;
  }
}

bool write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return true;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    std::cerr << "error: cannot open '" << path << "' for writing\n";
    return false;
  }
  f << text;
  return f.good();
}

std::vector<std::string> echo_comments(const RunConfig& cfg) {
  std::vector<std::string> out;
  out.push_back(std::string("tlrcool ") + version_string);
  for (const auto& [k, v] : cfg.resolved) out.push_back(k + " = " + v);
  return out;
}

void print_warnings(const RunConfig& cfg) {
  for (const std::string& w : cfg.warnings)
    std::cerr << "warning: " << w << "\n";
}

int cmd_cool(const RunConfig& cfg) {
  const CoolingReport r = evaluate_cooling(cfg.system, cfg.drive, cfg.engine);
  std::cout << report_pretty(r, cfg);
  if (!cfg.out_path.empty()) {
    const std::string text = cfg.format == "json"
                                 ? json_to_string(report_json(r, cfg))
                                 : to_string(report_csv(r, cfg));
    if (!write_text(cfg.out_path, text)) return 1;
  }
  return status_exit(r.status);
}

int cmd_steady(const RunConfig& cfg) {
  const WorkingPointResult ws = solve_working_point(cfg.system, cfg.drive);
  std::cout << "roots (" << ws.roots.size() << "):\n";
  for (const SteadyStateRoot& root : ws.roots) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "  delta = %-12.6g |a| = %-12.6g verdict = %-8s%s\n",
                  root.point.delta, std::abs(root.point.a_mean),
                  to_string(root.verdict), root.principal ? "  principal" : "");
    std::cout << buf;
  }
  std::cout << "multistable: " << (ws.multistable ? "yes" : "no") << "\n";

  bool principal_stable = false;
  for (const SteadyStateRoot& root : ws.roots)
    if (root.principal) principal_stable = root.verdict == Verdict::stable;

  if (!cfg.out_path.empty()) {
    CsvDocument doc;
    doc.comments = echo_comments(cfg);
    doc.header = {"delta", "delta0", "a_re",    "a_im",
                  "x_mean", "g_eff",  "verdict", "principal"};
    for (const SteadyStateRoot& root : ws.roots)
      doc.rows.push_back({format_double(root.point.delta),
                          format_double(root.point.delta0),
                          format_double(root.point.a_mean.real()),
                          format_double(root.point.a_mean.imag()),
                          format_double(root.point.x_mean),
                          format_double(root.point.g_eff),
                          to_string(root.verdict),
                          root.principal ? "1" : "0"});
    std::string text;
    if (cfg.format == "json") {
      nlohmann::json j;
      j["config"] = nlohmann::json::object();
      for (const auto& [k, v] : cfg.resolved) j["config"][k] = v;
      j["multistable"] = ws.multistable;
      nlohmann::json roots = nlohmann::json::array();
      for (const SteadyStateRoot& root : ws.roots)
        roots.push_back({{"delta", root.point.delta},
                         {"delta0", root.point.delta0},
                         {"a_re", root.point.a_mean.real()},
                         {"a_im", root.point.a_mean.imag()},
                         {"x_mean", root.point.x_mean},
                         {"g_eff", root.point.g_eff},
                         {"verdict", to_string(root.verdict)},
                         {"principal", root.principal}});
      j["roots"] = roots;
      text = json_to_string(j);
    } else {
      text = to_string(doc);
    }
    if (!write_text(cfg.out_path, text)) return 1;
  }
  return principal_stable ? 0 : 2;
}

int cmd_spectrum(const RunConfig& cfg) {
  const WorkingPointResult ws = solve_working_point(cfg.system, cfg.drive);
  const WorkingPoint& wp = ws.principal;
  const BathOccupations bath = cfg.engine.bath_override
                                   ? *cfg.engine.bath_override
                                   : bath_occupations(cfg.system);
  const DriftMatrix dm = drift_matrix(wp, cfg.system);
  const bool stable =
      is_stable(dm, cfg.engine.stability_margin) == Verdict::stable;

  std::vector<SpectrumSample> samples;
  samples.reserve(static_cast<std::size_t>(cfg.spectrum.count));
  for (int i = 0; i < cfg.spectrum.count; ++i) {
    const double w =
        cfg.spectrum.count == 1
            ? cfg.spectrum.omega_min
            : cfg.spectrum.omega_min +
                  (cfg.spectrum.omega_max - cfg.spectrum.omega_min) * i /
                      (cfg.spectrum.count - 1);
    samples.push_back(
        sample_spectrum(w, wp, cfg.system, bath.n_cav, cfg.engine.noise));
  }
  const std::string text = cfg.format == "json"
                               ? json_to_string(spectrum_json(samples, cfg))
                               : to_string(spectrum_csv(samples, cfg));
  if (!write_text(cfg.out_path, text)) return 1;
  if (!stable) {
    std::cerr << "warning: working point is not strictly stable; the "
                 "stationary spectrum does not exist, table is formal\n";
    return 2;
  }
  return 0;
}

int cmd_sweep(const RunConfig& cfg, int workers) {
  if (cfg.sweep.axes.empty()) {
    std::cerr << "error: sweep needs [sweep] axis1 (and optionally axis2)\n";
    return 1;
  }
  const ModelInputs base{cfg.system, cfg.drive};
  const SweepTable table = run_sweep(base, cfg.sweep, cfg.engine, workers);
  const std::string text = cfg.format == "json"
                               ? json_to_string(sweep_json(table, cfg))
                               : to_string(sweep_csv(table, cfg));
  return write_text(cfg.out_path, text) ? 0 : 1;
}

int cmd_optimize(const RunConfig& cfg) {
  if (cfg.optimize.free.empty()) {
    std::cerr << "error: optimize needs [optimize] free = <name> [<name>]\n";
    return 1;
  }
  const ModelInputs base{cfg.system, cfg.drive};
  OptimizeResult res;
  try {
    res = optimize(base, cfg.optimize, cfg.engine);
  } catch (const NoFeasiblePoint& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  for (std::size_t k = 0; k < cfg.optimize.free.size(); ++k)
    std::cout << cfg.optimize.free[k] << "* = " << format_double(res.argmin[k])
              << "\n";
  std::cout << "n_bf = " << format_double(res.objective) << "  ("
            << res.evaluations << " evaluations)\n";
  if (!cfg.out_path.empty()) {
    std::string text;
    if (cfg.format == "json") {
      text = json_to_string(optimize_json(res, cfg));
    } else {
      CsvDocument doc = report_csv(res.report, cfg);
      for (std::size_t k = 0; k < cfg.optimize.free.size(); ++k)
        doc.comments.push_back("optimize.argmin." + cfg.optimize.free[k] +
                               " = " + format_double(res.argmin[k]));
      doc.comments.push_back("optimize.objective = " +
                             format_double(res.objective));
      text = to_string(doc);
    }
    if (!write_text(cfg.out_path, text)) return 1;
  }
  return status_exit(res.report.status);
}

int cmd_limits(const RunConfig& cfg) {
  const BathOccupations bath = cfg.engine.bath_override
                                   ? *cfg.engine.bath_override
                                   : bath_occupations(cfg.system);
  const CoolingLimits lim = cooling_limits(cfg.system, bath.n_cav);
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "bath occupations   n_b = %.10g, n_cav = %.10g\n"
                "resolved sideband  n_bf >= %.10g\n"
                "doppler            kappa/(2 omega_b) = %.10g\n"
                "optimal detuning   delta* = %.10g\n"
                "n_ca at delta*     %.10g\n"
                "classical ratio    T/T_eff -> omega_a/omega_b = %.10g\n",
                bath.n_mech, bath.n_cav, lim.resolved_sideband, lim.doppler,
                lim.optimal_delta, lim.n_ca_minimum, lim.classical_ratio);
  std::cout << buf;
  if (!cfg.out_path.empty()) {
    nlohmann::json j;
    j["n_b"] = bath.n_mech;
    j["n_cav"] = bath.n_cav;
    j["resolved_sideband"] = lim.resolved_sideband;
    j["doppler"] = lim.doppler;
    j["optimal_delta"] = lim.optimal_delta;
    j["n_ca_minimum"] = lim.n_ca_minimum;
    j["classical_ratio"] = lim.classical_ratio;
    if (!write_text(cfg.out_path, json_to_string(j))) return 1;
  }
  return 0;
}

int cmd_validate(const RunConfig& cfg) {
  int failures = 0;
  auto check = [&](const std::string& name, bool ok,
                   const std::string& detail = "") {
    std::cout << (ok ? "[ok]   " : "[FAIL] ") << name;
    if (!detail.empty()) std::cout << "  (" << detail << ")";
    std::cout << "\n";
    if (!ok) ++failures;
  };
  auto skip = [&](const std::string& name, const std::string& why) {
    std::cout << "[skip] " << name << "  (" << why << ")\n";
  };

  try {
    cfg.system.validate();
    check("parameter domain", true);
  } catch (const std::exception& e) {
    check("parameter domain", false, e.what());
    return 4;
  }
  print_warnings(cfg);

  const WorkingPointResult ws = solve_working_point(cfg.system, cfg.drive);
  check("stationary roots",
        ws.roots.size() == 1 || ws.roots.size() == 3,
        std::to_string(ws.roots.size()) + " real roots");
  if (ws.multistable) std::cout << "note: multistable operating region\n";

  bool agree = true;
  std::string why;
  for (const SteadyStateRoot& root : ws.roots) {
    try {
      const DriftMatrix dm = drift_matrix(root.point, cfg.system);
      (void)is_stable(dm, cfg.engine.stability_margin);
    } catch (const MethodDisagreement& e) {
      agree = false;
      why = e.what();
    }
  }
  check("eigenvalue and Routh-Hurwitz verdicts agree", agree, why);

  const WorkingPoint& wp = ws.principal;
  const double test_omegas[] = {0.37 * cfg.system.omega_b,
                                1.03 * cfg.system.omega_b,
                                2.41 * cfg.system.omega_b};
  {
    double worst = 0;
    for (double w : test_omegas) {
      const std::complex<double> a = chi_eff(w, wp, cfg.system);
      const std::complex<double> b = chi_eff_resonant_form(w, wp, cfg.system);
      worst = std::max(worst, std::abs(a - b) / std::abs(a));
    }
    check("susceptibility forms agree", worst < 1e-6,
          "max rel dev " + format_double(worst));
  }
  if (std::abs(wp.delta) > 1e-9 * cfg.system.omega_b) {
    const BathOccupations bath = cfg.engine.bath_override
                                     ? *cfg.engine.bath_override
                                     : bath_occupations(cfg.system);
    double worst = 0;
    for (double w : test_omegas) {
      const double a = s_ca(w, wp, cfg.system, bath.n_cav).raw;
      const double b = s_ca_via_gamma(w, wp, cfg.system, bath.n_cav);
      worst = std::max(worst, std::abs(a - b) / std::max(std::abs(a), 1e-300));
    }
    check("back-action spectrum forms agree", worst < 1e-8,
          "max rel dev " + format_double(worst));
  } else {
    skip("back-action spectrum forms agree", "delta = 0");
  }

  const DriftMatrix dm = drift_matrix(wp, cfg.system);
  if (verdict_from_eigenvalues(dm) == Verdict::stable) {
    const BathOccupations bath = cfg.engine.bath_override
                                     ? *cfg.engine.bath_override
                                     : bath_occupations(cfg.system);
    const OracleComparison oc =
        compare_with_quadrature(wp, cfg.system, bath, cfg.engine.quad);
    check("quadrature matches the Lyapunov covariance", oc.white.pass,
          "max rel dev " + format_double(oc.white.max_rel_dev));
    if (oc.full_coth.applicable)
      check("coth spectrum consistent with the classical oracle",
            oc.full_coth.pass,
            "max rel dev " + format_double(oc.full_coth.max_rel_dev));
    else
      skip("coth spectrum consistent with the classical oracle",
           oc.full_coth.note);
    const Eigen::Matrix4d v =
        lyapunov_covariance(dm, diffusion_matrix(cfg.system, bath));
    check("covariance satisfies the uncertainty bound",
          satisfies_heisenberg(v));

    const CoolingReport r = evaluate_cooling(cfg.system, cfg.drive, cfg.engine);
    if (r.flags.weak_coupling && r.status == PointStatus::ok)
      check("equipartition in the weak-coupling regime",
            r.equipartition_ratio > 0.9 && r.equipartition_ratio < 1.1,
            "ratio " + format_double(r.equipartition_ratio));
    else
      skip("equipartition in the weak-coupling regime",
           "outside the weak-coupling regime");
  } else {
    skip("quadrature matches the Lyapunov covariance",
         "working point not strictly stable");
  }

  std::cout << (failures ? "validation FAILED\n" : "all checks passed\n");
  return failures ? 4 : 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"steady state, noise spectra and cooling performance of a "
               "capacitively coupled TLR-MR system"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("tlrcool ") + version_string);

  std::string config_path, format, out_path;
  std::vector<std::string> sets;
  int workers = -1;
  double tol = 0;
  app.add_option("-c,--config", config_path, "INI configuration file");
  app.add_option("--set", sets,
                 "override a config entry, section.key=value (repeatable)");
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("-o,--out", out_path, "output file ('-' for stdout)");
  app.add_option("--workers", workers, "sweep worker threads (0 = all cores)");
  app.add_option("--tol", tol, "quadrature relative tolerance");

  double delta = std::nan(""), delta0 = std::nan("");
  auto add_point_opts = [&](CLI::App* sub) {
    sub->add_option("--delta", delta,
                    "effective detuning [omega_b], overrides the config");
    sub->add_option("--delta0", delta0, "bare detuning [omega_b]");
  };

  CLI::App* c_steady =
      app.add_subcommand("steady", "classical working point and its roots");
  CLI::App* c_spectrum =
      app.add_subcommand("spectrum", "displacement/momentum noise spectra");
  CLI::App* c_cool =
      app.add_subcommand("cool", "full cooling report at one operating point");
  CLI::App* c_sweep = app.add_subcommand("sweep", "grid sweep over 1-2 parameters");
  CLI::App* c_optimize =
      app.add_subcommand("optimize", "minimise n_bf over 1-2 parameters");
  CLI::App* c_limits =
      app.add_subcommand("limits", "cooling limits for the configured system");
  CLI::App* c_validate =
      app.add_subcommand("validate", "internal consistency checks");
  add_point_opts(c_steady);
  add_point_opts(c_spectrum);
  add_point_opts(c_cool);
  add_point_opts(c_validate);

  CLI11_PARSE(app, argc, argv);

  RunConfig cfg;
  try {
    cfg = config_path.empty() ? default_config(sets)
                              : load_config_file(config_path, sets);
    if (!format.empty()) cfg.format = format;
    if (!out_path.empty()) cfg.out_path = out_path;
    if (workers >= 0) cfg.workers = workers;
    if (tol > 0) cfg.engine.quad.rel_tol = tol;
    if (!std::isnan(delta) && !std::isnan(delta0))
      throw ConfigError("--delta and --delta0 are mutually exclusive");
    if (!std::isnan(delta)) {
      cfg.drive.mode = DetuningMode::given_delta;
      cfg.drive.detuning = delta;
    } else if (!std::isnan(delta0)) {
      cfg.drive.mode = DetuningMode::given_delta0;
      cfg.drive.detuning = delta0;
    }
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }

  int eff_workers = cfg.workers;
  if (eff_workers == 0) {
    if (const char* env = std::getenv("TLRCOOL_WORKERS")) {
      const int w = std::atoi(env);
      if (w > 0) eff_workers = w;
    }
  }

  try {
    if (app.got_subcommand(c_cool)) {
      print_warnings(cfg);
      return cmd_cool(cfg);
    }
    if (app.got_subcommand(c_steady)) {
      print_warnings(cfg);
      return cmd_steady(cfg);
    }
    if (app.got_subcommand(c_spectrum)) {
      print_warnings(cfg);
      return cmd_spectrum(cfg);
    }
    if (app.got_subcommand(c_sweep)) {
      print_warnings(cfg);
      return cmd_sweep(cfg, eff_workers);
    }
    if (app.got_subcommand(c_optimize)) {
      print_warnings(cfg);
      return cmd_optimize(cfg);
    }
    if (app.got_subcommand(c_limits)) return cmd_limits(cfg);
    if (app.got_subcommand(c_validate)) return cmd_validate(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const NoStationaryState& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
