#include "tlrcool/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "tlrcool/constants.hpp"
#include "tlrcool/version.hpp"

namespace tlrcool {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_string(const CsvDocument& doc) {
  std::string out;
  for (const std::string& c : doc.comments) {
    out += "# ";
    out += c;
    out += "\n";
  }
  auto emit = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ",";
      out += cells[i];
    }
    out += "\n";
  };
  if (!doc.header.empty()) emit(doc.header);
  for (const auto& r : doc.rows) emit(r);
  return out;
}

CsvDocument parse_csv(const std::string& text) {
  CsvDocument doc;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::string c = line.substr(1);
      if (!c.empty() && c.front() == ' ') c.erase(0, 1);
      doc.comments.push_back(c);
      continue;
    }
    std::vector<std::string> cells;
    std::size_t pos = 0;
    for (;;) {
      const auto comma = line.find(',', pos);
      if (comma == std::string::npos) {
        cells.push_back(line.substr(pos));
        break;
      }
      cells.push_back(line.substr(pos, comma - pos));
      pos = comma + 1;
    }
    if (!have_header) {
      doc.header = std::move(cells);
      have_header = true;
    } else {
      doc.rows.push_back(std::move(cells));
    }
  }
  return doc;
}

std::string json_to_string(const nlohmann::json& j) { return j.dump(2) + "\n"; }

namespace {

std::vector<std::string> config_comments(const RunConfig& cfg) {
  std::vector<std::string> out;
  out.push_back(std::string("tlrcool ") + version_string);
  for (const auto& [k, v] : cfg.resolved) out.push_back(k + " = " + v);
  for (const std::string& w : cfg.warnings) out.push_back("warning: " + w);
  return out;
}

nlohmann::json config_json(const RunConfig& cfg) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : cfg.resolved) j[k] = v;
  return j;
}

const char* bit(bool b) { return b ? "1" : "0"; }

// flat field map shared by the JSON writers; types preserved
nlohmann::json report_fields_json(const CoolingReport& r) {
  nlohmann::json j = nlohmann::json::object();
  j["status"] = to_string(r.status);
  j["verdict"] = to_string(r.verdict);
  j["delta"] = r.wp.delta;
  j["delta0"] = r.wp.delta0;
  j["a_re"] = r.wp.a_mean.real();
  j["a_im"] = r.wp.a_mean.imag();
  j["x_mean"] = r.wp.x_mean;
  j["g_eff"] = r.wp.g_eff;
  j["n_bf_exact"] = r.n_bf_exact;
  j["n_bf_approx"] = r.n_bf_approx;
  j["var_x"] = r.var_x;
  j["var_p"] = r.var_p;
  j["var_x_err"] = r.var_x_err;
  j["var_p_err"] = r.var_p_err;
  j["var_x_approx"] = r.var_x_approx;
  j["var_p_approx"] = r.var_p_approx;
  j["t_eff"] = r.t_eff;
  j["t_eff_valid"] = r.t_eff_valid;
  j["n_b"] = r.n_b;
  j["n_cav"] = r.n_cav;
  j["n_ca"] = r.n_ca;
  j["gamma_ca"] = r.gamma_ca_wb;
  j["gamma_b_eff"] = r.gamma_b_eff_wb;
  j["equipartition"] = r.equipartition_ratio;
  j["quad_evaluations"] = r.quad_evaluations;
  j["quad_converged"] = r.quad_converged;
  j["stable"] = r.flags.stable;
  j["weak_coupling"] = r.flags.weak_coupling;
  j["high_quality_cavity"] = r.flags.high_quality_cavity;
  j["condition_20"] = r.flags.condition_20;
  j["condition_22"] = r.flags.condition_22;
  j["rwa_ok"] = r.flags.rwa_ok;
  j["linearization_ok"] = r.flags.linearization_ok;
  j["resolved_sideband_limit"] = r.limits.resolved_sideband;
  j["doppler_limit"] = r.limits.doppler;
  j["classical_ratio"] = r.limits.classical_ratio;
  j["optimal_delta"] = r.limits.optimal_delta;
  j["n_ca_minimum"] = r.limits.n_ca_minimum;
  return j;
}

nlohmann::json si_echo(const CoolingReport& r, const RunConfig& cfg) {
  const double wb = cfg.scales.frequency;
  const double m = cfg.scales.mass;
  const double x0_sq = si_hbar / (m * wb);
  const double p0_sq = si_hbar * m * wb;
  nlohmann::json j = nlohmann::json::object();
  j["delta_rad_s"] = r.wp.delta * wb;
  j["gamma_ca_rad_s"] = r.gamma_ca_wb * wb;
  j["gamma_b_eff_rad_s"] = r.gamma_b_eff_wb * wb;
  j["t_eff_K"] = r.t_eff * si_hbar * wb / si_kb;
  j["var_x_m2"] = r.var_x * x0_sq;
  j["var_p_kg2m2_s2"] = r.var_p * p0_sq;
  j["x_mean_m"] = r.wp.x_mean * std::sqrt(x0_sq);
  return j;
}

} // namespace

std::vector<std::string> report_columns() {
  return {"status",
          "verdict",
          "delta",
          "delta0",
          "a_re",
          "a_im",
          "x_mean",
          "g_eff",
          "n_bf_exact",
          "n_bf_approx",
          "var_x",
          "var_p",
          "var_x_err",
          "var_p_err",
          "var_x_approx",
          "var_p_approx",
          "t_eff",
          "t_eff_valid",
          "n_b",
          "n_cav",
          "n_ca",
          "gamma_ca",
          "gamma_b_eff",
          "equipartition",
          "quad_evaluations",
          "quad_converged",
          "stable",
          "weak_coupling",
          "high_quality_cavity",
          "condition_20",
          "condition_22",
          "rwa_ok",
          "linearization_ok",
          "resolved_sideband_limit",
          "doppler_limit",
          "classical_ratio",
          "optimal_delta",
          "n_ca_minimum"};
}

std::vector<std::string> report_values(const CoolingReport& r,
                                       const RunConfig&) {
  return {to_string(r.status),
          to_string(r.verdict),
          format_double(r.wp.delta),
          format_double(r.wp.delta0),
          format_double(r.wp.a_mean.real()),
          format_double(r.wp.a_mean.imag()),
          format_double(r.wp.x_mean),
          format_double(r.wp.g_eff),
          format_double(r.n_bf_exact),
          format_double(r.n_bf_approx),
          format_double(r.var_x),
          format_double(r.var_p),
          format_double(r.var_x_err),
          format_double(r.var_p_err),
          format_double(r.var_x_approx),
          format_double(r.var_p_approx),
          format_double(r.t_eff),
          bit(r.t_eff_valid),
          format_double(r.n_b),
          format_double(r.n_cav),
          format_double(r.n_ca),
          format_double(r.gamma_ca_wb),
          format_double(r.gamma_b_eff_wb),
          format_double(r.equipartition_ratio),
          std::to_string(r.quad_evaluations),
          bit(r.quad_converged),
          bit(r.flags.stable),
          bit(r.flags.weak_coupling),
          bit(r.flags.high_quality_cavity),
          bit(r.flags.condition_20),
          bit(r.flags.condition_22),
          bit(r.flags.rwa_ok),
          bit(r.flags.linearization_ok),
          format_double(r.limits.resolved_sideband),
          format_double(r.limits.doppler),
          format_double(r.limits.classical_ratio),
          format_double(r.limits.optimal_delta),
          format_double(r.limits.n_ca_minimum)};
}

CsvDocument report_csv(const CoolingReport& r, const RunConfig& cfg) {
  CsvDocument doc;
  doc.comments = config_comments(cfg);
  doc.header = report_columns();
  doc.rows.push_back(report_values(r, cfg));
  return doc;
}

nlohmann::json report_json(const CoolingReport& r, const RunConfig& cfg) {
  nlohmann::json j;
  j["config"] = config_json(cfg);
  j["warnings"] = cfg.warnings;
  j["result"] = report_fields_json(r);
  if (cfg.input_units == Units::si) j["si"] = si_echo(r, cfg);
  return j;
}

CsvDocument spectrum_csv(const std::vector<SpectrumSample>& samples,
                         const RunConfig& cfg) {
  CsvDocument doc;
  doc.comments = config_comments(cfg);
  doc.header = {"omega",  "s_x",    "s_p",
                "s_th",   "s_ca",   "re_chi",
                "im_chi", "gamma_ca", "omega_b_eff_sq"};
  for (const SpectrumSample& s : samples)
    doc.rows.push_back({format_double(s.omega), format_double(s.s_x),
                        format_double(s.s_p), format_double(s.s_th),
                        format_double(s.s_ca),
                        format_double(s.chi_eff.real()),
                        format_double(s.chi_eff.imag()),
                        format_double(s.gamma_ca),
                        format_double(s.omega_b_eff_sq)});
  return doc;
}

nlohmann::json spectrum_json(const std::vector<SpectrumSample>& samples,
                             const RunConfig& cfg) {
  nlohmann::json j;
  j["config"] = config_json(cfg);
  j["warnings"] = cfg.warnings;
  j["columns"] = {"omega",  "s_x",    "s_p",
                  "s_th",   "s_ca",   "re_chi",
                  "im_chi", "gamma_ca", "omega_b_eff_sq"};
  nlohmann::json rows = nlohmann::json::array();
  for (const SpectrumSample& s : samples)
    rows.push_back({s.omega, s.s_x, s.s_p, s.s_th, s.s_ca, s.chi_eff.real(),
                    s.chi_eff.imag(), s.gamma_ca, s.omega_b_eff_sq});
  j["rows"] = rows;
  return j;
}

CsvDocument sweep_csv(const SweepTable& table, const RunConfig& cfg) {
  CsvDocument doc;
  doc.comments = config_comments(cfg);
  doc.header.push_back(table.spec.axes[0].name);
  if (table.spec.axes.size() == 2) doc.header.push_back(table.spec.axes[1].name);
  const auto cols = report_columns();
  doc.header.insert(doc.header.end(), cols.begin(), cols.end());
  doc.header.push_back("error");

  for (const SweepCell& cell : table.cells) {
    std::vector<std::string> row;
    row.push_back(format_double(cell.coord0));
    if (table.spec.axes.size() == 2) row.push_back(format_double(cell.coord1));
    if (cell.error.empty()) {
      const auto vals = report_values(cell.report, cfg);
      row.insert(row.end(), vals.begin(), vals.end());
      row.emplace_back();
    } else {
      row.push_back("error");
      for (std::size_t i = 1; i < cols.size(); ++i) row.push_back("nan");
      std::string msg = cell.error;
      for (char& c : msg)
        if (c == ',' || c == '\n') c = ';';
      row.push_back(msg);
    }
    doc.rows.push_back(std::move(row));
  }
  return doc;
}

nlohmann::json sweep_json(const SweepTable& table, const RunConfig& cfg) {
  nlohmann::json j;
  j["config"] = config_json(cfg);
  j["warnings"] = cfg.warnings;
  nlohmann::json axes = nlohmann::json::array();
  for (const SweepAxis& ax : table.spec.axes)
    axes.push_back({{"name", ax.name},
                    {"min", ax.min},
                    {"max", ax.max},
                    {"count", ax.count},
                    {"spacing", ax.log ? "log" : "lin"}});
  j["axes"] = axes;
  nlohmann::json cells = nlohmann::json::array();
  for (const SweepCell& cell : table.cells) {
    nlohmann::json c;
    c["coords"] = table.spec.axes.size() == 2
                      ? nlohmann::json::array({cell.coord0, cell.coord1})
                      : nlohmann::json::array({cell.coord0});
    if (cell.error.empty())
      c["result"] = report_fields_json(cell.report);
    else
      c["error"] = cell.error;
    cells.push_back(std::move(c));
  }
  j["cells"] = cells;
  return j;
}

nlohmann::json optimize_json(const OptimizeResult& r, const RunConfig& cfg) {
  nlohmann::json j;
  j["config"] = config_json(cfg);
  j["warnings"] = cfg.warnings;
  nlohmann::json argmin = nlohmann::json::object();
  for (std::size_t k = 0; k < cfg.optimize.free.size() && k < r.argmin.size();
       ++k)
    argmin[cfg.optimize.free[k]] = r.argmin[k];
  j["argmin"] = argmin;
  j["objective"] = r.objective;
  j["evaluations"] = r.evaluations;
  j["report"] = report_fields_json(r.report);
  if (cfg.input_units == Units::si) j["si"] = si_echo(r.report, cfg);
  return j;
}

nlohmann::json oracle_json(const OracleComparison& c) {
  auto branch = [](const OracleBranch& b) {
    nlohmann::json j = nlohmann::json::object();
    j["applicable"] = b.applicable;
    if (!b.note.empty()) j["note"] = b.note;
    if (b.applicable) {
      j["lyapunov_var_x"] = b.lyapunov_var_x;
      j["lyapunov_var_p"] = b.lyapunov_var_p;
      j["quad_var_x"] = b.quad_var_x;
      j["quad_var_p"] = b.quad_var_p;
      j["max_rel_dev"] = b.max_rel_dev;
      j["pass"] = b.pass;
    }
    return j;
  };
  nlohmann::json j;
  j["white"] = branch(c.white);
  j["full_coth"] = branch(c.full_coth);
  return j;
}

std::string report_pretty(const CoolingReport& r, const RunConfig& cfg) {
  std::ostringstream out;
  auto g = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::string(buf);
  };
  out << "working point   delta = " << g(r.wp.delta)
      << "  (delta0 = " << g(r.wp.delta0) << ", "
      << (r.wp.mode == DetuningMode::given_delta ? "delta fixed"
                                                 : "delta0 fixed")
      << ")\n";
  out << "                <a> = " << g(r.wp.a_mean.real())
      << (r.wp.a_mean.imag() < 0 ? " - " : " + ")
      << g(std::abs(r.wp.a_mean.imag())) << "i  (|a| = "
      << g(std::abs(r.wp.a_mean)) << "), <x> = " << g(r.wp.x_mean) << "\n";
  out << "stability       " << to_string(r.verdict)
      << " (status: " << to_string(r.status) << ")\n";
  if (r.status == PointStatus::ok || r.status == PointStatus::unconverged) {
    out << "occupation      n_bf = " << g(r.n_bf_exact) << " (exact), "
        << g(r.n_bf_approx) << " (weak coupling)\n";
    out << "                n_b = " << g(r.n_b) << ", n_ca = " << g(r.n_ca)
        << ", n_cav = " << g(r.n_cav) << "\n";
    out << "variances       var_x = " << g(r.var_x) << " +- " << g(r.var_x_err)
        << ", var_p = " << g(r.var_p) << " +- " << g(r.var_p_err)
        << "  (equipartition " << g(r.equipartition_ratio) << ")\n";
    out << "rates           gamma_ca = " << g(r.gamma_ca_wb)
        << ", gamma_b_eff = " << g(r.gamma_b_eff_wb) << "\n";
    out << "temperature     t_eff = " << g(r.t_eff) << " quanta";
    if (cfg.input_units == Units::si)
      out << " = "
          << g(r.t_eff * si_hbar * cfg.scales.frequency / si_kb) << " K";
    if (!r.t_eff_valid) out << "  (outside the weak-coupling regime)";
    out << "\n";
  } else {
    out << "occupation      n_bf_approx = " << g(r.n_bf_approx)
        << " (no stationary moments at this point)\n";
  }
  out << "limits          n_ca >= " << g(r.limits.n_ca_minimum)
      << " at delta* = " << g(r.limits.optimal_delta)
      << ", doppler = " << g(r.limits.doppler) << "\n";
  out << "flags          ";
  const std::pair<const char*, bool> flags[] = {
      {"stable", r.flags.stable},
      {"weak_coupling", r.flags.weak_coupling},
      {"hq_cavity", r.flags.high_quality_cavity},
      {"condition_20", r.flags.condition_20},
      {"condition_22", r.flags.condition_22},
      {"rwa_ok", r.flags.rwa_ok},
      {"linearization_ok", r.flags.linearization_ok}};
  for (const auto& [name, on] : flags)
    if (on) out << " " << name;
  out << "\n";
  if (r.status == PointStatus::ok || r.status == PointStatus::unconverged)
    out << "quadrature      " << r.quad_evaluations << " evaluations, "
        << (r.quad_converged ? "converged" : "NOT converged") << "\n";
  return out.str();
}

}
