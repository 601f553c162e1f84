#include "tlrcool/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "tlrcool/constants.hpp"
#include "tlrcool/errors.hpp"
#include "tlrcool/serialize.hpp"

namespace tlrcool {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

struct Item {
  std::string value;
  int line = 0;
};
using SectionMap = std::map<std::string, std::map<std::string, Item>>;

// dimension of every sweepable / optimizable parameter
const std::map<std::string, std::string>& param_dims() {
  static const std::map<std::string, std::string> dims = {
      {"delta", "frequency"},   {"delta0", "frequency"},
      {"kappa", "frequency"},   {"gamma_b", "frequency"},
      {"epsilon", "frequency"}, {"temperature", "temperature"},
      {"g0", "coupling"},       {"q_b", "dimensionless"},
      {"n_cav", "dimensionless"}};
  return dims;
}

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"system",
       {"units", "m", "mass", "omega_b", "gamma_b", "q_b", "omega_a", "kappa",
        "g0", "temperature", "t_cav", "t_mech"}},
      {"drive", {"epsilon", "epsilon_phase", "delta", "delta0"}},
      {"hardware", {"cg0", "d", "ca", "la", "power"}},
      {"bath", {"n_cav", "n_mech"}},
      {"tolerances",
       {"quad_rel_tol", "eval_budget", "stability_margin", "omega_uv",
        "much_greater", "much_less", "hq_cavity", "noise_model"}},
      {"sweep", {"axis1", "axis2"}},
      {"optimize",
       {"free", "coarse", "param_tol", "require_weak_coupling", "objective"}},
      {"spectrum", {"omega_min", "omega_max", "count"}},
      {"output", {"format", "path", "workers"}}};
  return s;
}

bool key_allowed(const std::string& section, const std::string& key) {
  const auto it = schema().find(section);
  if (it == schema().end()) return false;
  if (it->second.count(key)) return true;
  if (section == "optimize") {
    for (const char* tail : {"_min", "_max"}) {
      const std::string t = tail;
      if (key.size() > t.size() &&
          key.compare(key.size() - t.size(), t.size(), t) == 0 &&
          param_dims().count(key.substr(0, key.size() - t.size())))
        return true;
    }
  }
  return false;
}

// comments start at '#' or ';' when at the start of the line or after
// whitespace, so values like file names keep embedded marks
std::string strip_comment(const std::string& line) {
  for (std::size_t i = 0; i < line.size(); ++i) {
    if ((line[i] == '#' || line[i] == ';') &&
        (i == 0 || std::isspace(static_cast<unsigned char>(line[i - 1]))))
      return line.substr(0, i);
  }
  return line;
}

SectionMap parse_ini(const std::string& text) {
  SectionMap out;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(strip_comment(line));
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) +
                          ": malformed section header '" + t + "'");
      section = lower(trim(t.substr(1, t.size() - 2)));
      if (!schema().count(section))
        throw ConfigError("line " + std::to_string(lineno) +
                          ": unknown section [" + section + "]");
      out[section];
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected key = value, got '" + t + "'");
    if (section.empty())
      throw ConfigError("line " + std::to_string(lineno) +
                        ": key outside any [section]");
    const std::string key = lower(trim(t.substr(0, eq)));
    if (!key_allowed(section, key))
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" +
                        key + "' in [" + section + "]");
    out[section][key] = {trim(t.substr(eq + 1)), lineno};
  }
  return out;
}

bool has(const SectionMap& kv, const std::string& s, const std::string& k) {
  const auto it = kv.find(s);
  return it != kv.end() && it->second.count(k);
}

void erase(SectionMap& kv, const std::string& s, const std::string& k) {
  const auto it = kv.find(s);
  if (it != kv.end()) it->second.erase(k);
}

void check_exclusive(const SectionMap& kv) {
  const std::pair<const char*, std::pair<const char*, const char*>> pairs[] = {
      {"drive", {"delta", "delta0"}},
      {"system", {"gamma_b", "q_b"}},
      {"system", {"m", "mass"}}};
  for (const auto& [sec, keys] : pairs)
    if (has(kv, sec, keys.first) && has(kv, sec, keys.second))
      throw ConfigError(std::string("[") + sec + "]: '" + keys.first +
                        "' and '" + keys.second + "' are mutually exclusive");
  if (has(kv, "system", "t_cav") && has(kv, "bath", "n_cav"))
    throw ConfigError("system.t_cav conflicts with bath.n_cav");
  if (has(kv, "system", "t_mech") && has(kv, "bath", "n_mech"))
    throw ConfigError("system.t_mech conflicts with bath.n_mech");
}

void apply_overrides(SectionMap& kv, const std::vector<std::string>& overrides) {
  for (const std::string& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos)
      throw ConfigError("override '" + ov + "' is not section.key=value");
    const std::string lhs = trim(ov.substr(0, eq));
    const std::string value = trim(ov.substr(eq + 1));
    const auto dot = lhs.find('.');
    if (dot == std::string::npos)
      throw ConfigError("override '" + ov + "' is not section.key=value");
    const std::string sec = lower(trim(lhs.substr(0, dot)));
    const std::string key = lower(trim(lhs.substr(dot + 1)));
    if (!schema().count(sec))
      throw ConfigError("override '" + ov + "': unknown section '" + sec + "'");
    if (!key_allowed(sec, key))
      throw ConfigError("override '" + ov + "': unknown key '" + key +
                        "' in [" + sec + "]");
    // switching one of an exclusive pair drops the other
    if (sec == "drive" && key == "delta") erase(kv, "drive", "delta0");
    if (sec == "drive" && key == "delta0") erase(kv, "drive", "delta");
    if (sec == "system" && key == "gamma_b") erase(kv, "system", "q_b");
    if (sec == "system" && key == "q_b") erase(kv, "system", "gamma_b");
    if (sec == "system" && key == "m") erase(kv, "system", "mass");
    if (sec == "system" && key == "mass") erase(kv, "system", "m");
    if (sec == "system" && key == "t_cav") erase(kv, "bath", "n_cav");
    if (sec == "bath" && key == "n_cav") erase(kv, "system", "t_cav");
    if (sec == "system" && key == "t_mech") erase(kv, "bath", "n_mech");
    if (sec == "bath" && key == "n_mech") erase(kv, "system", "t_mech");
    kv[sec][key] = {value, 0};
  }
}

long parse_integer(const std::string& text, const std::string& what, long lo,
                   long hi) {
  const std::string s = trim(text);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || !trim(end).empty() || !std::isfinite(v) ||
      v != std::floor(v))
    throw ConfigError(what + " must be an integer, got '" + text + "'");
  if (v < static_cast<double>(lo) || v > static_cast<double>(hi))
    throw ConfigError(what + " out of range [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]: '" + text + "'");
  return static_cast<long>(v);
}

bool parse_bool(const std::string& text, const std::string& what) {
  const std::string s = lower(trim(text));
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw ConfigError(what + " must be a boolean, got '" + text + "'");
}

} // namespace

double parse_quantity(const std::string& text, const std::string& dimension,
                      Units block_units, double omega_b_si, double mass_si) {
  static const std::map<std::string, std::map<std::string, double>> suffixes = {
      {"frequency", {{"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}}},
      {"temperature", {{"K", 1.0}, {"mK", 1e-3}, {"uK", 1e-6}}},
      {"mass",
       {{"kg", 1.0}, {"g", 1e-3}, {"mg", 1e-6}, {"ug", 1e-9}, {"ng", 1e-12},
        {"pg", 1e-15}, {"fg", 1e-18}}},
      {"length", {{"m", 1.0}, {"mm", 1e-3}, {"um", 1e-6}, {"nm", 1e-9}}},
      {"capacitance", {{"F", 1.0}, {"nF", 1e-9}, {"pF", 1e-12}, {"fF", 1e-15}}},
      {"inductance", {{"H", 1.0}, {"mH", 1e-3}, {"uH", 1e-6}, {"nH", 1e-9}}},
      {"power",
       {{"W", 1.0}, {"mW", 1e-3}, {"uW", 1e-6}, {"nW", 1e-9}, {"pW", 1e-12}}}};

  const std::string s = trim(text);
  if (s.empty()) throw ConfigError("empty value");
  char* end = nullptr;
  const double num = std::strtod(s.c_str(), &end);
  if (end == s.c_str())
    throw ConfigError("'" + s + "' does not start with a number");
  std::string suffix = std::string(end);
  suffix.erase(std::remove_if(suffix.begin(), suffix.end(),
                              [](unsigned char c) { return std::isspace(c); }),
               suffix.end());
  if (suffix.empty()) return num;

  if (suffix == "*omega_b") {
    if (dimension != "frequency")
      throw ConfigError("'" + s + "': *omega_b only applies to frequencies");
    if (!(omega_b_si > 0))
      throw ConfigError("'" + s + "': *omega_b needs omega_b defined first");
    return num * omega_b_si;
  }
  if (suffix == "*g0_unit") {
    if (dimension != "coupling")
      throw ConfigError("'" + s + "': *g0_unit only applies to couplings");
    if (!(omega_b_si > 0) || !(mass_si > 0))
      throw ConfigError("'" + s + "': *g0_unit needs m and omega_b defined first");
    const double hbar = block_units == Units::si ? si_hbar : 1.0;
    return num * omega_b_si * std::sqrt(mass_si * omega_b_si / hbar);
  }

  const auto dit = suffixes.find(dimension);
  if (dit == suffixes.end())
    throw ConfigError("'" + s + "': a " + dimension +
                      " value takes no unit suffix");
  const auto sit = dit->second.find(suffix);
  if (sit == dit->second.end())
    throw ConfigError("'" + s + "': unknown " + dimension + " unit '" + suffix +
                      "'");
  if (block_units != Units::si)
    throw ConfigError("'" + s +
                      "': unit suffixes are only valid with units = si");
  return num * sit->second;
}

namespace {

RunConfig build(const SectionMap& kv) {
  RunConfig cfg;
  auto get = [&](const char* s, const char* k) -> const std::string* {
    const auto sit = kv.find(s);
    if (sit == kv.end()) return nullptr;
    const auto kit = sit->second.find(k);
    return kit == sit->second.end() ? nullptr : &kit->second.value;
  };

  Units units = Units::natural;
  if (const auto* v = get("system", "units")) {
    const std::string u = lower(*v);
    if (u == "natural")
      units = Units::natural;
    else if (u == "si")
      units = Units::si;
    else
      throw ConfigError("system.units must be natural or si, got '" + *v + "'");
  }
  cfg.input_units = units;
  const bool si = units == Units::si;

  // anchors first: every other value may be expressed relative to them
  double m_in = 1.0, wb_in = 1.0;
  {
    const std::string* mv = get("system", "m");
    if (!mv) mv = get("system", "mass");
    const std::string* wv = get("system", "omega_b");
    if (si && (!mv || !wv))
      throw ConfigError("units = si needs explicit m and omega_b anchors");
    if (mv) m_in = parse_quantity(*mv, "mass", units, 0, 0);
    if (wv) wb_in = parse_quantity(*wv, "frequency", units, 0, 0);
    if (!(m_in > 0) || !(wb_in > 0))
      throw ConfigError("m and omega_b must be positive");
  }
  const double hbar_in = si ? si_hbar : 1.0;
  const double kb_in = si ? si_kb : 1.0;
  const double quantum_in = hbar_in * wb_in / kb_in; // K (or quanta) per quantum
  const double g0_unit_in = wb_in * std::sqrt(m_in * wb_in / hbar_in);

  auto quantity = [&](const char* sec, const char* key, const char* dim,
                      double fallback) {
    const auto* v = get(sec, key);
    return v ? parse_quantity(*v, dim, units, wb_in, m_in) : fallback;
  };

  // defaults scale with the anchors so natural and si runs agree
  SystemParams S;
  S.units = units;
  S.m = m_in;
  S.omega_b = wb_in;
  S.gamma_b = quantity("system", "gamma_b", "frequency", 2.5e-5 * wb_in);
  if (const auto* v = get("system", "q_b")) {
    const double q = parse_quantity(*v, "dimensionless", units, wb_in, m_in);
    if (!(q > 0)) throw ConfigError("system.q_b must be positive");
    S.gamma_b = wb_in / q;
  }
  S.omega_a = quantity("system", "omega_a", "frequency", 2.0e4 * wb_in);
  S.kappa = quantity("system", "kappa", "frequency", 1.0 * wb_in);
  S.g0 = quantity("system", "g0", "coupling", 3.0e-5 * g0_unit_in);
  S.temperature =
      quantity("system", "temperature", "temperature", 6.0e3 * quantum_in);
  if (const auto* v = get("system", "t_cav"))
    S.t_cav = parse_quantity(*v, "temperature", units, wb_in, m_in);
  if (const auto* v = get("system", "t_mech"))
    S.t_mech = parse_quantity(*v, "temperature", units, wb_in, m_in);

  if (kv.count("hardware")) {
    if (!si)
      throw ConfigError("[hardware] is described in SI; set units = si and "
                        "give the m / omega_b anchors");
    HardwareParams w;
    auto need = [&](const char* k, const char* dim) {
      const auto* v = get("hardware", k);
      if (!v) throw ConfigError(std::string("[hardware] needs '") + k + "'");
      return parse_quantity(*v, dim, units, wb_in, m_in);
    };
    w.cg0 = need("cg0", "capacitance");
    w.d = need("d", "length");
    w.ca = need("ca", "capacitance");
    w.la = need("la", "inductance");
    if (const auto* v = get("hardware", "power"))
      w.power = parse_quantity(*v, "power", units, wb_in, m_in);
    w.validate();
    cfg.hardware = w;
    if (!get("system", "g0")) S.g0 = derive_coupling(w);
    if (!get("system", "omega_a")) S.omega_a = derive_omega_a(w);
  }

  // drive
  double eps_mag = 2.5e3 * wb_in;
  if (const auto* v = get("drive", "epsilon"))
    eps_mag = parse_quantity(*v, "frequency", units, wb_in, m_in);
  else if (cfg.hardware && cfg.hardware->power > 0)
    eps_mag = drive_from_power(cfg.hardware->power, S.kappa,
                               cfg.hardware->omega_a_prime());
  if (eps_mag < 0) throw ConfigError("drive.epsilon must be non-negative");
  double phase = 0;
  if (const auto* v = get("drive", "epsilon_phase"))
    phase = parse_quantity(*v, "dimensionless", units, wb_in, m_in);
  DriveInput D;
  D.epsilon = std::polar(eps_mag, phase);
  if (const auto* v = get("drive", "delta")) {
    D.mode = DetuningMode::given_delta;
    D.detuning = parse_quantity(*v, "frequency", units, wb_in, m_in);
  } else if (const auto* v2 = get("drive", "delta0")) {
    D.mode = DetuningMode::given_delta0;
    D.detuning = parse_quantity(*v2, "frequency", units, wb_in, m_in);
  } else {
    D.mode = DetuningMode::given_delta;
    D.detuning = 1.0 * wb_in;
  }

  std::optional<double> bath_ncav, bath_nmech;
  if (const auto* v = get("bath", "n_cav")) {
    bath_ncav = parse_quantity(*v, "dimensionless", units, wb_in, m_in);
    if (*bath_ncav < 0) throw ConfigError("bath.n_cav must be non-negative");
  }
  if (const auto* v = get("bath", "n_mech")) {
    bath_nmech = parse_quantity(*v, "dimensionless", units, wb_in, m_in);
    if (*bath_nmech < 0) throw ConfigError("bath.n_mech must be non-negative");
  }

  EngineOptions E;
  if (const auto* v = get("tolerances", "quad_rel_tol")) {
    E.quad.rel_tol = parse_quantity(*v, "dimensionless", units, wb_in, m_in);
    if (!(E.quad.rel_tol > 0))
      throw ConfigError("tolerances.quad_rel_tol must be positive");
  }
  if (const auto* v = get("tolerances", "eval_budget"))
    E.quad.eval_budget =
        parse_integer(*v, "tolerances.eval_budget", 100, 2000000000L);
  if (const auto* v = get("tolerances", "stability_margin")) {
    E.stability_margin =
        parse_quantity(*v, "dimensionless", units, wb_in, m_in);
    if (E.stability_margin < 0)
      throw ConfigError("tolerances.stability_margin must be non-negative");
  }
  double omega_uv_in = 0;
  if (const auto* v = get("tolerances", "omega_uv")) {
    omega_uv_in = parse_quantity(*v, "frequency", units, wb_in, m_in);
    if (omega_uv_in < 0) throw ConfigError("tolerances.omega_uv must be >= 0");
  }
  if (const auto* v = get("tolerances", "much_greater"))
    E.regime.much_greater =
        parse_quantity(*v, "dimensionless", units, wb_in, m_in);
  if (const auto* v = get("tolerances", "much_less"))
    E.regime.much_less = parse_quantity(*v, "dimensionless", units, wb_in, m_in);
  if (const auto* v = get("tolerances", "hq_cavity"))
    E.regime.hq_cavity = parse_quantity(*v, "dimensionless", units, wb_in, m_in);
  if (const auto* v = get("tolerances", "noise_model")) {
    const std::string n = lower(*v);
    if (n == "coth" || n == "full_coth")
      E.noise = ThermalNoiseModel::full_coth;
    else if (n == "white" || n == "white_classical")
      E.noise = ThermalNoiseModel::white_classical;
    else
      throw ConfigError("tolerances.noise_model must be coth or white, got '" +
                        *v + "'");
  }

  auto parse_axis = [&](const std::string& text, const std::string& which) {
    std::istringstream in(text);
    std::vector<std::string> tok;
    std::string t;
    while (in >> t) tok.push_back(t);
    if (tok.size() != 5)
      throw ConfigError(which + " must be 'name min max count lin|log', got '" +
                        text + "'");
    SweepAxis ax;
    ax.name = lower(tok[0]);
    const auto dit = param_dims().find(ax.name);
    if (dit == param_dims().end())
      throw ConfigError(which + ": unknown parameter '" + tok[0] + "'");
    ax.min = parse_quantity(tok[1], dit->second, units, wb_in, m_in);
    ax.max = parse_quantity(tok[2], dit->second, units, wb_in, m_in);
    ax.count = static_cast<int>(parse_integer(tok[3], which + " count", 1, 100000000));
    const std::string sp = lower(tok[4]);
    if (sp == "lin" || sp == "linear")
      ax.log = false;
    else if (sp == "log")
      ax.log = true;
    else
      throw ConfigError(which + ": spacing must be lin or log, got '" + tok[4] +
                        "'");
    return ax;
  };
  if (get("sweep", "axis2") && !get("sweep", "axis1"))
    throw ConfigError("sweep.axis2 given without sweep.axis1");
  if (const auto* v = get("sweep", "axis1"))
    cfg.sweep.axes.push_back(parse_axis(*v, "sweep.axis1"));
  if (const auto* v = get("sweep", "axis2"))
    cfg.sweep.axes.push_back(parse_axis(*v, "sweep.axis2"));

  OptimizeSpec O;
  if (const auto* v = get("optimize", "free")) {
    std::string names = *v;
    std::replace(names.begin(), names.end(), ',', ' ');
    std::istringstream in(names);
    std::string n;
    while (in >> n) O.free.push_back(lower(n));
    if (O.free.empty() || O.free.size() > 2)
      throw ConfigError("optimize.free needs one or two parameter names");
    for (const std::string& name : O.free) {
      const auto dit = param_dims().find(name);
      if (dit == param_dims().end())
        throw ConfigError("optimize.free: unknown parameter '" + name + "'");
      const auto* lo = get("optimize", (name + "_min").c_str());
      const auto* hi = get("optimize", (name + "_max").c_str());
      if (!lo || !hi)
        throw ConfigError("optimize needs " + name + "_min and " + name +
                          "_max");
      O.bounds.emplace_back(
          parse_quantity(*lo, dit->second, units, wb_in, m_in),
          parse_quantity(*hi, dit->second, units, wb_in, m_in));
    }
  } else if (kv.count("optimize") && !kv.at("optimize").empty()) {
    throw ConfigError("[optimize] needs free = <name> [<name>]");
  }
  if (const auto* v = get("optimize", "coarse"))
    O.coarse_count =
        static_cast<int>(parse_integer(*v, "optimize.coarse", 3, 100000));
  if (const auto* v = get("optimize", "param_tol")) {
    O.param_tol = parse_quantity(*v, "dimensionless", units, wb_in, m_in);
    if (!(O.param_tol > 0))
      throw ConfigError("optimize.param_tol must be positive");
  }
  if (const auto* v = get("optimize", "require_weak_coupling"))
    O.require_weak_coupling = parse_bool(*v, "optimize.require_weak_coupling");
  if (const auto* v = get("optimize", "objective")) {
    const std::string o = lower(*v);
    if (o == "exact")
      O.use_approx_objective = false;
    else if (o == "approx")
      O.use_approx_objective = true;
    else
      throw ConfigError("optimize.objective must be exact or approx, got '" +
                        *v + "'");
  }

  SpectrumGrid G;
  G.omega_min = si ? -3.0 * wb_in : -3.0;
  G.omega_max = si ? 3.0 * wb_in : 3.0;
  if (const auto* v = get("spectrum", "omega_min"))
    G.omega_min = parse_quantity(*v, "frequency", units, wb_in, m_in);
  if (const auto* v = get("spectrum", "omega_max"))
    G.omega_max = parse_quantity(*v, "frequency", units, wb_in, m_in);
  if (const auto* v = get("spectrum", "count"))
    G.count = static_cast<int>(parse_integer(*v, "spectrum.count", 1, 100000000));
  if (G.count > 1 && !(G.omega_min < G.omega_max))
    throw ConfigError("spectrum.omega_min must be below spectrum.omega_max");

  if (const auto* v = get("output", "format")) {
    const std::string f = lower(*v);
    if (f != "csv" && f != "json")
      throw ConfigError("output.format must be csv or json, got '" + *v + "'");
    cfg.format = f;
  }
  if (const auto* v = get("output", "path")) cfg.out_path = *v;
  if (const auto* v = get("output", "workers"))
    cfg.workers = static_cast<int>(parse_integer(*v, "output.workers", 0, 4096));

  // everything engine-facing goes to natural units
  cfg.scales = si ? scales_of(S) : UnitScales{};
  cfg.system = si ? to_natural_units(S) : S;
  cfg.system.validate();
  cfg.warnings = cfg.system.warnings();

  const double fs = si ? cfg.scales.frequency : 1.0;
  const double ts = si ? si_hbar * cfg.scales.frequency / si_kb : 1.0;
  const double gs = si ? cfg.scales.frequency *
                             std::sqrt(cfg.scales.mass * cfg.scales.frequency /
                                       si_hbar)
                       : 1.0;
  auto to_nat = [&](double v, const std::string& dim) {
    if (!si) return v;
    if (dim == "frequency") return v / fs;
    if (dim == "temperature") return v / ts;
    if (dim == "coupling") return v / gs;
    return v;
  };

  cfg.drive.epsilon = D.epsilon / fs;
  cfg.drive.mode = D.mode;
  cfg.drive.detuning = D.detuning / fs;

  if (bath_ncav)
    cfg.system.t_cav = temperature_for_occupation(cfg.system.omega_a, *bath_ncav,
                                                  Units::natural);
  if (bath_nmech)
    cfg.system.t_mech = temperature_for_occupation(cfg.system.omega_b,
                                                   *bath_nmech, Units::natural);

  E.quad.omega_cutoff = omega_uv_in / fs;
  cfg.engine = E;

  for (SweepAxis& ax : cfg.sweep.axes) {
    const std::string& dim = param_dims().at(ax.name);
    ax.min = to_nat(ax.min, dim);
    ax.max = to_nat(ax.max, dim);
  }
  for (std::size_t k = 0; k < O.free.size(); ++k) {
    const std::string& dim = param_dims().at(O.free[k]);
    O.bounds[k].first = to_nat(O.bounds[k].first, dim);
    O.bounds[k].second = to_nat(O.bounds[k].second, dim);
  }
  cfg.optimize = O;

  cfg.spectrum.omega_min = G.omega_min / fs;
  cfg.spectrum.omega_max = G.omega_max / fs;
  cfg.spectrum.count = G.count;

  // canonical echo, natural units, sorted keys
  auto add = [&](const std::string& k, const std::string& v) {
    cfg.resolved.emplace_back(k, v);
  };
  add("drive.detuning", format_double(cfg.drive.detuning));
  add("drive.epsilon", format_double(std::abs(cfg.drive.epsilon)));
  add("drive.epsilon_phase", format_double(std::arg(cfg.drive.epsilon)));
  add("drive.mode",
      cfg.drive.mode == DetuningMode::given_delta ? "delta" : "delta0");
  add("engine.eval_budget", std::to_string(cfg.engine.quad.eval_budget));
  add("engine.hq_cavity", format_double(cfg.engine.regime.hq_cavity));
  add("engine.much_greater", format_double(cfg.engine.regime.much_greater));
  add("engine.much_less", format_double(cfg.engine.regime.much_less));
  add("engine.noise",
      cfg.engine.noise == ThermalNoiseModel::full_coth ? "coth" : "white");
  add("engine.omega_uv", format_double(cfg.engine.quad.omega_cutoff));
  add("engine.quad_rel_tol", format_double(cfg.engine.quad.rel_tol));
  add("engine.stability_margin", format_double(cfg.engine.stability_margin));
  if (cfg.hardware) {
    add("hardware.ca", format_double(cfg.hardware->ca));
    add("hardware.cg0", format_double(cfg.hardware->cg0));
    add("hardware.d", format_double(cfg.hardware->d));
    add("hardware.la", format_double(cfg.hardware->la));
    add("hardware.power", format_double(cfg.hardware->power));
  }
  if (!O.free.empty()) {
    std::string names = O.free[0];
    for (std::size_t k = 1; k < O.free.size(); ++k) names += " " + O.free[k];
    add("optimize.free", names);
    for (std::size_t k = 0; k < O.free.size(); ++k) {
      add("optimize." + O.free[k] + "_max", format_double(O.bounds[k].second));
      add("optimize." + O.free[k] + "_min", format_double(O.bounds[k].first));
    }
    add("optimize.coarse", std::to_string(O.coarse_count));
    add("optimize.objective", O.use_approx_objective ? "approx" : "exact");
    add("optimize.param_tol", format_double(O.param_tol));
    add("optimize.require_weak_coupling",
        O.require_weak_coupling ? "true" : "false");
  }
  add("output.format", cfg.format);
  if (!cfg.out_path.empty()) add("output.path", cfg.out_path);
  add("output.workers", std::to_string(cfg.workers));
  if (si) {
    add("scales.frequency", format_double(cfg.scales.frequency));
    add("scales.mass", format_double(cfg.scales.mass));
  }
  add("spectrum.count", std::to_string(cfg.spectrum.count));
  add("spectrum.omega_max", format_double(cfg.spectrum.omega_max));
  add("spectrum.omega_min", format_double(cfg.spectrum.omega_min));
  for (std::size_t k = 0; k < cfg.sweep.axes.size(); ++k) {
    const SweepAxis& ax = cfg.sweep.axes[k];
    add("sweep.axis" + std::to_string(k + 1),
        ax.name + " " + format_double(ax.min) + " " + format_double(ax.max) +
            " " + std::to_string(ax.count) + " " + (ax.log ? "log" : "lin"));
  }
  add("system.g0", format_double(cfg.system.g0));
  add("system.gamma_b", format_double(cfg.system.gamma_b));
  add("system.kappa", format_double(cfg.system.kappa));
  add("system.m", format_double(cfg.system.m));
  add("system.omega_a", format_double(cfg.system.omega_a));
  add("system.omega_b", format_double(cfg.system.omega_b));
  if (cfg.system.t_cav) add("system.t_cav", format_double(*cfg.system.t_cav));
  if (cfg.system.t_mech) add("system.t_mech", format_double(*cfg.system.t_mech));
  add("system.temperature", format_double(cfg.system.temperature));
  add("units.input", si ? "si" : "natural");
  std::sort(cfg.resolved.begin(), cfg.resolved.end());
  return cfg;
}

} // namespace

RunConfig parse_config_text(const std::string& text,
                            const std::vector<std::string>& overrides) {
  SectionMap kv = parse_ini(text);
  check_exclusive(kv);
  apply_overrides(kv, overrides);
  return build(kv);
}

RunConfig load_config_file(const std::string& path,
                           const std::vector<std::string>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), overrides);
}

RunConfig default_config(const std::vector<std::string>& overrides) {
  return parse_config_text("", overrides);
}

std::string resolved_config_text(const RunConfig& cfg) {
  std::string out;
  for (const auto& [k, v] : cfg.resolved) {
    out += k;
    out += " = ";
    out += v;
    out += "\n";
  }
  return out;
}

}
