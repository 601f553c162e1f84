#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tlrcool/cooling.hpp"
#include "tlrcool/params.hpp"
#include "tlrcool/sweep.hpp"

namespace tlrcool {

struct SpectrumGrid {
  double omega_min = -3.0;
  double omega_max = 3.0;
  int count = 601;
};

// Fully resolved run description, engine-ready (natural units). `resolved`
// is the canonical key=value echo embedded in every output so a result file
// alone reproduces the run.
struct RunConfig {
  SystemParams system;           // natural units
  DriveInput drive;
  std::optional<HardwareParams> hardware;
  EngineOptions engine;
  SweepSpec sweep;
  OptimizeSpec optimize;
  SpectrumGrid spectrum;
  Units input_units = Units::natural;
  UnitScales scales;             // meaningful when input_units == si
  int workers = 0;               // 0 = decide at run time
  std::string format = "csv";
  std::string out_path;
  std::vector<std::string> warnings;
  std::vector<std::pair<std::string, std::string>> resolved;
};

// INI-style text: [section] headers, key = value pairs, # or ; comments.
// Unknown sections or keys are hard errors naming the offender. `overrides`
// are "section.key=value" strings applied after the file.
RunConfig parse_config_text(const std::string& text,
                            const std::vector<std::string>& overrides = {});

RunConfig load_config_file(const std::string& path,
                           const std::vector<std::string>& overrides = {});

// Defaults only (equivalent to parsing an empty file).
RunConfig default_config(const std::vector<std::string>& overrides = {});

// Canonical, sorted "key=value" lines of the resolved configuration.
std::string resolved_config_text(const RunConfig& cfg);

// Parses a value in the config grammar: number, number with unit suffix
// (MHz, mK, kg, fF, nH, uW, ...), or number*omega_b / number*g0_unit.
// Exposed for tests.
double parse_quantity(const std::string& text, const std::string& dimension,
                      Units block_units, double omega_b_si, double mass_si);

}
