#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "tlrcool/config.hpp"
#include "tlrcool/cooling.hpp"
#include "tlrcool/lyapunov.hpp"
#include "tlrcool/spectra.hpp"
#include "tlrcool/sweep.hpp"

namespace tlrcool {

// CSV with '#' comment lines (verbatim on round trip), one header row and
// string cells. Numbers are written with format_double so that
// parse -> re-emit is byte-identical.
struct CsvDocument {
  std::vector<std::string> comments; // without the leading "# "
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// %.17g with NaN/inf normalised to "nan"/"inf"/"-inf"; round-trips exactly
// through strtod.
std::string format_double(double v);

std::string to_string(const CsvDocument& doc);
CsvDocument parse_csv(const std::string& text);

// dump(2) + trailing newline; object keys are emitted sorted, so
// parse -> re-emit is byte-identical as well.
std::string json_to_string(const nlohmann::json& j);

std::vector<std::string> report_columns();
std::vector<std::string> report_values(const CoolingReport& r,
                                       const RunConfig& cfg);

CsvDocument report_csv(const CoolingReport& r, const RunConfig& cfg);
nlohmann::json report_json(const CoolingReport& r, const RunConfig& cfg);

CsvDocument spectrum_csv(const std::vector<SpectrumSample>& samples,
                         const RunConfig& cfg);
nlohmann::json spectrum_json(const std::vector<SpectrumSample>& samples,
                             const RunConfig& cfg);

CsvDocument sweep_csv(const SweepTable& table, const RunConfig& cfg);
nlohmann::json sweep_json(const SweepTable& table, const RunConfig& cfg);

nlohmann::json optimize_json(const OptimizeResult& r, const RunConfig& cfg);

nlohmann::json oracle_json(const OracleComparison& c);

// Human-readable single-point summary for the terminal.
std::string report_pretty(const CoolingReport& r, const RunConfig& cfg);

}
