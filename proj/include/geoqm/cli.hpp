#pragma once

// Experiment runner behind the geoqm command-line tool.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "geoqm/error.hpp"

namespace geoqm::cli {

using Settings = std::map<std::string, std::string>;
using nlohmann::json;

/// Flat `key = value` lines; '#' starts a comment. Hyphens in keys are read
/// as underscores. Throws config on malformed lines or duplicate keys.
Settings parse_config(std::istream& in, const std::string& origin = "config");
Settings load_config(const std::filesystem::path& path);

/// Later entries win.
Settings merge(const Settings& base, const Settings& overrides);

const std::vector<std::string>& experiment_names();

struct CsvFile {
  std::string name;
  std::string content;
};

struct Report {
  std::string experiment;
  std::uint64_t seed = 0;
  json config = json::object();
  json metrics = json::object();
  json thresholds = json::object();
  json passes = json::object();
  /// Extra top-level fields (per-experiment statistics blocks).
  json extra = json::object();
  std::vector<CsvFile> csv;

  void check_max(const std::string& metric, double value, double max);
  void check_abs(const std::string& metric, double value, double target, double tol);
  void check_min(const std::string& metric, double value, double min);
  void note(const std::string& metric, const json& value) { metrics[metric] = value; }
  bool passed() const;
  json to_json() const;
};

/// Throws config for unknown experiments, unknown keys or bad values.
Report run_experiment(const std::string& name, const Settings& settings);

/// Writes <out>/<experiment>.json and the CSV files. Throws io on failure.
void write_report(const Report& report, const std::filesystem::path& out_dir);

std::string summary_line(const Report& report);

/// 2 for usage, configuration and I/O problems; 1 otherwise.
int exit_code_for(const Error& e);

/// Whole pipeline used by the tool: resolve settings, run, write, print a
/// summary. Returns the process exit status.
int run(const std::string& experiment, const std::filesystem::path& config_path, const Settings& overrides,
        const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err);

}  // namespace geoqm::cli
