#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "geoqm/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Geometric two-level quantum experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run one experiment and write its report");
  std::string experiment;
  std::string config;
  std::string out_dir = "out";
  std::vector<std::string> sets;
  run->add_option("experiment", experiment, "Experiment name")->required();
  run->add_option("--config", config, "Flat key=value configuration file");
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();

  geoqm::cli::Settings overrides;
  // Numeric flags are kept as text and parsed with the config values.
  struct Flag {
    const char* name;
    const char* key;
    const char* help;
  };
  const Flag flags[] = {
      {"--seed", "seed", "Master random seed"},
      {"--trials", "trials", "Number of trials"},
      {"--workers", "workers", "Worker threads"},
      {"--c1sq", "c1sq", "|c1|^2 of the initial state"},
      {"--t-final", "t_final", "Final time"},
      {"--delta-grid", "delta_grid", "Markov grid size m"},
      {"--region-width", "region_width", "Capture half-width in theta"},
      {"--mu", "mu", "Magnetic moment"},
      {"--B", "B", "Field vector bx,by,bz"},
      {"--hbar", "hbar", "Reduced Planck constant"},
  };
  std::vector<std::optional<std::string>> values(std::size(flags));
  for (std::size_t i = 0; i < std::size(flags); ++i) run->add_option(flags[i].name, values[i], flags[i].help);
  run->add_option("--set", sets, "Extra setting key=value (repeatable)");

  auto* list = app.add_subcommand("list", "List experiments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (*list) {
    for (const auto& n : geoqm::cli::experiment_names()) std::cout << n << '\n';
    return 0;
  }

  for (std::size_t i = 0; i < std::size(flags); ++i) {
    if (values[i]) overrides[flags[i].key] = *values[i];
  }
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::cerr << "error: --set expects key=value, got '" << s << "'\n";
      return 2;
    }
    overrides[s.substr(0, eq)] = s.substr(eq + 1);
  }
  return geoqm::cli::run(experiment, config, overrides, out_dir, std::cout, std::cerr);
}
