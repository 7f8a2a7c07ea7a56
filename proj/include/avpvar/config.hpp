#pragma once

#include "avpvar/evaluation.hpp"
#include "avpvar/montecarlo.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace avpvar {

//' Usage or configuration problem; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct SeriesSpec {
  std::string name;
  int tcode = 1;
};

struct SimulateSpec {
  std::vector<int> dgps{1};
  std::vector<int> sample_sizes{50};
  std::vector<double> rhos{0.95};
  std::vector<DriverSpec> drivers{{DriverKind::Targeted, 60}};
  int replications = 1;
  bool random_start = false;
};

struct RunConfig {
  std::string data_path;     // endogenous series (and drivers unless drivers_path is set)
  std::string drivers_path;  // optional separate driver file
  std::vector<SeriesSpec> variables;
  std::vector<SeriesSpec> drivers;
  std::vector<std::string> evaluate;  // evaluated variable names; empty: first two
  std::vector<std::string> models;
  std::string benchmark = "OLS-VAR";
  int p = 2;
  int r = 1;
  std::string preset = "mc";  // mc | insample | custom
  McmcSettings mcmc = McmcSettings::mc();
  OosScheme scheme = OosScheme::monthly();
  std::vector<std::string> ordering;  // TVP-VAR-EB recursion order
  int forecast_horizon = 0;           // 0: largest scheme horizon
  int ols_draws = 1000;
  int training_size = 40;
  bool report_timing = false;
  std::uint64_t seed = 1;
  std::string output = "out";
  std::optional<SimulateSpec> simulate;

  std::string canonical;  // normalized JSON used for the config hash
};

McmcSettings preset_settings(const std::string& preset);

// Parses and validates; every error names the offending key path.
RunConfig parse_config_text(const std::string& text, const std::string& origin = "config");
RunConfig load_config(const std::string& path);

// Re-applies overrides (seed, preset) and refreshes the canonical text.
void apply_overrides(RunConfig& cfg, std::optional<std::uint64_t> seed, std::optional<std::string> preset);

std::string config_hash(const RunConfig& cfg);  // hex FNV-1a of the canonical text

}  // namespace avpvar
