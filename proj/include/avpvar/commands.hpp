#pragma once

#include "avpvar/config.hpp"
#include "avpvar/csv.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace avpvar {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunOptions {
  int jobs = 1;
  std::string output_dir;  // resolved output directory
  std::ostream* log = nullptr;
};

// Loaded, transformed and aligned data of a run.
struct LoadedData {
  TimeSeriesPanel panel;  // transformed endogenous variables
  DriverSet drivers;      // transformed drivers, same rows as the panel
};

LoadedData load_data(const RunConfig& cfg);

// Each returns the process exit code: 0 success, 1 partial failure.
// Configuration problems throw ConfigError, data problems DataError.
int cmd_estimate(const RunConfig& cfg, const RunOptions& opt);
int cmd_forecast(const RunConfig& cfg, const RunOptions& opt);
int cmd_evaluate(const RunConfig& cfg, const RunOptions& opt);
int cmd_simulate(const RunConfig& cfg, const RunOptions& opt);
int cmd_compare(const RunConfig& cfg, const RunOptions& opt);

// Resolution order: explicit flag, then AVPVAR_OUT, then the config value.
std::string resolve_output_dir(const std::string& flag, const RunConfig& cfg);

}  // namespace avpvar
