#pragma once

#include "avpvar/models.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace avpvar {

// tau * max(y - q, 0) + (1 - tau) * max(q - y, 0)
double pinball_loss(double realized, double quantile, double tau);

struct OosScheme {
  double initial_fraction = 0.5;
  int step = 1;
  std::vector<int> horizons{1};
  int min_window = 40;

  static OosScheme monthly();    // 1..6, 9, 12, 15, 18, 24
  static OosScheme quarterly();  // 1..8
  int max_horizon() const;
  Eigen::Index initial_window(Eigen::Index periods) const;
  void validate(Eigen::Index periods, int p) const;  // throws std::invalid_argument
};

// A named estimator: fits on a standardized training window (panel, drivers).
struct ForecastModel {
  std::string name;
  std::function<PredictiveModel(const MatrixXd& panel, const MatrixXd& drivers, std::uint64_t stream)> fit;
};

ForecastModel make_forecast_model(ModelKind kind, const ModelSettings& settings);

struct EvaluationSettings {
  std::string benchmark = "OLS-VAR";
  std::vector<int> variables;  // evaluated panel columns; empty: the first two
  std::uint64_t seed = 1;
  int jobs = 1;
  double explosive_threshold = kExplosiveThreshold;
};

struct ForecastRecord {
  Eigen::Index origin = 0;  // training rows [0, origin)
  std::string model;
  int variable = 0;
  int horizon = 0;
  double realized = 0.0;
  double median = 0.0;
  double q10 = 0.0;
  double q90 = 0.0;
};

struct CellFailure {
  Eigen::Index origin = 0;
  std::string model;
  std::string message;
};

struct ScoreRow {
  std::string variable;
  int horizon = 0;
  std::string model;
  double mspe = 0.0;
  double mae = 0.0;
  double qs90 = 0.0;
  double qs10 = 0.0;
  double mspe_ratio = 0.0;
  double mae_ratio = 0.0;
  double qs90_ratio = 0.0;
  double qs10_ratio = 0.0;
  int count = 0;
};

struct ScoreTable {
  std::vector<ScoreRow> rows;
  std::string benchmark;

  const ScoreRow* find(const std::string& variable, int horizon, const std::string& model) const;
};

// Aggregates per-origin records into means and ratios against the benchmark.
ScoreTable aggregate_scores(const std::vector<ForecastRecord>& records, const std::vector<std::string>& names,
                            const std::string& benchmark);

struct RecursiveResult {
  std::vector<ForecastRecord> records;
  std::vector<CellFailure> failures;
  ScoreTable scores;
  std::map<std::string, double> seconds;  // total fit + forecast time per model
  int explosive_paths = 0;
  std::vector<std::string> variable_names;
};

RecursiveResult run_recursive(const std::vector<ForecastModel>& models, const MatrixXd& panel,
                              const std::vector<std::string>& names, const MatrixXd& drivers,
                              const OosScheme& scheme, const EvaluationSettings& settings);

// Standardizes a training window; columns without variation keep scale 1.
MatrixXd standardize_window(const MatrixXd& values, StandardizationState& state);

enum class Metric { Mspe, Mae, Qs90, Qs10 };
std::string metric_name(Metric m);

void write_scores_csv(const ScoreTable& table, const std::string& path);
// Table layout: h then one column per table model, a panel per evaluated
// variable and a final speed row relative to TVP-VAR-EB.
void write_table_csv(const ScoreTable& table, Metric metric, const std::vector<std::string>& variables,
                     const std::vector<int>& horizons, const std::map<std::string, double>& seconds,
                     const std::string& path);
// Plot-ready: variable, horizon, metric, model, value (ratio to the benchmark).
void write_long_csv(const ScoreTable& table, const std::string& path);
void write_records_csv(const std::vector<ForecastRecord>& records, const std::vector<std::string>& names,
                       const std::string& path);

}  // namespace avpvar
