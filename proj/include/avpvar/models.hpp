#pragma once

#include "avpvar/benchmarks.hpp"

#include <optional>
#include <string>
#include <vector>

namespace avpvar {

enum class ModelKind { AvpVar, CpVar, CpVarSv, TvpVarEb, TvpVarFb, VarSvot, Favar, FavarSv, OlsVar, UcSv };

// Column order of the forecasting tables.
const std::vector<ModelKind>& table_models();
std::vector<std::string> model_names();
std::string model_name(ModelKind kind);
std::optional<ModelKind> parse_model(const std::string& name);
bool model_uses_drivers(ModelKind kind);

struct ModelSettings {
  int p = 2;
  int r = 1;
  McmcSettings mcmc;
  std::uint64_t seed = 1;
  int ols_draws = 1000;        // predictive copies for least-squares models
  std::vector<int> ordering;   // TVP-VAR-EB recursion order (empty: panel order)
  int training_size = 40;
};

//' Everything the forecast recursion needs from a fitted model. `history`
//' holds the last p rows of the model's own system (FAVAR carries its factor
//' first) and `output_columns` picks the panel variables out of that system.
struct PredictiveModel {
  std::vector<PredictiveDraw> draws;
  MatrixXd history;
  int p = 1;
  std::vector<int> output_columns;
};

// Fits `kind` on a standardized panel (T x n) with standardized drivers (T x m).
PredictiveModel fit_model(ModelKind kind, const ModelSettings& settings, const MatrixXd& panel,
                          const MatrixXd& drivers, std::uint64_t stream);

// Forecast distribution over the panel variables only (standardized scale).
ForecastDistribution forecast_model(const PredictiveModel& model, int horizon, SeededStream& rng);

}  // namespace avpvar
