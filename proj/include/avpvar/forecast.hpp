#pragma once

#include "avpvar/data.hpp"
#include "avpvar/rng.hpp"

#include <vector>

namespace avpvar {

inline constexpr double kExplosiveThreshold = 1e6;

//' One posterior draw reduced to what the forecast recursion needs:
//' coefficients (n x k, row i = equation i over [1, y_t', ..., y_{t-p+1}'])
//' and the shock covariance, both held fixed over all horizons.
struct PredictiveDraw {
  MatrixXd coefficients;
  MatrixXd covariance;
};

struct ForecastDistribution {
  std::vector<MatrixXd> paths;  // one H x n path per draw
  int explosive_paths = 0;

  Eigen::Index horizon() const { return paths.empty() ? 0 : paths.front().rows(); }
  Eigen::Index series() const { return paths.empty() ? 0 : paths.front().cols(); }
  MatrixXd quantile(double q) const;  // H x n, linear interpolation between order statistics
  MatrixXd median() const { return quantile(0.5); }
  MatrixXd mean() const;
};

double quantile_of(std::vector<double> values, double q);

// Iterates y_{t+h} = B x_{t+h} + L e_h with e_h given (H x n standard normals).
MatrixXd simulate_path(const PredictiveDraw& draw, const MatrixXd& history, int p, int horizon,
                       const MatrixXd& standard_shocks);

// One simulated path per draw.
ForecastDistribution simulate_forecasts(const std::vector<PredictiveDraw>& draws,
                                        const MatrixXd& history, int p, int horizon,
                                        SeededStream& rng);

// Maps every path back to the data scale and counts paths exceeding the threshold.
void destandardize(ForecastDistribution& dist, const StandardizationState& state,
                   double threshold = kExplosiveThreshold);

}  // namespace avpvar
