#include "avpvar/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace avpvar {

double quantile_of(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

MatrixXd ForecastDistribution::quantile(double q) const {
  const Eigen::Index h = horizon();
  const Eigen::Index n = series();
  MatrixXd out(h, n);
  std::vector<double> buf(paths.size());
  for (Eigen::Index i = 0; i < h; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      for (std::size_t d = 0; d < paths.size(); ++d) buf[d] = paths[d](i, j);
      out(i, j) = quantile_of(buf, q);
    }
  return out;
}

MatrixXd ForecastDistribution::mean() const {
  MatrixXd acc = MatrixXd::Zero(horizon(), series());
  for (const MatrixXd& p : paths) acc += p;
  return acc / static_cast<double>(paths.size());
}

MatrixXd simulate_path(const PredictiveDraw& draw, const MatrixXd& history, int p, int horizon,
                       const MatrixXd& standard_shocks) {
  const Eigen::Index n = draw.coefficients.rows();
  if (history.rows() < p || history.cols() != n)
    throw std::invalid_argument("forecast history does not match the model");
  MatrixXd chol = MatrixXd::Zero(n, n);
  if (draw.covariance.cwiseAbs().maxCoeff() > 0.0) chol = jittered_cholesky(draw.covariance).lower;
  MatrixXd window(p + horizon, n);
  window.topRows(p) = history.bottomRows(p);
  for (int h = 0; h < horizon; ++h) {
    const VectorXd x = lag_row(window.topRows(p + h), p);
    window.row(p + h) = (draw.coefficients * x + chol * standard_shocks.row(h).transpose()).transpose();
  }
  return window.bottomRows(horizon);
}

ForecastDistribution simulate_forecasts(const std::vector<PredictiveDraw>& draws,
                                        const MatrixXd& history, int p, int horizon,
                                        SeededStream& rng) {
  ForecastDistribution dist;
  dist.paths.reserve(draws.size());
  for (const PredictiveDraw& d : draws) {
    const Eigen::Index n = d.coefficients.rows();
    MatrixXd e(horizon, n);
    for (int h = 0; h < horizon; ++h)
      for (Eigen::Index j = 0; j < n; ++j) e(h, j) = rng.normal();
    dist.paths.push_back(simulate_path(d, history, p, horizon, e));
  }
  return dist;
}

void destandardize(ForecastDistribution& dist, const StandardizationState& state, double threshold) {
  dist.explosive_paths = 0;
  for (MatrixXd& path : dist.paths) {
    path = destandardize_columns(path, state);
    if (!path.allFinite() || path.cwiseAbs().maxCoeff() > threshold) ++dist.explosive_paths;
  }
}

}  // namespace avpvar
