#include "avpvar/stochvol.hpp"

#include <cmath>
#include <stdexcept>

namespace avpvar {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

}  // namespace

VectorXd transform_residuals(const VectorXd& residuals) {
  return (residuals.array().square() + kSvOffset).log();
}

MatrixXd mixture_probabilities(const VectorXd& transformed, const VectorXd& log_var) {
  const Eigen::Index t = transformed.size();
  MatrixXd p(t, 7);
  for (Eigen::Index i = 0; i < t; ++i) {
    double lw[7];
    double mx = -INFINITY;
    for (int j = 0; j < 7; ++j) {
      const KscComponent& c = kKscMixture[j];
      const double e = transformed(i) - log_var(i) - c.mean;
      lw[j] = std::log(c.weight) - 0.5 * std::log(c.variance) - kLogSqrt2Pi - 0.5 * e * e / c.variance;
      mx = std::max(mx, lw[j]);
    }
    double total = 0.0;
    for (int j = 0; j < 7; ++j) {
      lw[j] = std::exp(lw[j] - mx);
      total += lw[j];
    }
    for (int j = 0; j < 7; ++j) p(i, j) = lw[j] / total;
  }
  return p;
}

MixtureIndicators draw_mixture_indicators(const VectorXd& transformed, const SvPath& path,
                                          SeededStream& rng) {
  if (transformed.size() != path.log_var.size())
    throw std::invalid_argument("mixture indicators: path length mismatch");
  const MatrixXd p = mixture_probabilities(transformed, path.log_var);
  MixtureIndicators out;
  out.states.resize(transformed.size());
  for (Eigen::Index i = 0; i < transformed.size(); ++i) {
    double w[7];
    for (int j = 0; j < 7; ++j) w[j] = p(i, j);
    out.states(i) = rng.categorical(w, 7) + 1;
  }
  return out;
}

BandGaussian log_vol_conditional(const VectorXd& transformed, const MixtureIndicators& indicators,
                                 double omega2, const SvPrior& prior, const VectorXd* offset) {
  const Eigen::Index t = transformed.size();
  BandGaussian g{BandMatrix(t, 1), VectorXd::Zero(t)};
  // Prior: h_1 ~ N(mu0, V_h), h_t - h_{t-1} ~ N(0, omega2).
  g.precision.add(0, 0, 1.0 / prior.initial_variance);
  g.linear(0) += prior.initial_mean / prior.initial_variance;
  for (Eigen::Index i = 1; i < t; ++i) {
    g.precision.add(i, i, 1.0 / omega2);
    g.precision.add(i - 1, i - 1, 1.0 / omega2);
    g.precision.add(i, i - 1, -1.0 / omega2);
  }
  for (Eigen::Index i = 0; i < t; ++i) {
    const KscComponent& c = kKscMixture[indicators.states(i) - 1];
    const double obs = transformed(i) - c.mean - (offset ? (*offset)(i) : 0.0);
    g.precision.add(i, i, 1.0 / c.variance);
    g.linear(i) += obs / c.variance;
  }
  return g;
}

VectorXd draw_band_gaussian(const BandGaussian& g, const VectorXd& z) {
  const BandCholesky l = band_cholesky(g.precision);
  return l.solve_upper(l.solve_lower(g.linear) + z);
}

VectorXd band_gaussian_mean(const BandGaussian& g) { return band_cholesky(g.precision).solve(g.linear); }

VectorXd draw_log_vol_path(const VectorXd& transformed, const MixtureIndicators& indicators,
                           double omega2, const SvPrior& prior, SeededStream& rng,
                           const VectorXd* offset) {
  if (!(prior.initial_variance > 0.0) || !(omega2 > 0.0))
    throw std::domain_error("log-volatility path: V_h and omega2 must be positive");
  const BandGaussian g = log_vol_conditional(transformed, indicators, omega2, prior, offset);
  return draw_band_gaussian(g, rng.normal_vector(transformed.size()));
}

InverseGammaParams omega2_posterior(const VectorXd& log_var, double a0, double b0) {
  const Eigen::Index t = log_var.size();
  if (t < 2) throw std::invalid_argument("omega2 update needs T >= 2");
  const double ss = (log_var.tail(t - 1) - log_var.head(t - 1)).squaredNorm();
  return {0.5 * (a0 + static_cast<double>(t - 1)), 0.5 * (b0 + ss)};
}

double update_omega2(const VectorXd& log_var, double a0, double b0, SeededStream& rng) {
  const InverseGammaParams p = omega2_posterior(log_var, a0, b0);
  return draw_inverse_gamma(p.shape, p.scale, rng);
}

void sv_step(const VectorXd& residuals, SvPath& path, const SvPrior& prior, SeededStream& rng) {
  const VectorXd ystar = transform_residuals(residuals);
  const MixtureIndicators s = draw_mixture_indicators(ystar, path, rng);
  path.log_var = draw_log_vol_path(ystar, s, path.omega2, prior, rng);
  if (path.log_var.size() >= 2) path.omega2 = update_omega2(path.log_var, prior.a0, prior.b0, rng);
}

}  // namespace avpvar
