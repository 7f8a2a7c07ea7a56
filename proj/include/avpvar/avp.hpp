#pragma once

#include "avpvar/data.hpp"
#include "avpvar/forecast.hpp"
#include "avpvar/horseshoe.hpp"
#include "avpvar/stochvol.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace avpvar {

struct McmcSettings {
  int iterations = 11000;
  int burn_in = 1000;
  int thin = 10;

  static McmcSettings mc() { return {11000, 1000, 10}; }
  static McmcSettings insample() { return {100000, 5000, 5}; }
  int retained() const { return (iterations - burn_in) / thin; }
  bool keep(int iteration) const {  // iteration counted from 1
    return iteration > burn_in && (iteration - burn_in) % thin == 0;
  }
  void validate() const;
};

enum class VolatilityMode { Stochastic, Constant, Fixed };

struct AvpModelSpec {
  int p = 2;
  int r = 1;
  McmcSettings mcmc;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
  VolatilityMode volatility = VolatilityMode::Stochastic;
  SvPrior sv_prior;
  bool center_initial_log_var = true;  // h_1 prior mean from the initial residual variance
  double variance_shape = 0.01;       // IG prior of constant variances
  double variance_scale = 0.01;
  bool update_shrinkage = true;  // false keeps the initial horseshoe scales (unit prior variances)
  bool keep_paths = true;        // store factor and log-variance paths in every retained draw

  void validate() const;
};

// Regression-level inputs: targets y (T x n), regressors x (T x k) and the
// cumulative drivers c (T x m) aligned row by row with y.
struct AvpData {
  MatrixXd y;
  MatrixXd x;
  MatrixXd c;
};

//' Per equation: beta_tilde = [beta_i; vec(gamma_beta_i)], gamma column-major k x m,
//' and lambda_tilde = [lambda_i; vec(gamma_lambda_i)], gamma r x m.
struct AugmentedCoefficients {
  Eigen::Index k = 0;
  Eigen::Index r = 0;
  Eigen::Index m = 0;
  std::vector<VectorXd> beta;
  std::vector<VectorXd> lambda;

  VectorXd baseline_beta(std::size_t i) const { return beta[i].head(k); }
  MatrixXd gamma_beta(std::size_t i) const;
  VectorXd baseline_lambda(std::size_t i) const { return lambda[i].head(r); }
  MatrixXd gamma_lambda(std::size_t i) const;
  // Coefficients at cumulative driver value c.
  VectorXd beta_at(std::size_t i, const VectorXd& c) const;
  VectorXd lambda_at(std::size_t i, const VectorXd& c) const;
};

struct AvpDraw {
  AugmentedCoefficients coefficients;
  MatrixXd factors;  // T x r (empty unless keep_paths)
  MatrixXd log_var;  // T x n (only the last row when !keep_paths)
  VectorXd omega2;   // per equation
  std::vector<HorseshoeState> hs_beta;
  std::vector<HorseshoeState> hs_lambda;
};

struct AvpPosterior {
  std::vector<AvpDraw> draws;
  AvpModelSpec spec;
  MatrixXd c;  // cumulative drivers of the estimation sample
  Eigen::Index n = 0;
  Eigen::Index k = 0;
  Eigen::Index m = 0;
};

struct AugmentedRegressors {
  VectorXd x;
  VectorXd f;
};

// x_tilde = [x; C (x) x] so x' gamma C = x_tilde.tail(k m)' vec(gamma) with column-major vec.
AugmentedRegressors augment_regressors(const VectorXd& x, const VectorXd& f, const VectorXd& c);
MatrixXd augment_rows(const MatrixXd& x, const MatrixXd& c);

struct CoefficientPaths {
  std::vector<MatrixXd> beta;    // per equation, T x k
  std::vector<MatrixXd> lambda;  // per equation, T x r
};

CoefficientPaths recover_time_paths(const AugmentedCoefficients& coeffs, const MatrixXd& c);

GaussianPosteriorSpec step1_conditional(const VectorXd& y_net, const MatrixXd& x_aug,
                                        const VectorXd& log_var, const HorseshoeState& hs);
VectorXd step1_draw_beta(const VectorXd& y_net, const MatrixXd& x_aug, const VectorXd& log_var,
                         const HorseshoeState& hs, SeededStream& rng);

GaussianPosteriorSpec step2_conditional(const VectorXd& y_net, const MatrixXd& f_aug,
                                        const VectorXd& log_var, const HorseshoeState& hs);
VectorXd step2_draw_lambda(const VectorXd& y_net, const MatrixXd& f_aug, const VectorXd& log_var,
                           const HorseshoeState& hs, SeededStream& rng);

// f_t ~ N(G L' S^{-1} y_t, G), G^{-1} = I + L' S^{-1} L (sigma2 = diag S).
GaussianPosteriorSpec step3_conditional(const VectorXd& y_net_t, const MatrixXd& loadings_t,
                                        const VectorXd& sigma2_t);
// y_net: T x n; loadings(t) gives Lambda_t (n x r); log_var: T x n.
MatrixXd step3_draw_factors(const MatrixXd& y_net, const std::vector<MatrixXd>& loading_paths,
                            const MatrixXd& log_var, SeededStream& rng);

AvpPosterior run_gibbs(const AvpModelSpec& spec, const AvpData& data);

// VAR-level entry: builds the design from a standardized panel and C from the drivers.
struct AvpVarFit {
  AvpPosterior posterior;
  VectorXd c_next;  // C_{T+1} = C_T + Z_T
};

AvpVarFit run_gibbs(const AvpModelSpec& spec, const MatrixXd& panel, const MatrixXd& drivers);
inline AvpVarFit run_gibbs(const AvpModelSpec& spec, const TimeSeriesPanel& panel,
                           const DriverSet& drivers) {
  return run_gibbs(spec, panel.values, drivers.values);
}

// Coefficients advanced to c_next, Omega = Lambda_{t+1} Lambda_{t+1}' + Sigma_t.
PredictiveDraw predictive_draw(const AvpDraw& draw, const VectorXd& c_next);
std::vector<PredictiveDraw> predictive_draws(const AvpPosterior& posterior, const VectorXd& c_next);

ForecastDistribution forecast(const AvpPosterior& posterior, const MatrixXd& panel_tail,
                              const VectorXd& c_next, int horizon, SeededStream& rng);

// Posterior-mean fitted covariance Lambda_t Lambda_t' + Sigma_t at row t.
MatrixXd fitted_covariance(const AvpPosterior& posterior, Eigen::Index t);

}  // namespace avpvar
