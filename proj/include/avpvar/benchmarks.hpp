#pragma once

#include "avpvar/avp.hpp"
#include "avpvar/forecast.hpp"
#include "avpvar/horseshoe.hpp"
#include "avpvar/kalman.hpp"
#include "avpvar/stochvol.hpp"

#include <optional>
#include <string>
#include <vector>

namespace avpvar {

enum class BenchmarkKind { CpVar, CpVarSv, TvpVarFb, TvpVarEb, VarSvot, Favar, FavarSv, OlsVar, UcSv };

struct BenchmarkSpec {
  int p = 2;
  int r = 1;
  McmcSettings mcmc;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
  SvPrior sv_prior;
  int training_size = 40;  // EB / SVOt prior calibration window
};

// ---- OLS-VAR ----

struct OlsVarFit {
  MatrixXd coefficients;  // n x k
  MatrixXd covariance;    // RSS / T
  MatrixXd residuals;
};

OlsVarFit fit_ols_var(const MatrixXd& panel, int p);
std::vector<PredictiveDraw> replicate_predictive(const MatrixXd& coefficients,
                                                 const MatrixXd& covariance, int draws);

// ---- CP-VAR: AVP machinery with m = 0 and constant variances ----

AvpPosterior fit_cp_var(const MatrixXd& panel, const BenchmarkSpec& spec);

// ---- TVP-VAR full Bayes (also CP-VAR-SV when coefficients are constant) ----

struct TvpFbOptions {
  bool tv_coefficients = true;
  bool tv_loadings = true;
  VolatilityMode volatility = VolatilityMode::Stochastic;
  bool center_initial_log_var = true;
  bool update_shrinkage = true;
};

//' Gibbs sampler for y_it = x_t' beta_it + f_t' lambda_it + v_it with
//' random-walk beta and lambda written in first differences, horseshoe priors on
//' every increment (the initial state included) and per-equation SV.
class TvpFbSampler {
 public:
  struct State {
    std::vector<MatrixXd> beta;    // per equation, T x k
    std::vector<MatrixXd> lambda;  // per equation, T x r
    MatrixXd factors;              // T x r
    MatrixXd log_var;              // T x n
    VectorXd omega2;
    std::vector<HorseshoeState> hs_beta;
    std::vector<HorseshoeState> hs_lambda;
  };

  TvpFbSampler(const MatrixXd& y, const MatrixXd& x, int r, const TvpFbOptions& options,
               const SvPrior& sv_prior);

  void sweep(SeededStream& rng);
  const State& state() const { return state_; }
  State& mutable_state() { return state_; }
  void set_targets(const MatrixXd& y) { y_ = y; }
  const MatrixXd& targets() const { return y_; }
  const std::vector<SvPrior>& sv_priors() const { return priors_; }
  const TvpFbOptions& options() const { return options_; }

 private:
  MatrixXd y_;
  MatrixXd x_;
  int r_;
  TvpFbOptions options_;
  std::vector<SvPrior> priors_;
  State state_;
};

struct TvpFbPosterior {
  std::vector<MatrixXd> beta_mean;    // per equation, T x k
  std::vector<MatrixXd> lambda_mean;  // per equation, T x r
  MatrixXd log_var_mean;
  std::vector<PredictiveDraw> predictive;  // coefficients at T, Omega = Lambda_T Lambda_T' + Sigma_T
  int draws = 0;
};

// Regression-level fit (targets y, regressors x shared across equations).
TvpFbPosterior fit_tvp_fb_regression(const MatrixXd& y, const MatrixXd& x, int r,
                                     const TvpFbOptions& options, const BenchmarkSpec& spec);
TvpFbPosterior fit_tvp_var_fb(const MatrixXd& panel, const BenchmarkSpec& spec);
TvpFbPosterior fit_cp_var_sv(const MatrixXd& panel, const BenchmarkSpec& spec);

// ---- TVP-VAR-EB (Primiceri-style, triangular A_t, Carter-Kohn) ----

struct TvpEbPriors {
  double nu_q = 0.0;  // 0 => K + 2
  double nu_phi = 0.0;  // 0 => n + 2
  double nu_omega = 0.0;  // 0 => n + 2
  double s_q = 0.01;
  double s_phi = 0.01;
  double s_omega = 0.01;
};

struct TvpEbPosterior {
  MatrixXd beta_mean;  // T x K, equation-major stacking
  MatrixXd log_var_mean;
  std::vector<PredictiveDraw> predictive;  // in the caller's variable order
  double q_dof = 0.0;  // posterior IW degrees of freedom used for Q
  int draws = 0;
};

// ordering[i] = index (in the panel) of the variable placed i-th in the recursion.
TvpEbPosterior fit_tvp_var_eb(const MatrixXd& panel, const BenchmarkSpec& spec,
                              const std::vector<int>& ordering, const TvpEbPriors& priors = {});

// ---- VAR-SVOt ----

struct SvotPriors {
  double lambda1 = 0.05;
  double lambda2 = 0.5;
  double lambda3 = 2.0;
  double intercept_scale = 100.0;
  double c_a = 1e6;
  int s_max = 20;
  double initial_variance = 100.0;
  bool outliers = true;  // false forces kappa = 1 (Minnesota SV-VAR)
};

struct SvotPosterior {
  MatrixXd coefficients_mean;  // n x k
  MatrixXd log_var_mean;
  VectorXd outlier_prob_mean;
  Eigen::MatrixXi last_kappa;  // kappa states of the final sweep
  std::vector<PredictiveDraw> predictive;
  int kappa_min = 0;
  int kappa_max = 0;
  int draws = 0;
};

// Beta(a + outliers, b + non-outliers) parameters of the outlier probability.
std::pair<double, double> outlier_probability_posterior(double a, double b,
                                                        const Eigen::VectorXi& kappa);
// Univariate AR(p) residual variances on the first rows of the panel.
VectorXd ar_residual_variances(const MatrixXd& panel, int p);

SvotPosterior fit_var_svot(const MatrixXd& panel, const BenchmarkSpec& spec,
                           const SvotPriors& priors = {});

// ---- FAVAR / FAVAR-SV ----

// First principal component of column-standardized drivers, sign fixed so that
// the loading vector sums to a positive number.
VectorXd first_principal_component(const MatrixXd& drivers);

struct FavarFit {
  MatrixXd augmented;  // [factor, panel]
  std::vector<PredictiveDraw> predictive;  // over the augmented system
};

FavarFit fit_favar(const MatrixXd& panel, const MatrixXd& drivers, bool with_sv,
                   const BenchmarkSpec& spec, int draws = 1000);

// ---- UC-SV ----

struct UcsvOptions {
  double tau_initial_variance = 10.0;
  SvPrior eps_prior;
  SvPrior eta_prior;
  bool freeze_volatility = false;
};

class UcsvSampler {
 public:
  struct State {
    VectorXd tau;
    SvPath eps;  // length T
    SvPath eta;  // length T - 1 (increments t = 2..T)
  };

  UcsvSampler(const VectorXd& y, const UcsvOptions& options);
  void sweep(SeededStream& rng);
  const State& state() const { return state_; }
  State& mutable_state() { return state_; }
  void set_series(const VectorXd& y) { y_ = y; }

 private:
  VectorXd y_;
  UcsvOptions options_;
  State state_;
};

struct UcsvPosterior {
  VectorXd tau_mean;
  VectorXd log_var_eps_mean;
  VectorXd log_var_eta_mean;
  std::vector<double> tau_last;
  std::vector<double> log_var_eps_last;
  int draws = 0;
};

UcsvPosterior fit_ucsv(const VectorXd& series, const BenchmarkSpec& spec,
                       const UcsvOptions& options = {});

// Level-only predictive for a panel, series by series.
std::vector<PredictiveDraw> ucsv_predictive(const std::vector<UcsvPosterior>& fits, int p);

// ---- names ----

std::string benchmark_name(BenchmarkKind kind);
std::optional<BenchmarkKind> parse_benchmark(const std::string& name);

}  // namespace avpvar
