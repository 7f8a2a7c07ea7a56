#include "avpvar/benchmarks.hpp"
#include "avpvar/regression.hpp"

#include <cmath>

namespace avpvar {

namespace {

std::vector<MatrixXd> loading_paths_of(const TvpFbSampler::State& s) { return s.lambda; }

VectorXd block_fit(const MatrixXd& regressors, const MatrixXd& path) {
  if (regressors.cols() == 0) return VectorXd::Zero(regressors.rows());
  return path_fit(regressors, path);
}

// Draws either a random-walk path or a constant vector, and refreshes the block's horseshoe.
MatrixXd draw_block(const MatrixXd& regressors, const VectorXd& target, const VectorXd& weights,
                    bool time_varying, const HorseshoeState& hs, SeededStream& rng) {
  const Eigen::Index t = regressors.rows();
  if (time_varying) return draw_rw_path(regressors, target, weights, prior_variances(hs), rng);
  const VectorXd b = draw_regression(regressors, target, weights, prior_variances(hs), rng);
  return b.transpose().replicate(t, 1);
}

VectorXd block_coefficients(const MatrixXd& path, bool time_varying) {
  if (time_varying) return increments_from_path(path);
  return path.row(0).transpose();
}

}  // namespace

TvpFbSampler::TvpFbSampler(const MatrixXd& y, const MatrixXd& x, int r, const TvpFbOptions& options,
                           const SvPrior& sv_prior)
    : y_(y), x_(x), r_(r), options_(options) {
  const Eigen::Index t = y.rows();
  const Eigen::Index n = y.cols();
  const Eigen::Index k = x.cols();
  const MatrixXd b = ols_coefficients(x, y);
  MatrixXd resid = y - x * b;
  state_.factors = MatrixXd::Zero(t, r);
  MatrixXd load = MatrixXd::Zero(n, r);
  if (r > 0) {
    Eigen::JacobiSVD<MatrixXd> svd(resid, Eigen::ComputeThinU);
    const Eigen::Index use = std::min<Eigen::Index>(r, svd.matrixU().cols());
    state_.factors.leftCols(use) = svd.matrixU().leftCols(use) * std::sqrt(static_cast<double>(t));
    load = ols_coefficients(state_.factors, resid).transpose();
    resid -= state_.factors * load.transpose();
  }
  state_.log_var.resize(t, n);
  state_.omega2 = VectorXd::Constant(n, 0.1);
  priors_.assign(n, sv_prior);
  for (Eigen::Index i = 0; i < n; ++i) {
    state_.beta.push_back(b.col(i).transpose().replicate(t, 1));
    state_.lambda.push_back(r > 0 ? MatrixXd(load.row(i).replicate(t, 1)) : MatrixXd(t, 0));
    const double v = std::max(resid.col(i).squaredNorm() / static_cast<double>(t), 1e-8);
    state_.log_var.col(i).setConstant(std::log(v));
    if (options.center_initial_log_var) priors_[i].initial_mean = std::log(v);
    state_.hs_beta.push_back(HorseshoeState::initial(options.tv_coefficients ? t * k : k));
    state_.hs_lambda.push_back(HorseshoeState::initial(options.tv_loadings ? t * r : r));
  }
}

void TvpFbSampler::sweep(SeededStream& rng) {
  const Eigen::Index t = y_.rows();
  const Eigen::Index n = y_.cols();
  State& s = state_;
  MatrixXd fit_x(t, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const VectorXd w = (-s.log_var.col(i).array()).exp();
    const VectorXd target = y_.col(i) - block_fit(s.factors, s.lambda[i]);
    s.beta[i] = draw_block(x_, target, w, options_.tv_coefficients, s.hs_beta[i], rng);
    fit_x.col(i) = path_fit(x_, s.beta[i]);
  }
  if (r_ > 0) {
    s.factors = step3_draw_factors(y_ - fit_x, loading_paths_of(s), s.log_var, rng);
    for (Eigen::Index i = 0; i < n; ++i) {
      const VectorXd w = (-s.log_var.col(i).array()).exp();
      s.lambda[i] = draw_block(s.factors, y_.col(i) - fit_x.col(i), w, options_.tv_loadings,
                               s.hs_lambda[i], rng);
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const VectorXd v = y_.col(i) - fit_x.col(i) - block_fit(s.factors, s.lambda[i]);
    if (options_.volatility == VolatilityMode::Stochastic) {
      SvPath path{s.log_var.col(i), s.omega2(i)};
      sv_step(v, path, priors_[i], rng);
      s.log_var.col(i) = path.log_var;
      s.omega2(i) = path.omega2;
    } else if (options_.volatility == VolatilityMode::Constant) {
      const double sigma2 = draw_inverse_gamma(0.01 + 0.5 * static_cast<double>(t), 0.01 + 0.5 * v.squaredNorm(), rng);
      s.log_var.col(i).setConstant(std::log(sigma2));
    }
  }
  if (options_.update_shrinkage) {
    for (Eigen::Index i = 0; i < n; ++i) {
      s.hs_beta[i] = update(s.hs_beta[i], block_coefficients(s.beta[i], options_.tv_coefficients), rng);
      if (r_ > 0)
        s.hs_lambda[i] = update(s.hs_lambda[i], block_coefficients(s.lambda[i], options_.tv_loadings), rng);
    }
  }
}

TvpFbPosterior fit_tvp_fb_regression(const MatrixXd& y, const MatrixXd& x, int r,
                                     const TvpFbOptions& options, const BenchmarkSpec& spec) {
  spec.mcmc.validate();
  SeededStream rng(spec.seed, spec.stream);
  TvpFbSampler sampler(y, x, r, options, spec.sv_prior);
  const Eigen::Index t = y.rows();
  const Eigen::Index n = y.cols();
  const Eigen::Index k = x.cols();
  TvpFbPosterior post;
  post.beta_mean.assign(n, MatrixXd::Zero(t, k));
  post.lambda_mean.assign(n, MatrixXd::Zero(t, r));
  post.log_var_mean = MatrixXd::Zero(t, n);
  for (int it = 1; it <= spec.mcmc.iterations; ++it) {
    try {
      sampler.sweep(rng);
    } catch (const NumericalError& e) {
      throw NumericalError("TVP-VAR Gibbs iteration " + std::to_string(it) + ": " + e.what());
    }
    if (!spec.mcmc.keep(it)) continue;
    const TvpFbSampler::State& s = sampler.state();
    PredictiveDraw d;
    d.coefficients.resize(n, k);
    MatrixXd lam(n, r);
    for (Eigen::Index i = 0; i < n; ++i) {
      post.beta_mean[i] += s.beta[i];
      post.lambda_mean[i] += s.lambda[i];
      d.coefficients.row(i) = s.beta[i].row(t - 1);
      if (r > 0) lam.row(i) = s.lambda[i].row(t - 1);
    }
    post.log_var_mean += s.log_var;
    d.covariance = lam * lam.transpose();
    d.covariance.diagonal() += s.log_var.row(t - 1).transpose().array().exp().matrix();
    post.predictive.push_back(std::move(d));
    ++post.draws;
  }
  const double inv = 1.0 / std::max(post.draws, 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    post.beta_mean[i] *= inv;
    post.lambda_mean[i] *= inv;
  }
  post.log_var_mean *= inv;
  return post;
}

TvpFbPosterior fit_tvp_var_fb(const MatrixXd& panel, const BenchmarkSpec& spec) {
  const VarDesign d = build_design(panel, spec.p);
  return fit_tvp_fb_regression(d.y, d.x, spec.r, TvpFbOptions{}, spec);
}

TvpFbPosterior fit_cp_var_sv(const MatrixXd& panel, const BenchmarkSpec& spec) {
  const VarDesign d = build_design(panel, spec.p);
  TvpFbOptions o;
  o.tv_coefficients = false;
  o.tv_loadings = true;
  return fit_tvp_fb_regression(d.y, d.x, spec.r, o, spec);
}

}  // namespace avpvar
