#include "avpvar/avp.hpp"

#include "avpvar/regression.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace avpvar {

void McmcSettings::validate() const {
  if (iterations <= burn_in) throw std::invalid_argument("MCMC iterations must exceed burn-in");
  if (burn_in < 0) throw std::invalid_argument("MCMC burn-in must be non-negative");
  if (thin < 1) throw std::invalid_argument("MCMC thin must be at least 1");
}

void AvpModelSpec::validate() const {
  if (p < 1) throw std::invalid_argument("lag order p must be at least 1");
  if (r < 0) throw std::invalid_argument("factor count r must be non-negative");
  mcmc.validate();
}

MatrixXd AugmentedCoefficients::gamma_beta(std::size_t i) const {
  return Eigen::Map<const MatrixXd>(beta[i].data() + k, k, m);
}

MatrixXd AugmentedCoefficients::gamma_lambda(std::size_t i) const {
  return Eigen::Map<const MatrixXd>(lambda[i].data() + r, r, m);
}

VectorXd AugmentedCoefficients::beta_at(std::size_t i, const VectorXd& c) const {
  VectorXd b = beta[i].head(k);
  if (m > 0) b += gamma_beta(i) * c;
  return b;
}

VectorXd AugmentedCoefficients::lambda_at(std::size_t i, const VectorXd& c) const {
  VectorXd l = lambda[i].head(r);
  if (m > 0 && r > 0) l += gamma_lambda(i) * c;
  return l;
}

AugmentedRegressors augment_regressors(const VectorXd& x, const VectorXd& f, const VectorXd& c) {
  const Eigen::Index k = x.size();
  const Eigen::Index r = f.size();
  const Eigen::Index m = c.size();
  AugmentedRegressors out{VectorXd(k + k * m), VectorXd(r + r * m)};
  out.x.head(k) = x;
  out.f.head(r) = f;
  for (Eigen::Index b = 0; b < m; ++b) {
    out.x.segment(k + b * k, k) = c(b) * x;
    out.f.segment(r + b * r, r) = c(b) * f;
  }
  return out;
}

MatrixXd augment_rows(const MatrixXd& x, const MatrixXd& c) {
  const Eigen::Index k = x.cols();
  const Eigen::Index m = c.cols();
  MatrixXd out(x.rows(), k + k * m);
  out.leftCols(k) = x;
  for (Eigen::Index b = 0; b < m; ++b)
    out.middleCols(k + b * k, k) = x.array().colwise() * c.col(b).array();
  return out;
}

CoefficientPaths recover_time_paths(const AugmentedCoefficients& coeffs, const MatrixXd& c) {
  CoefficientPaths paths;
  const Eigen::Index t = c.rows();
  for (std::size_t i = 0; i < coeffs.beta.size(); ++i) {
    MatrixXd b = coeffs.baseline_beta(i).transpose().replicate(t, 1);
    if (coeffs.m > 0) b += c * coeffs.gamma_beta(i).transpose();
    paths.beta.push_back(std::move(b));
    MatrixXd l = coeffs.baseline_lambda(i).transpose().replicate(t, 1);
    if (coeffs.m > 0 && coeffs.r > 0) l += c * coeffs.gamma_lambda(i).transpose();
    paths.lambda.push_back(std::move(l));
  }
  return paths;
}

GaussianPosteriorSpec step1_conditional(const VectorXd& y_net, const MatrixXd& x_aug,
                                        const VectorXd& log_var, const HorseshoeState& hs) {
  return regression_conditional(x_aug, y_net, (-log_var.array()).exp(), prior_variances(hs));
}

VectorXd step1_draw_beta(const VectorXd& y_net, const MatrixXd& x_aug, const VectorXd& log_var,
                         const HorseshoeState& hs, SeededStream& rng) {
  return draw_regression(x_aug, y_net, (-log_var.array()).exp(), prior_variances(hs), rng);
}

GaussianPosteriorSpec step2_conditional(const VectorXd& y_net, const MatrixXd& f_aug,
                                        const VectorXd& log_var, const HorseshoeState& hs) {
  return step1_conditional(y_net, f_aug, log_var, hs);
}

VectorXd step2_draw_lambda(const VectorXd& y_net, const MatrixXd& f_aug, const VectorXd& log_var,
                           const HorseshoeState& hs, SeededStream& rng) {
  if (f_aug.cols() == 0) return VectorXd();
  return step1_draw_beta(y_net, f_aug, log_var, hs, rng);
}

GaussianPosteriorSpec step3_conditional(const VectorXd& y_net_t, const MatrixXd& loadings_t,
                                        const VectorXd& sigma2_t) {
  const Eigen::Index r = loadings_t.cols();
  const MatrixXd ls = loadings_t.array().colwise() / sigma2_t.array();
  GaussianPosteriorSpec spec;
  spec.precision = MatrixXd::Identity(r, r) + loadings_t.transpose() * ls;
  spec.linear = ls.transpose() * y_net_t;
  return spec;
}

MatrixXd step3_draw_factors(const MatrixXd& y_net, const std::vector<MatrixXd>& loading_paths,
                            const MatrixXd& log_var, SeededStream& rng) {
  const Eigen::Index t = y_net.rows();
  const Eigen::Index n = y_net.cols();
  const Eigen::Index r = loading_paths.empty() ? 0 : loading_paths.front().cols();
  MatrixXd f(t, r);
  if (r == 0) return f;
  MatrixXd lt(n, r);
  for (Eigen::Index s = 0; s < t; ++s) {
    for (Eigen::Index i = 0; i < n; ++i) lt.row(i) = loading_paths[i].row(s);
    const VectorXd sigma2 = log_var.row(s).array().exp().transpose();
    f.row(s) = draw_mvn_from_precision(step3_conditional(y_net.row(s).transpose(), lt, sigma2), rng).transpose();
  }
  return f;
}

namespace {

struct AvpState {
  AugmentedCoefficients coeffs;
  MatrixXd factors;
  MatrixXd log_var;
  VectorXd omega2;
  std::vector<HorseshoeState> hs_beta;
  std::vector<HorseshoeState> hs_lambda;
};

AvpState initialize(const AvpModelSpec& spec, const AvpData& data, std::vector<SvPrior>& priors) {
  const Eigen::Index t = data.y.rows();
  const Eigen::Index n = data.y.cols();
  const Eigen::Index k = data.x.cols();
  const Eigen::Index m = data.c.cols();
  const Eigen::Index r = spec.r;
  AvpState s;
  s.coeffs.k = k;
  s.coeffs.r = r;
  s.coeffs.m = m;
  const MatrixXd b = ols_coefficients(data.x, data.y);  // k x n
  MatrixXd resid = data.y - data.x * b;
  s.factors = MatrixXd::Zero(t, r);
  MatrixXd load = MatrixXd::Zero(n, r);
  if (r > 0) {
    Eigen::JacobiSVD<MatrixXd> svd(resid, Eigen::ComputeThinU);
    const Eigen::Index use = std::min<Eigen::Index>(r, svd.matrixU().cols());
    s.factors.leftCols(use) = svd.matrixU().leftCols(use) * std::sqrt(static_cast<double>(t));
    load = ols_coefficients(s.factors, resid).transpose();
    resid -= s.factors * load.transpose();
  }
  s.log_var.resize(t, n);
  s.omega2 = VectorXd::Constant(n, 0.1);
  priors.assign(n, spec.sv_prior);
  for (Eigen::Index i = 0; i < n; ++i) {
    VectorXd bt = VectorXd::Zero(k + k * m);
    bt.head(k) = b.col(i);
    s.coeffs.beta.push_back(bt);
    VectorXd lt = VectorXd::Zero(r + r * m);
    if (r > 0) lt.head(r) = load.row(i).transpose();
    s.coeffs.lambda.push_back(lt);
    const double v = std::max(resid.col(i).squaredNorm() / static_cast<double>(t), 1e-8);
    s.log_var.col(i).setConstant(std::log(v));
    if (spec.center_initial_log_var) priors[i].initial_mean = std::log(v);
    s.hs_beta.push_back(HorseshoeState::initial(k + k * m));
    s.hs_lambda.push_back(HorseshoeState::initial(r + r * m));
  }
  return s;
}

}  // namespace

AvpPosterior run_gibbs(const AvpModelSpec& spec, const AvpData& data) {
  spec.validate();
  const Eigen::Index t = data.y.rows();
  const Eigen::Index n = data.y.cols();
  const Eigen::Index k = data.x.cols();
  const Eigen::Index m = data.c.cols();
  const Eigen::Index r = spec.r;
  if (data.x.rows() != t || data.c.rows() != t)
    throw std::invalid_argument("AVP data: y, x and c must have the same rows");

  SeededStream rng(spec.seed, spec.stream);
  std::vector<SvPrior> priors;
  AvpState s = initialize(spec, data, priors);
  const MatrixXd x_aug = augment_rows(data.x, data.c);

  AvpPosterior post;
  post.spec = spec;
  post.c = data.c;
  post.n = n;
  post.k = k;
  post.m = m;
  post.draws.reserve(spec.mcmc.retained());

  MatrixXd fit_x(t, n);
  MatrixXd fit_f = MatrixXd::Zero(t, n);
  for (int it = 1; it <= spec.mcmc.iterations; ++it) {
    try {
      const MatrixXd f_aug = augment_rows(s.factors, data.c);
      for (Eigen::Index i = 0; i < n; ++i) fit_f.col(i) = r > 0 ? VectorXd(f_aug * s.coeffs.lambda[i]) : VectorXd::Zero(t);
      // Step 1: augmented VAR coefficients.
      for (Eigen::Index i = 0; i < n; ++i) {
        const VectorXd y_net = data.y.col(i) - fit_f.col(i);
        s.coeffs.beta[i] = step1_draw_beta(y_net, x_aug, s.log_var.col(i), s.hs_beta[i], rng);
        fit_x.col(i) = x_aug * s.coeffs.beta[i];
      }
      // Step 2: augmented loadings.
      if (r > 0) {
        for (Eigen::Index i = 0; i < n; ++i) {
          const VectorXd y_net = data.y.col(i) - fit_x.col(i);
          s.coeffs.lambda[i] = step2_draw_lambda(y_net, f_aug, s.log_var.col(i), s.hs_lambda[i], rng);
        }
        // Step 3: factors.
        const CoefficientPaths paths = recover_time_paths(s.coeffs, data.c);
        s.factors = step3_draw_factors(data.y - fit_x, paths.lambda, s.log_var, rng);
        const MatrixXd f_aug_new = augment_rows(s.factors, data.c);
        for (Eigen::Index i = 0; i < n; ++i) fit_f.col(i) = f_aug_new * s.coeffs.lambda[i];
      }
      // Step 4: volatilities.
      for (Eigen::Index i = 0; i < n; ++i) {
        const VectorXd v = data.y.col(i) - fit_x.col(i) - fit_f.col(i);
        if (spec.volatility == VolatilityMode::Stochastic) {
          SvPath path{s.log_var.col(i), s.omega2(i)};
          sv_step(v, path, priors[i], rng);
          s.log_var.col(i) = path.log_var;
          s.omega2(i) = path.omega2;
        } else if (spec.volatility == VolatilityMode::Constant) {
          const double sigma2 = draw_inverse_gamma(spec.variance_shape + 0.5 * static_cast<double>(t),
                                                   spec.variance_scale + 0.5 * v.squaredNorm(), rng);
          s.log_var.col(i).setConstant(std::log(sigma2));
        }
      }
      // Step 5: horseshoe hyperparameters.
      if (spec.update_shrinkage) {
        for (Eigen::Index i = 0; i < n; ++i) {
          s.hs_beta[i] = update(s.hs_beta[i], s.coeffs.beta[i], rng);
          if (r > 0) s.hs_lambda[i] = update(s.hs_lambda[i], s.coeffs.lambda[i], rng);
        }
      }
    } catch (const NumericalError& e) {
      throw NumericalError("AVP-VAR Gibbs iteration " + std::to_string(it) + ": " + e.what());
    }
    if (spec.mcmc.keep(it)) {
      AvpDraw d;
      d.coefficients = s.coeffs;
      if (spec.keep_paths) {
        d.factors = s.factors;
        d.log_var = s.log_var;
      } else {
        d.log_var = s.log_var.bottomRows(1);
      }
      d.omega2 = s.omega2;
      d.hs_beta = s.hs_beta;
      d.hs_lambda = s.hs_lambda;
      post.draws.push_back(std::move(d));
    }
  }
  return post;
}

AvpVarFit run_gibbs(const AvpModelSpec& spec, const MatrixXd& panel, const MatrixXd& drivers) {
  if (drivers.rows() != panel.rows() && drivers.cols() > 0)
    throw std::invalid_argument("drivers must have the same number of rows as the panel");
  const VarDesign design = build_design(panel, spec.p);
  const MatrixXd z = drivers.cols() > 0 ? drivers : MatrixXd::Zero(panel.rows(), 0);
  const CumulativeDrivers c = cumulative_drivers(z);
  AvpData data{design.y, design.x, c.values.bottomRows(design.y.rows())};
  AvpVarFit fit;
  fit.posterior = run_gibbs(spec, data);
  const Eigen::Index last = panel.rows() - 1;
  fit.c_next = z.cols() > 0 ? VectorXd(c.values.row(last).transpose() + z.row(last).transpose())
                            : VectorXd();
  return fit;
}

PredictiveDraw predictive_draw(const AvpDraw& draw, const VectorXd& c_next) {
  const AugmentedCoefficients& a = draw.coefficients;
  const Eigen::Index n = static_cast<Eigen::Index>(a.beta.size());
  const VectorXd c = a.m > 0 ? c_next : VectorXd();
  PredictiveDraw out;
  out.coefficients.resize(n, a.k);
  MatrixXd lam(n, a.r);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.coefficients.row(i) = a.beta_at(i, c).transpose();
    if (a.r > 0) lam.row(i) = a.lambda_at(i, c).transpose();
  }
  out.covariance = lam * lam.transpose();
  out.covariance.diagonal() += draw.log_var.bottomRows(1).transpose().array().exp().matrix();
  return out;
}

std::vector<PredictiveDraw> predictive_draws(const AvpPosterior& posterior, const VectorXd& c_next) {
  std::vector<PredictiveDraw> out;
  out.reserve(posterior.draws.size());
  for (const AvpDraw& d : posterior.draws) out.push_back(predictive_draw(d, c_next));
  return out;
}

ForecastDistribution forecast(const AvpPosterior& posterior, const MatrixXd& panel_tail,
                              const VectorXd& c_next, int horizon, SeededStream& rng) {
  return simulate_forecasts(predictive_draws(posterior, c_next), panel_tail, posterior.spec.p, horizon, rng);
}

MatrixXd fitted_covariance(const AvpPosterior& posterior, Eigen::Index t) {
  const Eigen::Index n = posterior.n;
  MatrixXd acc = MatrixXd::Zero(n, n);
  for (const AvpDraw& d : posterior.draws) {
    const AugmentedCoefficients& a = d.coefficients;
    const VectorXd c = a.m > 0 ? VectorXd(posterior.c.row(t).transpose()) : VectorXd();
    MatrixXd lam(n, a.r);
    for (Eigen::Index i = 0; i < n; ++i)
      if (a.r > 0) lam.row(i) = a.lambda_at(i, c).transpose();
    acc += lam * lam.transpose();
    acc.diagonal() += d.log_var.row(t).transpose().array().exp().matrix();
  }
  return acc / static_cast<double>(posterior.draws.size());
}

}  // namespace avpvar
