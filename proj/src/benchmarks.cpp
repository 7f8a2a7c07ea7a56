#include "avpvar/benchmarks.hpp"
#include "avpvar/regression.hpp"

#include <cmath>
#include <stdexcept>

namespace avpvar {

OlsVarFit fit_ols_var(const MatrixXd& panel, int p) {
  const VarDesign d = build_design(panel, p);
  OlsVarFit fit;
  const MatrixXd b = ols_coefficients(d.x, d.y);
  fit.coefficients = b.transpose();
  fit.residuals = d.y - d.x * b;
  fit.covariance = fit.residuals.transpose() * fit.residuals / static_cast<double>(d.y.rows());
  return fit;
}

std::vector<PredictiveDraw> replicate_predictive(const MatrixXd& coefficients,
                                                 const MatrixXd& covariance, int draws) {
  return std::vector<PredictiveDraw>(static_cast<std::size_t>(draws), PredictiveDraw{coefficients, covariance});
}

AvpPosterior fit_cp_var(const MatrixXd& panel, const BenchmarkSpec& spec) {
  AvpModelSpec s;
  s.p = spec.p;
  s.r = spec.r;
  s.mcmc = spec.mcmc;
  s.seed = spec.seed;
  s.stream = spec.stream;
  s.volatility = VolatilityMode::Constant;
  s.sv_prior = spec.sv_prior;
  s.keep_paths = false;
  return run_gibbs(s, panel, MatrixXd(panel.rows(), 0)).posterior;
}

VectorXd first_principal_component(const MatrixXd& drivers) {
  if (drivers.cols() == 0) throw DataError("principal component needs at least one driver");
  StandardizationState st;
  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < drivers.cols(); ++j) names.push_back("driver " + std::to_string(j + 1));
  const MatrixXd zs = standardize_columns(drivers, names, st);
  Eigen::JacobiSVD<MatrixXd> svd(zs, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (!(svd.singularValues()(0) > 1e-10)) throw DataError("driver matrix has no usable variation");
  VectorXd pc = svd.matrixU().col(0) * std::sqrt(static_cast<double>(drivers.rows() - 1));
  if (svd.matrixV().col(0).sum() < 0.0) pc = -pc;
  return pc;
}

FavarFit fit_favar(const MatrixXd& panel, const MatrixXd& drivers, bool with_sv,
                   const BenchmarkSpec& spec, int draws) {
  if (drivers.cols() == 0) throw DataError("FAVAR needs drivers");
  if (drivers.rows() != panel.rows()) throw DataError("FAVAR drivers and panel differ in length");
  FavarFit fit;
  fit.augmented.resize(panel.rows(), panel.cols() + 1);
  fit.augmented.col(0) = first_principal_component(drivers);
  fit.augmented.rightCols(panel.cols()) = panel;
  if (!with_sv) {
    const OlsVarFit ols = fit_ols_var(fit.augmented, spec.p);
    fit.predictive = replicate_predictive(ols.coefficients, ols.covariance, draws);
  } else {
    fit.predictive = fit_cp_var_sv(fit.augmented, spec).predictive;
  }
  return fit;
}

UcsvSampler::UcsvSampler(const VectorXd& y, const UcsvOptions& options) : y_(y), options_(options) {
  const Eigen::Index t = y.size();
  state_.tau = y;
  const double v = std::max(sample_sd(y) * sample_sd(y), 1e-4);
  state_.eps.log_var = VectorXd::Constant(t, std::log(0.5 * v));
  state_.eps.omega2 = 0.1;
  state_.eta.log_var = VectorXd::Constant(std::max<Eigen::Index>(t - 1, 0), std::log(0.1 * v));
  state_.eta.omega2 = 0.1;
}

void UcsvSampler::sweep(SeededStream& rng) {
  const Eigen::Index t = y_.size();
  State& s = state_;
  // Level path: tridiagonal precision from the random walk plus measurement.
  BandGaussian g{BandMatrix(t, 1), VectorXd::Zero(t)};
  g.precision.add(0, 0, 1.0 / options_.tau_initial_variance);
  for (Eigen::Index i = 1; i < t; ++i) {
    const double q = std::exp(-s.eta.log_var(i - 1));
    g.precision.add(i, i, q);
    g.precision.add(i - 1, i - 1, q);
    g.precision.add(i, i - 1, -q);
  }
  for (Eigen::Index i = 0; i < t; ++i) {
    const double w = std::exp(-s.eps.log_var(i));
    g.precision.add(i, i, w);
    g.linear(i) += w * y_(i);
  }
  s.tau = draw_band_gaussian(g, rng.normal_vector(t));
  if (options_.freeze_volatility) return;
  sv_step(y_ - s.tau, s.eps, options_.eps_prior, rng);
  if (t > 1) sv_step(s.tau.tail(t - 1) - s.tau.head(t - 1), s.eta, options_.eta_prior, rng);
}

UcsvPosterior fit_ucsv(const VectorXd& series, const BenchmarkSpec& spec, const UcsvOptions& options) {
  spec.mcmc.validate();
  if (series.size() < 2) throw DataError("UC-SV needs at least two observations");
  SeededStream rng(spec.seed, spec.stream);
  UcsvSampler sampler(series, options);
  const Eigen::Index t = series.size();
  UcsvPosterior post;
  post.tau_mean = VectorXd::Zero(t);
  post.log_var_eps_mean = VectorXd::Zero(t);
  post.log_var_eta_mean = VectorXd::Zero(t - 1);
  for (int it = 1; it <= spec.mcmc.iterations; ++it) {
    try {
      sampler.sweep(rng);
    } catch (const NumericalError& e) {
      throw NumericalError("UC-SV Gibbs iteration " + std::to_string(it) + ": " + e.what());
    }
    if (!spec.mcmc.keep(it)) continue;
    const UcsvSampler::State& s = sampler.state();
    post.tau_mean += s.tau;
    post.log_var_eps_mean += s.eps.log_var;
    post.log_var_eta_mean += s.eta.log_var;
    post.tau_last.push_back(s.tau(t - 1));
    post.log_var_eps_last.push_back(s.eps.log_var(t - 1));
    ++post.draws;
  }
  const double inv = 1.0 / std::max(post.draws, 1);
  post.tau_mean *= inv;
  post.log_var_eps_mean *= inv;
  post.log_var_eta_mean *= inv;
  return post;
}

std::vector<PredictiveDraw> ucsv_predictive(const std::vector<UcsvPosterior>& fits, int p) {
  const Eigen::Index n = static_cast<Eigen::Index>(fits.size());
  std::size_t draws = fits.empty() ? 0 : fits.front().tau_last.size();
  for (const UcsvPosterior& f : fits) draws = std::min(draws, f.tau_last.size());
  std::vector<PredictiveDraw> out(draws);
  for (std::size_t d = 0; d < draws; ++d) {
    out[d].coefficients = MatrixXd::Zero(n, n * p + 1);
    out[d].covariance = MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      out[d].coefficients(i, 0) = fits[i].tau_last[d];
      out[d].covariance(i, i) = std::exp(fits[i].log_var_eps_last[d]);
    }
  }
  return out;
}

std::string benchmark_name(BenchmarkKind kind) {
  switch (kind) {
    case BenchmarkKind::CpVar: return "CP-VAR";
    case BenchmarkKind::CpVarSv: return "CP-VAR-SV";
    case BenchmarkKind::TvpVarFb: return "TVP-VAR";
    case BenchmarkKind::TvpVarEb: return "TVP-VAR-EB";
    case BenchmarkKind::VarSvot: return "VAR-SVOt";
    case BenchmarkKind::Favar: return "FAVAR";
    case BenchmarkKind::FavarSv: return "FAVAR-SV";
    case BenchmarkKind::OlsVar: return "OLS-VAR";
    case BenchmarkKind::UcSv: return "UC-SV";
  }
  return "";
}

std::optional<BenchmarkKind> parse_benchmark(const std::string& name) {
  for (BenchmarkKind k : {BenchmarkKind::CpVar, BenchmarkKind::CpVarSv, BenchmarkKind::TvpVarFb,
                          BenchmarkKind::TvpVarEb, BenchmarkKind::VarSvot, BenchmarkKind::Favar,
                          BenchmarkKind::FavarSv, BenchmarkKind::OlsVar, BenchmarkKind::UcSv})
    if (benchmark_name(k) == name) return k;
  if (name == "TVP-VAR-FB") return BenchmarkKind::TvpVarFb;
  return std::nullopt;
}

}  // namespace avpvar
