#include "avpvar/benchmarks.hpp"
#include "avpvar/regression.hpp"

#include <cmath>

namespace avpvar {

std::pair<double, double> outlier_probability_posterior(double a, double b,
                                                        const Eigen::VectorXi& kappa) {
  const double out = static_cast<double>((kappa.array() > 1).count());
  return {a + out, b + static_cast<double>(kappa.size()) - out};
}

VectorXd ar_residual_variances(const MatrixXd& panel, int p) {
  VectorXd s2(panel.cols());
  for (Eigen::Index i = 0; i < panel.cols(); ++i) {
    const VarDesign d = build_design(MatrixXd(panel.col(i)), p);
    const MatrixXd b = ols_coefficients(d.x, d.y);
    const VectorXd e = d.y - d.x * b;
    const double dof = std::max<double>(1.0, static_cast<double>(e.size() - d.x.cols()));
    s2(i) = std::max(e.squaredNorm() / dof, 1e-8);
  }
  return s2;
}

namespace {

MatrixXd unit_lower_rows(const std::vector<VectorXd>& rows, Eigen::Index n) {
  MatrixXd a = MatrixXd::Identity(n, n);
  for (Eigen::Index i = 1; i < n; ++i) a.row(i).head(i) = rows[i].transpose();
  return a;
}

}  // namespace

SvotPosterior fit_var_svot(const MatrixXd& panel, const BenchmarkSpec& spec, const SvotPriors& pr) {
  spec.mcmc.validate();
  const int p = spec.p;
  const Eigen::Index n = panel.cols();
  const VarDesign design = build_design(panel, p);
  const Eigen::Index t = design.y.rows();
  const Eigen::Index k = design.x.cols();
  const Eigen::Index train = std::max<Eigen::Index>(std::min<Eigen::Index>(spec.training_size, panel.rows()), p + 2);
  const VectorXd s2 = ar_residual_variances(panel.topRows(std::min(train, panel.rows())), p);

  // Minnesota prior variances, row i = equation i.
  MatrixXd prior_var(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    prior_var(i, 0) = pr.intercept_scale * s2(i);
    for (int l = 1; l <= p; ++l)
      for (Eigen::Index j = 0; j < n; ++j) {
        const double base = pr.lambda1 / std::pow(static_cast<double>(l), pr.lambda3);
        prior_var(i, 1 + (l - 1) * n + j) = i == j ? base : base * pr.lambda2 * s2(i) / s2(j);
      }
  }
  const double np = static_cast<double>(n * p);
  const double alpha_pi = 10.0 * np / 4.0;
  const double beta_pi = 10.0 * np - alpha_pi;
  const double d_phi = static_cast<double>(n + 3);
  const double s_phi = 0.15 * 12.0 / np;
  const int smax = pr.s_max;

  SeededStream rng(spec.seed, spec.stream);
  MatrixXd b = ols_coefficients(design.x, design.y).transpose();  // n x k
  std::vector<VectorXd> arows(n);
  for (Eigen::Index i = 0; i < n; ++i) arows[i] = VectorXd::Zero(i);
  MatrixXd h(t, n);
  for (Eigen::Index i = 0; i < n; ++i) h.col(i).setConstant(std::log(s2(i)));
  Eigen::MatrixXi kappa = Eigen::MatrixXi::Ones(t, n);
  VectorXd pi = VectorXd::Constant(n, pr.outliers ? alpha_pi / (alpha_pi + beta_pi) : 0.0);
  VectorXd phi2 = VectorXd::Constant(n, s_phi / d_phi);
  SvPrior hprior;
  hprior.initial_variance = pr.initial_variance;

  SvotPosterior post;
  post.coefficients_mean = MatrixXd::Zero(n, k);
  post.log_var_mean = MatrixXd::Zero(t, n);
  post.outlier_prob_mean = VectorXd::Zero(n);
  post.kappa_min = smax;
  post.kappa_max = 1;

  for (int it = 1; it <= spec.mcmc.iterations; ++it) {
    try {
      const MatrixXd sig2 = h.array().exp() * kappa.cast<double>().array().square();
      MatrixXd a = unit_lower_rows(arows, n);
      // Step 1: coefficient rows, exact conditional given the other rows.
      for (Eigen::Index j = 0; j < n; ++j) {
        MatrixXd u = design.y - design.x * b.transpose();  // reduced residuals
        GaussianPosteriorSpec g;
        g.precision = prior_var.row(j).transpose().array().inverse().matrix().asDiagonal();
        g.linear = VectorXd::Zero(k);
        for (Eigen::Index i = j; i < n; ++i) {
          const double aij = a(i, j);
          // w = nu_i + a_ij x'B_j, the structural residual with row j's fit added back.
          const VectorXd w = u * a.row(i).transpose() + aij * (design.x * b.row(j).transpose());
          const VectorXd wt = sig2.col(i).array().inverse();
          const MatrixXd xw = design.x.array().colwise() * wt.array();
          g.precision += aij * aij * design.x.transpose() * xw;
          g.linear += aij * xw.transpose() * w;
        }
        b.row(j) = draw_mvn_from_precision(g, rng).transpose();
      }
      const MatrixXd u = design.y - design.x * b.transpose();
      // Step 2: rows of A.
      for (Eigen::Index i = 1; i < n; ++i) {
        const MatrixXd reg = -u.leftCols(i);
        arows[i] = draw_regression(reg, u.col(i), sig2.col(i).array().inverse(),
                                   VectorXd::Constant(i, pr.c_a), rng);
      }
      a = unit_lower_rows(arows, n);
      const MatrixXd nu = u * a.transpose();  // structural shocks
      for (Eigen::Index i = 0; i < n; ++i) {
        const VectorXd ystar = transform_residuals(nu.col(i));
        VectorXd logk2(t);
        for (Eigen::Index s = 0; s < t; ++s) logk2(s) = 2.0 * std::log(static_cast<double>(kappa(s, i)));
        // Step 3: mixture indicators given kappa.
        SvPath path{h.col(i) + logk2, phi2(i)};
        const MixtureIndicators ind = draw_mixture_indicators(ystar, path, rng);
        // Step 4: outlier states on the grid 1..S_max.
        if (pr.outliers) {
          for (Eigen::Index s = 0; s < t; ++s) {
            const KscComponent& c = kKscMixture[ind.states(s) - 1];
            std::vector<double> w(smax);
            double mx = -INFINITY;
            for (int g = 1; g <= smax; ++g) {
              const double prior = g == 1 ? 1.0 - pi(i) : pi(i) / static_cast<double>(smax - 1);
              const double e = (ystar(s) - h(s, i) - 2.0 * std::log(static_cast<double>(g)) - c.mean);
              w[g - 1] = std::log(std::max(prior, 1e-300)) - 0.5 * e * e / c.variance;
              mx = std::max(mx, w[g - 1]);
            }
            for (double& v : w) v = std::exp(v - mx);
            kappa(s, i) = rng.categorical(w.data(), smax) + 1;
            logk2(s) = 2.0 * std::log(static_cast<double>(kappa(s, i)));
          }
          // Step 5: outlier probability.
          const auto [pa, pb] = outlier_probability_posterior(alpha_pi, beta_pi, kappa.col(i));
          pi(i) = rng.beta(pa, pb);
        }
        // Step 6: log-volatility path with the outlier offset.
        hprior.initial_mean = std::log(s2(i));
        h.col(i) = draw_log_vol_path(ystar, ind, phi2(i), hprior, rng, &logk2);
        // Step 7: innovation variance.
        const double ss = (h.col(i).tail(t - 1) - h.col(i).head(t - 1)).squaredNorm();
        phi2(i) = draw_inverse_gamma(d_phi + 0.5 * static_cast<double>(t), s_phi + 0.5 * ss, rng);
      }
    } catch (const NumericalError& e) {
      throw NumericalError("VAR-SVOt Gibbs iteration " + std::to_string(it) + ": " + e.what());
    }
    post.kappa_min = std::min(post.kappa_min, kappa.minCoeff());
    post.kappa_max = std::max(post.kappa_max, kappa.maxCoeff());
    if (!spec.mcmc.keep(it)) continue;
    post.coefficients_mean += b;
    post.log_var_mean += h;
    post.outlier_prob_mean += pi;
    const MatrixXd a = unit_lower_rows(arows, n);
    const MatrixXd ainv = a.triangularView<Eigen::UnitLower>().solve(MatrixXd::Identity(n, n));
    VectorXd var(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      int kap = 1;
      if (pr.outliers && rng.uniform() < pi(i)) kap = 2 + static_cast<int>(rng.uniform() * (smax - 1));
      kap = std::min(kap, smax);
      var(i) = std::exp(h(t - 1, i)) * kap * kap;
    }
    PredictiveDraw d;
    d.coefficients = b;
    d.covariance = ainv * var.asDiagonal() * ainv.transpose();
    post.predictive.push_back(std::move(d));
    ++post.draws;
  }
  post.last_kappa = kappa;
  const double inv = 1.0 / std::max(post.draws, 1);
  post.coefficients_mean *= inv;
  post.log_var_mean *= inv;
  post.outlier_prob_mean *= inv;
  return post;
}

}  // namespace avpvar
