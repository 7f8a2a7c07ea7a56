#include "avpvar/benchmarks.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace avpvar {

namespace {

MatrixXd ridge_inverse(const MatrixXd& a) {
  Eigen::LDLT<MatrixXd> ldlt(a);
  if (ldlt.info() == Eigen::Success && ldlt.isPositive() && ldlt.rcond() > 1e-12)
    return ldlt.solve(MatrixXd::Identity(a.rows(), a.cols()));
  MatrixXd b = a;
  b.diagonal().array() += 1e-6 * std::max(a.diagonal().mean(), 1.0);
  return b.ldlt().solve(MatrixXd::Identity(a.rows(), a.cols()));
}

// Unit lower-triangular A from the stacked free elements (row-wise below the diagonal).
MatrixXd unit_lower(const VectorXd& a, Eigen::Index n) {
  MatrixXd m = MatrixXd::Identity(n, n);
  Eigen::Index idx = 0;
  for (Eigen::Index i = 1; i < n; ++i)
    for (Eigen::Index j = 0; j < i; ++j) m(i, j) = a(idx++);
  return m;
}

MatrixXd increment_cross(const MatrixXd& states) {
  const MatrixXd d = states.bottomRows(states.rows() - 1) - states.topRows(states.rows() - 1);
  return d.transpose() * d;
}

}  // namespace

TvpEbPosterior fit_tvp_var_eb(const MatrixXd& panel, const BenchmarkSpec& spec,
                              const std::vector<int>& ordering, const TvpEbPriors& priors) {
  spec.mcmc.validate();
  const Eigen::Index n = panel.cols();
  std::vector<int> ord = ordering;
  if (ord.empty()) {
    ord.resize(n);
    std::iota(ord.begin(), ord.end(), 0);
  }
  if (static_cast<Eigen::Index>(ord.size()) != n) throw std::invalid_argument("TVP-VAR-EB: ordering size");
  MatrixXd yp(panel.rows(), n);
  for (Eigen::Index i = 0; i < n; ++i) yp.col(i) = panel.col(ord[i]);

  const int p = spec.p;
  const VarDesign design = build_design(yp, p);
  const Eigen::Index t = design.y.rows();
  const Eigen::Index k = design.x.cols();
  const Eigen::Index kk = n * k;
  const Eigen::Index na = n * (n - 1) / 2;

  // Training-sample OLS for the initial-state priors.
  const Eigen::Index train_rows = std::min<Eigen::Index>(spec.training_size, yp.rows());
  const VarDesign tr = build_design(yp.topRows(std::max<Eigen::Index>(train_rows, p + 1)), p);
  const MatrixXd b_ols = ols_coefficients(tr.x, tr.y);
  const MatrixXd e_ols = tr.y - tr.x * b_ols;
  MatrixXd sigma_ols = e_ols.transpose() * e_ols / static_cast<double>(std::max<Eigen::Index>(tr.y.rows(), 1));
  sigma_ols.diagonal().array() += 1e-8;
  const MatrixXd xtx_inv = ridge_inverse(tr.x.transpose() * tr.x);
  MatrixXd v_beta(kk, kk);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) v_beta.block(i * k, j * k, k, k) = sigma_ols(i, j) * xtx_inv;
  const VectorXd beta0 = Eigen::Map<const VectorXd>(b_ols.data(), kk);
  // Sigma = L D L' with unit lower L, so A = L^{-1} gives A Sigma A' = D.
  const MatrixXd chol = jittered_cholesky(sigma_ols).lower;
  const VectorXd dvec = chol.diagonal().array().square();
  const MatrixXd lmat = chol * chol.diagonal().asDiagonal().inverse();
  const MatrixXd a_full = lmat.triangularView<Eigen::UnitLower>().solve(MatrixXd::Identity(n, n));
  VectorXd a0(na);
  {
    Eigen::Index idx = 0;
    for (Eigen::Index i = 1; i < n; ++i)
      for (Eigen::Index j = 0; j < i; ++j) a0(idx++) = a_full(i, j);
  }
  const VectorXd h0 = dvec.array().max(1e-8).log();

  const double nu_q = priors.nu_q > 0 ? priors.nu_q : static_cast<double>(kk + 2);
  const double nu_phi = priors.nu_phi > 0 ? priors.nu_phi : static_cast<double>(n + 2);
  const double nu_omega = priors.nu_omega > 0 ? priors.nu_omega : static_cast<double>(n + 2);
  const MatrixXd s_q = priors.s_q * MatrixXd::Identity(kk, kk);
  const MatrixXd s_phi = priors.s_phi * MatrixXd::Identity(std::max<Eigen::Index>(na, 1), std::max<Eigen::Index>(na, 1));
  const MatrixXd s_omega = priors.s_omega * MatrixXd::Identity(n, n);

  SeededStream rng(spec.seed, spec.stream);
  MatrixXd beta = beta0.transpose().replicate(t + 1, 1);  // rows 0..T
  MatrixXd a = na > 0 ? MatrixXd(a0.transpose().replicate(t + 1, 1)) : MatrixXd(t + 1, 0);
  MatrixXd h = h0.transpose().replicate(t + 1, 1);
  MatrixXd q = s_q;
  MatrixXd phi = s_phi;
  MatrixXd omega = s_omega;

  TvpEbPosterior post;
  post.beta_mean = MatrixXd::Zero(t, kk);
  post.log_var_mean = MatrixXd::Zero(t, n);
  post.q_dof = nu_q + static_cast<double>(t);

  RandomWalkStateSpace ss_beta;
  ss_beta.m0 = beta0;
  ss_beta.p0 = 4.0 * v_beta;
  ss_beta.z.resize(t);
  ss_beta.r.resize(t);
  ss_beta.y.resize(t);
  RandomWalkStateSpace ss_a;
  if (na > 0) {
    ss_a.m0 = a0;
    ss_a.p0 = 4.0 * MatrixXd::Identity(na, na);
    ss_a.z.resize(t);
    ss_a.r.resize(t);
    ss_a.y.resize(t);
  }
  RandomWalkStateSpace ss_h;
  ss_h.m0 = h0;
  ss_h.p0 = MatrixXd::Identity(n, n);
  ss_h.z.assign(t, MatrixXd::Identity(n, n));
  ss_h.r.resize(t);
  ss_h.y.resize(t);

  for (int it = 1; it <= spec.mcmc.iterations; ++it) {
    try {
      // Coefficients.
      for (Eigen::Index s = 0; s < t; ++s) {
        const MatrixXd at = unit_lower(na > 0 ? VectorXd(a.row(s + 1).transpose()) : VectorXd(), n);
        MatrixXd z(n, kk);
        for (Eigen::Index j = 0; j < n; ++j) z.middleCols(j * k, k) = at.col(j) * design.x.row(s);
        ss_beta.z[s] = z;
        ss_beta.y[s] = at * design.y.row(s).transpose();
        ss_beta.r[s] = h.row(s + 1).array().exp().matrix().asDiagonal();
      }
      ss_beta.q = q;
      beta = carter_kohn(ss_beta, rng);
      q = draw_inverse_wishart(nu_q + static_cast<double>(t), s_q + increment_cross(beta), rng);

      // Reduced-form residuals.
      MatrixXd yhat(t, n);
      for (Eigen::Index s = 0; s < t; ++s)
        for (Eigen::Index j = 0; j < n; ++j)
          yhat(s, j) = design.y(s, j) - design.x.row(s).dot(beta.row(s + 1).segment(j * k, k));

      // Contemporaneous relations.
      if (na > 0) {
        for (Eigen::Index s = 0; s < t; ++s) {
          MatrixXd z = MatrixXd::Zero(n - 1, na);
          Eigen::Index idx = 0;
          for (Eigen::Index i = 1; i < n; ++i)
            for (Eigen::Index j = 0; j < i; ++j) z(i - 1, idx++) = -yhat(s, j);
          ss_a.z[s] = z;
          ss_a.y[s] = yhat.row(s).tail(n - 1).transpose();
          ss_a.r[s] = h.row(s + 1).tail(n - 1).array().exp().matrix().asDiagonal();
        }
        ss_a.q = phi;
        a = carter_kohn(ss_a, rng);
        phi = draw_inverse_wishart(nu_phi + static_cast<double>(t), s_phi + increment_cross(a), rng);
      }

      // Log-volatilities through the mixture representation.
      for (Eigen::Index s = 0; s < t; ++s) {
        const MatrixXd at = unit_lower(na > 0 ? VectorXd(a.row(s + 1).transpose()) : VectorXd(), n);
        const VectorXd e = at * yhat.row(s).transpose();
        const VectorXd ystar = transform_residuals(e);
        const MatrixXd prob = mixture_probabilities(ystar, h.row(s + 1).transpose());
        VectorXd obs(n);
        VectorXd var(n);
        for (Eigen::Index i = 0; i < n; ++i) {
          double w[7];
          for (int j = 0; j < 7; ++j) w[j] = prob(i, j);
          const KscComponent& c = kKscMixture[rng.categorical(w, 7)];
          obs(i) = ystar(i) - c.mean;
          var(i) = c.variance;
        }
        ss_h.y[s] = obs;
        ss_h.r[s] = var.asDiagonal();
      }
      ss_h.q = omega;
      h = carter_kohn(ss_h, rng);
      omega = draw_inverse_wishart(nu_omega + static_cast<double>(t), s_omega + increment_cross(h), rng);
    } catch (const NumericalError& e) {
      throw NumericalError("TVP-VAR-EB Gibbs iteration " + std::to_string(it) + ": " + e.what());
    }
    if (!spec.mcmc.keep(it)) continue;
    post.beta_mean += beta.bottomRows(t);
    post.log_var_mean += h.bottomRows(t);
    // Predictive draw at T in the permuted order, then mapped back.
    const MatrixXd at = unit_lower(na > 0 ? VectorXd(a.row(t).transpose()) : VectorXd(), n);
    const MatrixXd ainv = at.triangularView<Eigen::UnitLower>().solve(MatrixXd::Identity(n, n));
    const MatrixXd cov_p = ainv * h.row(t).array().exp().matrix().asDiagonal() * ainv.transpose();
    PredictiveDraw d;
    d.coefficients = MatrixXd::Zero(n, k);
    d.covariance = MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const VectorXd row = beta.row(t).segment(i * k, k).transpose();
      d.coefficients(ord[i], 0) = row(0);
      for (int l = 0; l < p; ++l)
        for (Eigen::Index j = 0; j < n; ++j) d.coefficients(ord[i], 1 + l * n + ord[j]) = row(1 + l * n + j);
      for (Eigen::Index j = 0; j < n; ++j) d.covariance(ord[i], ord[j]) = cov_p(i, j);
    }
    post.predictive.push_back(std::move(d));
    ++post.draws;
  }
  const double inv = 1.0 / std::max(post.draws, 1);
  post.beta_mean *= inv;
  post.log_var_mean *= inv;
  return post;
}

}  // namespace avpvar
