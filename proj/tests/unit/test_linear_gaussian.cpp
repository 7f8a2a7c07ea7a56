#include "avpvar/kalman.hpp"
#include "avpvar/regression.hpp"

#include <doctest.h>

#include <cmath>

using namespace avpvar;

namespace {

MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, SeededStream& rng) {
  MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

struct Dense {
  MatrixXd cov;
  VectorXd mean;
};

Dense dense_regression(const MatrixXd& x, const VectorXd& y, const VectorXd& w, const VectorXd& pv) {
  const MatrixXd prec = x.transpose() * w.asDiagonal() * x + MatrixXd(pv.cwiseInverse().asDiagonal());
  const MatrixXd cov = prec.inverse();
  return {cov, cov * x.transpose() * w.asDiagonal() * y};
}

// Joint Gaussian of stacked x_0..x_T conditioned on every observation block.
Dense dense_state_space(const RandomWalkStateSpace& m) {
  const Eigen::Index t = m.periods(), d = m.state_dim(), n = (t + 1) * d;
  MatrixXd prior(n, n);
  for (Eigen::Index a = 0; a <= t; ++a)
    for (Eigen::Index b = 0; b <= t; ++b)
      prior.block(a * d, b * d, d, d) = m.p0 + static_cast<double>(std::min(a, b)) * m.q;
  VectorXd mu(n);
  for (Eigen::Index a = 0; a <= t; ++a) mu.segment(a * d, d) = m.m0;
  Eigen::Index rows = 0;
  for (const auto& z : m.z) rows += z.rows();
  MatrixXd h = MatrixXd::Zero(rows, n), r = MatrixXd::Zero(rows, rows);
  VectorXd y(rows);
  Eigen::Index o = 0;
  for (Eigen::Index s = 0; s < t; ++s) {
    const Eigen::Index k = m.z[s].rows();
    h.block(o, (s + 1) * d, k, d) = m.z[s];
    r.block(o, o, k, k) = m.r[s];
    y.segment(o, k) = m.y[s];
    o += k;
  }
  const MatrixXd s = h * prior * h.transpose() + r;
  const MatrixXd gain = prior * h.transpose() * s.inverse();
  return {prior - gain * h * prior, mu + gain * (y - h * mu)};
}

RandomWalkStateSpace random_model(Eigen::Index t, Eigen::Index d, SeededStream& rng) {
  RandomWalkStateSpace m;
  m.m0 = rng.normal_vector(d);
  const MatrixXd a = random_matrix(d, d, rng);
  m.p0 = a * a.transpose() + MatrixXd::Identity(d, d);
  const MatrixXd b = random_matrix(d, d, rng);
  m.q = 0.3 * (b * b.transpose()) + 0.1 * MatrixXd::Identity(d, d);
  for (Eigen::Index s = 0; s < t; ++s) {
    const Eigen::Index k = s == 2 ? 0 : 1 + s % 2;  // one period without data
    m.z.push_back(random_matrix(k, d, rng));
    const MatrixXd c = random_matrix(k, k, rng);
    m.r.push_back(c * c.transpose() + 0.5 * MatrixXd::Identity(k, k));
    m.y.push_back(rng.normal_vector(k));
  }
  return m;
}

VectorXd stack(const MatrixXd& draw) {
  VectorXd v(draw.size());
  for (Eigen::Index a = 0; a < draw.rows(); ++a) v.segment(a * draw.cols(), draw.cols()) = draw.row(a).transpose();
  return v;
}

}  // namespace

TEST_CASE("regression conditional matches the dense posterior") {
  SeededStream rng(1, 1);
  const MatrixXd x = random_matrix(12, 4, rng);
  const VectorXd y = rng.normal_vector(12);
  const VectorXd w = (rng.normal_vector(12).array().square() + 0.2).matrix();
  const VectorXd pv = (VectorXd(4) << 0.5, 2.0, 1e-3, 10.0).finished();
  const Dense d = dense_regression(x, y, w, pv);
  const GaussianPosteriorSpec g = regression_conditional(x, y, w, pv);
  CHECK((g.precision.inverse() - d.cov).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((posterior_mean(g) - d.mean).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("Cholesky and fast regression draws are exact affine maps") {
  SeededStream rng(2, 1);
  for (const auto& [t, k] : {std::pair<Eigen::Index, Eigen::Index>{15, 4}, {6, 20}}) {
    const MatrixXd x = random_matrix(t, k, rng);
    const VectorXd y = rng.normal_vector(t);
    const VectorXd w = (rng.normal_vector(t).array().square() + 0.3).matrix();
    const VectorXd pv = (rng.normal_vector(k).array().square() + 0.05).matrix();
    const Dense d = dense_regression(x, y, w, pv);

    const VectorXd m = draw_regression_cholesky(x, y, w, pv, VectorXd::Zero(k));
    CHECK((m - d.mean).cwiseAbs().maxCoeff() < 1e-8);
    MatrixXd cov = MatrixXd::Zero(k, k);
    for (Eigen::Index j = 0; j < k; ++j) {
      const VectorXd c = draw_regression_cholesky(x, y, w, pv, VectorXd::Unit(k, j)) - m;
      cov += c * c.transpose();
    }
    CHECK((cov - d.cov).cwiseAbs().maxCoeff() < 1e-8);

    const VectorXd mf = draw_regression_fast(x, y, w, pv, VectorXd::Zero(k), VectorXd::Zero(t));
    CHECK((mf - d.mean).cwiseAbs().maxCoeff() < 1e-8);
    MatrixXd covf = MatrixXd::Zero(k, k);
    for (Eigen::Index j = 0; j < k + t; ++j) {
      const VectorXd u = j < k ? VectorXd(VectorXd::Unit(k, j)) : VectorXd(VectorXd::Zero(k));
      const VectorXd dl = j < k ? VectorXd(VectorXd::Zero(t)) : VectorXd(VectorXd::Unit(t, j - k));
      const VectorXd c = draw_regression_fast(x, y, w, pv, u, dl) - mf;
      covf += c * c.transpose();
    }
    CHECK((covf - d.cov).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("random-walk path conditional matches the dense posterior") {
  SeededStream rng(3, 1);
  const Eigen::Index t = 6, k = 2, n = t * k;
  const MatrixXd x = random_matrix(t, k, rng);
  const VectorXd y = rng.normal_vector(t);
  const VectorXd w = (rng.normal_vector(t).array().square() + 0.5).matrix();
  const VectorXd iv = (rng.normal_vector(n).array().square() + 0.1).matrix();
  // path = L e with L the cumulative-sum map on time-major stacking
  MatrixXd l = MatrixXd::Zero(n, n);
  for (Eigen::Index a = 0; a < t; ++a)
    for (Eigen::Index b = 0; b <= a; ++b)
      for (Eigen::Index j = 0; j < k; ++j) l(a * k + j, b * k + j) = 1.0;
  const MatrixXd prior = l * iv.asDiagonal() * l.transpose();
  MatrixXd h = MatrixXd::Zero(t, n);
  for (Eigen::Index a = 0; a < t; ++a) h.block(a, a * k, 1, k) = x.row(a);
  const MatrixXd prec = prior.inverse() + h.transpose() * w.asDiagonal() * h;
  const VectorXd mean = prec.ldlt().solve(h.transpose() * w.asDiagonal() * y);

  const BandGaussian g = rw_path_conditional(x, y, w, iv);
  CHECK(g.precision.bandwidth() == k);
  CHECK((g.precision.dense() - prec).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((band_gaussian_mean(g) - mean).cwiseAbs().maxCoeff() < 1e-8);

  const MatrixXd path = path_from_increments(rng.normal_vector(n), k);
  CHECK((path_from_increments(increments_from_path(path), k) - path).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(path_fit(x, path)(3) == doctest::Approx(x.row(3).dot(path.row(3))));
  CHECK_THROWS(rw_path_conditional(x, y, w, VectorXd::Ones(n - 1)));
}

TEST_CASE("square-root Kalman filter matches dense conditioning") {
  SeededStream rng(4, 1);
  const RandomWalkStateSpace m = random_model(5, 3, rng);
  const FilteredMoments f = sqrt_kalman_filter(m);
  REQUIRE(f.mean.size() == 6);
  for (Eigen::Index s = 0; s <= 5; ++s) {
    RandomWalkStateSpace part = m;
    part.z.resize(static_cast<std::size_t>(s));
    part.r.resize(static_cast<std::size_t>(s));
    part.y.resize(static_cast<std::size_t>(s));
    const Dense d = dense_state_space(part);
    const VectorXd mean = d.mean.segment(s * 3, 3);
    const MatrixXd cov = d.cov.block(s * 3, s * 3, 3, 3);
    const MatrixXd p = f.sqrt_cov[s] * f.sqrt_cov[s].transpose();
    CHECK((f.mean[s] - mean).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((p - cov).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("Carter-Kohn draw is the exact joint smoothing distribution") {
  SeededStream rng(5, 1);
  const Eigen::Index t = 5, d = 3, n = (t + 1) * d;
  const RandomWalkStateSpace m = random_model(t, d, rng);
  const Dense oracle = dense_state_space(m);
  const VectorXd mean = stack(carter_kohn(m, MatrixXd::Zero(t + 1, d)));
  CHECK((mean - oracle.mean).cwiseAbs().maxCoeff() < 1e-8);
  MatrixXd cov = MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i <= t; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      MatrixXd z = MatrixXd::Zero(t + 1, d);
      z(i, j) = 1.0;
      const VectorXd c = stack(carter_kohn(m, z)) - mean;
      cov += c * c.transpose();
    }
  CHECK((cov - oracle.cov).cwiseAbs().maxCoeff() < 1e-8);
}
