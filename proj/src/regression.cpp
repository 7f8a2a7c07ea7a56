#include "avpvar/regression.hpp"

#include <stdexcept>

namespace avpvar {

GaussianPosteriorSpec regression_conditional(const MatrixXd& x, const VectorXd& y,
                                             const VectorXd& weights, const VectorXd& prior_var) {
  GaussianPosteriorSpec spec;
  const MatrixXd xw = x.array().colwise() * weights.array();
  spec.precision = x.transpose() * xw;
  spec.precision.diagonal().array() += prior_var.array().inverse();
  spec.linear = xw.transpose() * y;
  return spec;
}

VectorXd draw_regression_cholesky(const MatrixXd& x, const VectorXd& y, const VectorXd& weights,
                                  const VectorXd& prior_var, const VectorXd& z) {
  return draw_mvn_from_precision(regression_conditional(x, y, weights, prior_var), z);
}

VectorXd draw_regression_fast(const MatrixXd& x, const VectorXd& y, const VectorXd& weights,
                              const VectorXd& prior_var, const VectorXd& u, const VectorXd& delta) {
  const VectorXd sw = weights.array().sqrt();
  const MatrixXd phi = x.array().colwise() * sw.array();
  const VectorXd alpha = y.array() * sw.array();
  const VectorXd d = prior_var;
  const VectorXd ud = u.array() * d.array().sqrt();
  const VectorXd v = phi * ud + delta;
  const MatrixXd phid = phi.array().rowwise() * d.transpose().array();
  MatrixXd m = phid * phi.transpose();
  m.diagonal().array() += 1.0;
  const CholeskyResult c = jittered_cholesky(m);
  const auto l = c.lower.triangularView<Eigen::Lower>();
  const VectorXd w = l.transpose().solve(l.solve(alpha - v));
  return ud + phid.transpose() * w;
}

VectorXd draw_regression(const MatrixXd& x, const VectorXd& y, const VectorXd& weights,
                         const VectorXd& prior_var, SeededStream& rng) {
  const Eigen::Index k = x.cols();
  const Eigen::Index t = x.rows();
  if (k > t) {
    const VectorXd u = rng.normal_vector(k);
    const VectorXd delta = rng.normal_vector(t);
    return draw_regression_fast(x, y, weights, prior_var, u, delta);
  }
  return draw_regression_cholesky(x, y, weights, prior_var, rng.normal_vector(k));
}

BandGaussian rw_path_conditional(const MatrixXd& x, const VectorXd& y, const VectorXd& weights,
                                 const VectorXd& increment_var) {
  const Eigen::Index t = x.rows();
  const Eigen::Index k = x.cols();
  if (increment_var.size() != t * k) throw std::invalid_argument("increment variance length mismatch");
  BandGaussian g{BandMatrix(t * k, k), VectorXd::Zero(t * k)};
  for (Eigen::Index s = 0; s < t; ++s) {
    for (Eigen::Index j = 0; j < k; ++j) {
      const double q = 1.0 / increment_var(s * k + j);
      g.precision.add(s * k + j, s * k + j, q);
      if (s > 0) {
        g.precision.add((s - 1) * k + j, (s - 1) * k + j, q);
        g.precision.add(s * k + j, (s - 1) * k + j, -q);
      }
    }
    for (Eigen::Index a = 0; a < k; ++a) {
      g.linear(s * k + a) += weights(s) * x(s, a) * y(s);
      for (Eigen::Index b = 0; b <= a; ++b) g.precision.add(s * k + a, s * k + b, weights(s) * x(s, a) * x(s, b));
    }
  }
  return g;
}

MatrixXd draw_rw_path(const MatrixXd& x, const VectorXd& y, const VectorXd& weights,
                      const VectorXd& increment_var, SeededStream& rng) {
  const BandGaussian g = rw_path_conditional(x, y, weights, increment_var);
  const VectorXd draw = draw_band_gaussian(g, rng.normal_vector(g.linear.size()));
  MatrixXd path(x.rows(), x.cols());
  for (Eigen::Index s = 0; s < x.rows(); ++s) path.row(s) = draw.segment(s * x.cols(), x.cols()).transpose();
  return path;
}

VectorXd increments_from_path(const MatrixXd& path) {
  const Eigen::Index t = path.rows();
  const Eigen::Index k = path.cols();
  VectorXd e(t * k);
  for (Eigen::Index s = 0; s < t; ++s) {
    const Eigen::RowVectorXd d = s == 0 ? Eigen::RowVectorXd(path.row(0)) : Eigen::RowVectorXd(path.row(s) - path.row(s - 1));
    e.segment(s * k, k) = d.transpose();
  }
  return e;
}

MatrixXd path_from_increments(const VectorXd& increments, Eigen::Index k) {
  const Eigen::Index t = increments.size() / k;
  MatrixXd path(t, k);
  Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(k);
  for (Eigen::Index s = 0; s < t; ++s) {
    acc += increments.segment(s * k, k).transpose();
    path.row(s) = acc;
  }
  return path;
}

VectorXd path_fit(const MatrixXd& x, const MatrixXd& path) { return (x.array() * path.array()).rowwise().sum(); }

}  // namespace avpvar
