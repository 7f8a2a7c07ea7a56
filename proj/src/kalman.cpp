#include "avpvar/kalman.hpp"

#include <stdexcept>

namespace avpvar {

MatrixXd psd_sqrt(const MatrixXd& a) {
  if (a.size() == 0 || a.cwiseAbs().maxCoeff() == 0.0) return MatrixXd::Zero(a.rows(), a.cols());
  Eigen::LLT<MatrixXd> llt(a);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(a);
  const VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const MatrixXd root = es.eigenvectors() * ev.asDiagonal();
  Eigen::HouseholderQR<MatrixXd> qr(root.transpose());
  return MatrixXd(qr.matrixQR().topRows(a.rows()).triangularView<Eigen::Upper>()).transpose();
}

void sqrt_measurement_update(VectorXd& m, MatrixXd& s, const MatrixXd& z, const MatrixXd& r_sqrt,
                             const VectorXd& y) {
  const Eigen::Index q = z.rows();
  const Eigen::Index d = s.rows();
  if (q == 0) return;
  MatrixXd pre = MatrixXd::Zero(q + d, q + d);
  pre.topLeftCorner(q, q) = r_sqrt;
  pre.topRightCorner(q, d) = z * s;
  pre.bottomRightCorner(d, d) = s;
  Eigen::HouseholderQR<MatrixXd> qr(pre.transpose());
  const MatrixXd post = MatrixXd(qr.matrixQR().triangularView<Eigen::Upper>()).transpose();
  const MatrixXd l11 = post.topLeftCorner(q, q);
  const MatrixXd l21 = post.bottomLeftCorner(d, q);
  const VectorXd innov = y - z * m;
  const VectorXd w = l11.triangularView<Eigen::Lower>().solve(innov);
  if (!w.allFinite()) throw NumericalError("square-root Kalman update: singular innovation covariance");
  m += l21 * w;
  s = post.bottomRightCorner(d, d);
}

MatrixXd sqrt_add(const MatrixXd& s, const MatrixXd& q_sqrt) {
  const Eigen::Index d = s.rows();
  MatrixXd pre(d, 2 * d);
  pre << s, q_sqrt;
  Eigen::HouseholderQR<MatrixXd> qr(pre.transpose());
  return MatrixXd(qr.matrixQR().topRows(d).triangularView<Eigen::Upper>()).transpose();
}

FilteredMoments sqrt_kalman_filter(const RandomWalkStateSpace& model) {
  const Eigen::Index t = model.periods();
  FilteredMoments out;
  out.mean.reserve(t + 1);
  out.sqrt_cov.reserve(t + 1);
  out.mean.push_back(model.m0);
  out.sqrt_cov.push_back(psd_sqrt(model.p0));
  const MatrixXd q_sqrt = psd_sqrt(model.q);
  for (Eigen::Index s = 0; s < t; ++s) {
    VectorXd m = out.mean.back();
    MatrixXd sq = sqrt_add(out.sqrt_cov.back(), q_sqrt);
    sqrt_measurement_update(m, sq, model.z[s], psd_sqrt(model.r[s]), model.y[s]);
    out.mean.push_back(std::move(m));
    out.sqrt_cov.push_back(std::move(sq));
  }
  return out;
}

MatrixXd carter_kohn(const RandomWalkStateSpace& model, const MatrixXd& z) {
  const Eigen::Index t = model.periods();
  const Eigen::Index d = model.state_dim();
  if (z.rows() != t + 1 || z.cols() != d) throw std::invalid_argument("Carter-Kohn: normal draws shape");
  const FilteredMoments f = sqrt_kalman_filter(model);
  const MatrixXd q_sqrt = psd_sqrt(model.q);
  const MatrixXd identity = MatrixXd::Identity(d, d);
  MatrixXd x(t + 1, d);
  x.row(t) = (f.mean[t] + f.sqrt_cov[t] * z.row(t).transpose()).transpose();
  for (Eigen::Index s = t - 1; s >= 0; --s) {
    VectorXd m = f.mean[s];
    MatrixXd sq = f.sqrt_cov[s];
    sqrt_measurement_update(m, sq, identity, q_sqrt, x.row(s + 1).transpose());
    x.row(s) = (m + sq * z.row(s).transpose()).transpose();
  }
  return x;
}

MatrixXd carter_kohn(const RandomWalkStateSpace& model, SeededStream& rng) {
  const Eigen::Index t = model.periods();
  const Eigen::Index d = model.state_dim();
  MatrixXd z(t + 1, d);
  for (Eigen::Index s = 0; s <= t; ++s)
    for (Eigen::Index j = 0; j < d; ++j) z(s, j) = rng.normal();
  return carter_kohn(model, z);
}

}  // namespace avpvar
