#include "avpvar/linalg.hpp"

#include <cmath>
#include <sstream>

namespace avpvar {

namespace {

constexpr double kJitterStart = 1e-10;
constexpr double kJitterMax = 1e-4;

std::string diagnostics(const MatrixXd& a, double last_jitter) {
  std::ostringstream os;
  os << "dimension " << a.rows() << ", diag min " << a.diagonal().minCoeff() << ", diag max "
     << a.diagonal().maxCoeff() << ", last jitter " << last_jitter;
  return os.str();
}

bool band_factor(const BandMatrix& a, double shift, BandMatrix& out) {
  const Eigen::Index n = a.size();
  const Eigen::Index bw = a.bandwidth();
  out = a;
  MatrixXd& l = out.storage();
  if (shift != 0.0) l.row(0).array() += shift;
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = l(0, j);
    const Eigen::Index kmin = std::max<Eigen::Index>(0, j - bw);
    for (Eigen::Index k = kmin; k < j; ++k) d -= l(j - k, k) * l(j - k, k);
    if (!(d > 0.0) || !std::isfinite(d)) return false;
    d = std::sqrt(d);
    l(0, j) = d;
    const Eigen::Index imax = std::min(n - 1, j + bw);
    for (Eigen::Index i = j + 1; i <= imax; ++i) {
      double s = l(i - j, j);
      const Eigen::Index kmin2 = std::max<Eigen::Index>(0, i - bw);
      for (Eigen::Index k = kmin2; k < j; ++k) s -= l(i - k, k) * l(j - k, k);
      l(i - j, j) = s / d;
    }
  }
  return true;
}

}  // namespace

CholeskyResult jittered_cholesky(const MatrixXd& a) {
  CholeskyResult out;
  Eigen::LLT<MatrixXd> llt(a);
  if (llt.info() == Eigen::Success && llt.matrixL().toDenseMatrix().allFinite()) {
    out.lower = llt.matrixL();
    return out;
  }
  const double scale = std::max(std::abs(a.diagonal().mean()), 1e-300);
  double factor = kJitterStart;
  while (factor <= kJitterMax * (1.0 + 1e-12)) {
    MatrixXd b = a;
    b.diagonal().array() += factor * scale;
    llt.compute(b);
    if (llt.info() == Eigen::Success) {
      out.lower = llt.matrixL();
      if (out.lower.allFinite()) {
        out.jitter = factor * scale;
        return out;
      }
    }
    factor *= 10.0;
  }
  throw NumericalError("Cholesky failed after maximum jitter: " + diagnostics(a, kJitterMax * scale));
}

BandMatrix::BandMatrix(Eigen::Index n, Eigen::Index bandwidth)
    : n_(n), bw_(bandwidth), band_(MatrixXd::Zero(bandwidth + 1, n)) {}

void BandMatrix::add(Eigen::Index i, Eigen::Index j, double v) {
  if (i < j) std::swap(i, j);
  band_(i - j, j) += v;
}

double BandMatrix::operator()(Eigen::Index i, Eigen::Index j) const {
  if (i < j) std::swap(i, j);
  if (i - j > bw_) return 0.0;
  return band_(i - j, j);
}

MatrixXd BandMatrix::dense() const {
  MatrixXd d = MatrixXd::Zero(n_, n_);
  for (Eigen::Index j = 0; j < n_; ++j)
    for (Eigen::Index k = 0; k <= bw_ && j + k < n_; ++k) {
      d(j + k, j) = band_(k, j);
      d(j, j + k) = band_(k, j);
    }
  return d;
}

VectorXd BandCholesky::solve_lower(const VectorXd& b) const {
  const Eigen::Index n = lower.size();
  const Eigen::Index bw = lower.bandwidth();
  const MatrixXd& l = lower.storage();
  VectorXd x = b;
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = x(i);
    for (Eigen::Index k = std::max<Eigen::Index>(0, i - bw); k < i; ++k) s -= l(i - k, k) * x(k);
    x(i) = s / l(0, i);
  }
  return x;
}

VectorXd BandCholesky::solve_upper(const VectorXd& b) const {
  const Eigen::Index n = lower.size();
  const Eigen::Index bw = lower.bandwidth();
  const MatrixXd& l = lower.storage();
  VectorXd x = b;
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    double s = x(i);
    for (Eigen::Index k = i + 1; k <= std::min(n - 1, i + bw); ++k) s -= l(k - i, i) * x(k);
    x(i) = s / l(0, i);
  }
  return x;
}

BandCholesky band_cholesky(const BandMatrix& a) {
  BandCholesky out;
  if (band_factor(a, 0.0, out.lower)) return out;
  const double scale = std::max(std::abs(a.storage().row(0).mean()), 1e-300);
  for (double factor = kJitterStart; factor <= kJitterMax * (1.0 + 1e-12); factor *= 10.0) {
    if (band_factor(a, factor * scale, out.lower)) {
      out.jitter = factor * scale;
      return out;
    }
  }
  std::ostringstream os;
  os << "banded Cholesky failed after maximum jitter: dimension " << a.size() << ", bandwidth "
     << a.bandwidth() << ", diag min " << a.storage().row(0).minCoeff();
  throw NumericalError(os.str());
}

double sample_sd(const VectorXd& x) {
  if (x.size() < 2) return 0.0;
  const double mean = x.mean();
  return std::sqrt((x.array() - mean).square().sum() / static_cast<double>(x.size() - 1));
}

MatrixXd ols_coefficients(const MatrixXd& x, const MatrixXd& y) {
  MatrixXd xtx = x.transpose() * x;
  Eigen::LDLT<MatrixXd> ldlt(xtx);
  if (ldlt.info() == Eigen::Success && ldlt.isPositive() && ldlt.rcond() > 1e-12)
    return ldlt.solve(x.transpose() * y);
  const double ridge = 1e-8 * std::max(xtx.diagonal().mean(), 1e-12);
  xtx.diagonal().array() += ridge;
  return xtx.ldlt().solve(x.transpose() * y);
}

}  // namespace avpvar
