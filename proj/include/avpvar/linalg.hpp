#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace avpvar {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Raised when a factorization fails even after the full jitter ladder.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

struct CholeskyResult {
  MatrixXd lower;
  double jitter = 0.0;  // absolute amount added to the diagonal
};

//' Cholesky factor of a symmetric positive-definite matrix.
//' Tries the plain factorization first, then adds 1e-10 * mean(diag), escalating
//' by 10x up to 1e-4 * mean(diag). Throws NumericalError with diagnostics.
CholeskyResult jittered_cholesky(const MatrixXd& a);

// Symmetric band matrix stored by lower diagonals: band(d, j) = A(j + d, j).
class BandMatrix {
 public:
  BandMatrix() = default;
  BandMatrix(Eigen::Index n, Eigen::Index bandwidth);

  Eigen::Index size() const { return n_; }
  Eigen::Index bandwidth() const { return bw_; }

  // Adds v to A(i, j) (and implicitly A(j, i)); requires |i - j| <= bandwidth.
  void add(Eigen::Index i, Eigen::Index j, double v);
  double operator()(Eigen::Index i, Eigen::Index j) const;
  MatrixXd dense() const;

  MatrixXd& storage() { return band_; }
  const MatrixXd& storage() const { return band_; }

 private:
  Eigen::Index n_ = 0;
  Eigen::Index bw_ = 0;
  MatrixXd band_;
};

// Lower band Cholesky factor with the same storage layout.
struct BandCholesky {
  BandMatrix lower;
  double jitter = 0.0;

  VectorXd solve_lower(const VectorXd& b) const;  // L x = b
  VectorXd solve_upper(const VectorXd& b) const;  // L' x = b
  VectorXd solve(const VectorXd& b) const { return solve_upper(solve_lower(b)); }
};

BandCholesky band_cholesky(const BandMatrix& a);

// Sample standard deviation (n - 1 denominator).
double sample_sd(const VectorXd& x);

// Ordinary least squares with a tiny ridge when X'X is singular.
MatrixXd ols_coefficients(const MatrixXd& x, const MatrixXd& y);

}  // namespace avpvar
