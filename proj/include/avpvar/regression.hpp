#pragma once

#include "avpvar/rng.hpp"
#include "avpvar/stochvol.hpp"

namespace avpvar {

//' Conditional of b in y = X b + e, e_t ~ N(0, 1 / w_t), b ~ N(0, diag(prior_var)).
GaussianPosteriorSpec regression_conditional(const MatrixXd& x, const VectorXd& y,
                                             const VectorXd& weights, const VectorXd& prior_var);

// Exact draw through the precision Cholesky; z is standard normal of length k.
VectorXd draw_regression_cholesky(const MatrixXd& x, const VectorXd& y, const VectorXd& weights,
                                  const VectorXd& prior_var, const VectorXd& z);

// Exact draw by the Bhattacharya-Chakraborty-Mallick scheme, O(T^2 k) when k > T.
// u is standard normal of length k, delta standard normal of length T.
VectorXd draw_regression_fast(const MatrixXd& x, const VectorXd& y, const VectorXd& weights,
                              const VectorXd& prior_var, const VectorXd& u, const VectorXd& delta);

// Picks the cheaper exact algorithm.
VectorXd draw_regression(const MatrixXd& x, const VectorXd& y, const VectorXd& weights,
                         const VectorXd& prior_var, SeededStream& rng);

//' Random-walk coefficients b_t = b_{t-1} + e_t with b_0 = 0, so the increments
//' e_1 = b_1, e_t = b_t - b_{t-1} carry independent N(0, increment_var) priors.
//' States are stacked time-major: index t * k + j.
BandGaussian rw_path_conditional(const MatrixXd& x, const VectorXd& y, const VectorXd& weights,
                                 const VectorXd& increment_var);

// T x k path.
MatrixXd draw_rw_path(const MatrixXd& x, const VectorXd& y, const VectorXd& weights,
                      const VectorXd& increment_var, SeededStream& rng);

VectorXd increments_from_path(const MatrixXd& path);  // time-major
MatrixXd path_from_increments(const VectorXd& increments, Eigen::Index k);

// Row-wise x_t' b_t.
VectorXd path_fit(const MatrixXd& x, const MatrixXd& path);

}  // namespace avpvar
