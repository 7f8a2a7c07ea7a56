#pragma once

#include "avpvar/rng.hpp"

#include <vector>

namespace avpvar {

//' Random-walk state space with a pre-sample state:
//'   x_0 ~ N(m0, P0),  x_t = x_{t-1} + u_t, u_t ~ N(0, Q),
//'   y_t = Z_t x_t + e_t, e_t ~ N(0, R_t),  t = 1..T.
//' An observation block with zero rows means no data at that t.
struct RandomWalkStateSpace {
  VectorXd m0;
  MatrixXd p0;
  MatrixXd q;
  std::vector<MatrixXd> z;
  std::vector<MatrixXd> r;
  std::vector<VectorXd> y;

  Eigen::Index periods() const { return static_cast<Eigen::Index>(y.size()); }
  Eigen::Index state_dim() const { return m0.size(); }
};

struct FilteredMoments {
  std::vector<VectorXd> mean;      // t = 0..T
  std::vector<MatrixXd> sqrt_cov;  // lower factors S with P = S S'
};

// Conditions N(m, S S') on y = Z x + e, e ~ N(0, R_sqrt R_sqrt'), by one QR of the pre-array.
void sqrt_measurement_update(VectorXd& m, MatrixXd& s, const MatrixXd& z, const MatrixXd& r_sqrt,
                             const VectorXd& y);
// S S' + Q_sqrt Q_sqrt' as one lower factor.
MatrixXd sqrt_add(const MatrixXd& s, const MatrixXd& q_sqrt);

// Lower square root that tolerates PSD input (zero matrices give zero).
MatrixXd psd_sqrt(const MatrixXd& a);

FilteredMoments sqrt_kalman_filter(const RandomWalkStateSpace& model);

// (T+1) x d draw of x_0..x_T; z holds (T+1) x d standard normals.
MatrixXd carter_kohn(const RandomWalkStateSpace& model, const MatrixXd& z);
MatrixXd carter_kohn(const RandomWalkStateSpace& model, SeededStream& rng);

}  // namespace avpvar
