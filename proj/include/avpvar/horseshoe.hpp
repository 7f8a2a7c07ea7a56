#pragma once

#include "avpvar/rng.hpp"

namespace avpvar {

inline constexpr double kPriorVarianceFloor = 1e-12;

//' Horseshoe state for one block of coefficients:
//' b_l ~ N(0, psi_l^2 tau^2), psi_l, tau ~ C+(0, 1), with the
//' inverse-gamma auxiliaries nu_l (local) and xi (global).
struct HorseshoeState {
  VectorXd local;      // psi_l
  VectorXd local_aux;  // nu_l
  double global = 1.0;      // tau
  double global_aux = 1.0;  // xi

  static HorseshoeState initial(Eigen::Index size);
  Eigen::Index size() const { return local.size(); }
  bool valid() const;
};

VectorXd prior_variances(const HorseshoeState& state);

// One sweep: every local scale given its coefficient, then the global scale.
HorseshoeState update(const HorseshoeState& state, const VectorXd& coefficients, SeededStream& rng);

}  // namespace avpvar
