#include "avpvar/horseshoe.hpp"

#include <cmath>
#include <stdexcept>

namespace avpvar {

HorseshoeState HorseshoeState::initial(Eigen::Index size) {
  HorseshoeState s;
  s.local = VectorXd::Ones(size);
  s.local_aux = VectorXd::Ones(size);
  return s;
}

bool HorseshoeState::valid() const {
  auto ok = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!ok(global) || !ok(global_aux)) return false;
  for (Eigen::Index i = 0; i < local.size(); ++i)
    if (!ok(local(i)) || !ok(local_aux(i))) return false;
  return true;
}

VectorXd prior_variances(const HorseshoeState& state) {
  const double tau2 = state.global * state.global;
  return (state.local.array().square() * tau2).max(kPriorVarianceFloor);
}

HorseshoeState update(const HorseshoeState& state, const VectorXd& coefficients, SeededStream& rng) {
  if (coefficients.size() != state.size())
    throw std::invalid_argument("horseshoe update: coefficient length does not match state");
  HorseshoeState next = state;
  const double tau2 = state.global * state.global;
  for (Eigen::Index l = 0; l < coefficients.size(); ++l) {
    const HalfCauchyContext ctx{coefficients(l) * coefficients(l) / tau2, 1.0};
    const HalfCauchyScale s =
        draw_half_cauchy_scale_update({state.local(l), state.local_aux(l)}, ctx, rng);
    next.local(l) = s.scale;
    next.local_aux(l) = s.aux;
  }
  HalfCauchyContext global_ctx{0.0, static_cast<double>(coefficients.size())};
  global_ctx.sum_sq = (coefficients.array().square() / next.local.array().square()).sum();
  const HalfCauchyScale g =
      draw_half_cauchy_scale_update({state.global, state.global_aux}, global_ctx, rng);
  next.global = g.scale;
  next.global_aux = g.aux;
  return next;
}

}  // namespace avpvar
