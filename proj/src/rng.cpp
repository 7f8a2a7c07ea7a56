#include "avpvar/rng.hpp"

#include <boost/random/beta_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace avpvar {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

SeededStream::SeededStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32)};
  engine_.seed(seq);
}

SeededStream SeededStream::substream(std::uint64_t tag) const {
  return SeededStream(seed_, stream_key(stream_id_, tag));
}

std::uint64_t stream_key(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
  std::uint64_t h = splitmix64(a);
  h = splitmix64(h ^ b);
  h = splitmix64(h ^ c);
  h = splitmix64(h ^ d);
  return h;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

double SeededStream::uniform() {
  boost::random::uniform_01<double> dist;
  double u = dist(engine_);
  while (u <= 0.0 || u >= 1.0) u = dist(engine_);
  return u;
}

double SeededStream::normal() {
  boost::random::normal_distribution<double> dist(0.0, 1.0);
  return dist(engine_);
}

VectorXd SeededStream::normal_vector(Eigen::Index n) {
  VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = normal();
  return z;
}

double SeededStream::gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) throw std::domain_error("gamma: parameters must be positive");
  boost::random::gamma_distribution<double> dist(shape, scale);
  double g = dist(engine_);
  // Very small shapes underflow; keep draws strictly positive.
  if (!(g > 0.0)) g = std::numeric_limits<double>::min();
  return g;
}

double SeededStream::beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("beta: parameters must be positive");
  const double x = gamma(a, 1.0);
  const double y = gamma(b, 1.0);
  return x / (x + y);
}

int SeededStream::categorical(const double* weights, int count) {
  double total = 0.0;
  for (int i = 0; i < count; ++i) total += weights[i];
  const double u = uniform() * total;
  double acc = 0.0;
  for (int i = 0; i < count; ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  for (int i = count - 1; i >= 0; --i)
    if (weights[i] > 0.0) return i;
  return count - 1;
}

VectorXd posterior_mean(const GaussianPosteriorSpec& spec) {
  const CholeskyResult c = jittered_cholesky(spec.precision);
  const auto l = c.lower.triangularView<Eigen::Lower>();
  return l.transpose().solve(l.solve(spec.linear));
}

VectorXd draw_mvn_from_precision(const GaussianPosteriorSpec& spec, const VectorXd& z) {
  const CholeskyResult c = jittered_cholesky(spec.precision);
  const auto l = c.lower.triangularView<Eigen::Lower>();
  VectorXd w = l.solve(spec.linear);
  return l.transpose().solve(w + z);
}

VectorXd draw_mvn_from_precision(const GaussianPosteriorSpec& spec, SeededStream& rng) {
  return draw_mvn_from_precision(spec, rng.normal_vector(spec.precision.rows()));
}

double draw_inverse_gamma(double shape, double scale, SeededStream& rng) {
  if (!(shape > 0.0) || !(scale > 0.0))
    throw std::domain_error("inverse gamma: shape and scale must be positive");
  const double g = rng.gamma(shape, 1.0 / scale);
  const double v = 1.0 / g;
  return std::isfinite(v) ? v : std::numeric_limits<double>::max();
}

MatrixXd draw_inverse_wishart(double dof, const MatrixXd& scale, SeededStream& rng) {
  const Eigen::Index d = scale.rows();
  if (!(dof > static_cast<double>(d) - 1.0))
    throw std::domain_error("inverse Wishart: dof must exceed dimension - 1");
  // W ~ Wishart(dof, scale^{-1}) by Bartlett; return W^{-1}.
  const MatrixXd scale_inv = scale.llt().solve(MatrixXd::Identity(d, d));
  const MatrixXd l = jittered_cholesky(0.5 * (scale_inv + scale_inv.transpose())).lower;
  MatrixXd a = MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    a(i, i) = std::sqrt(2.0 * rng.gamma(0.5 * (dof - static_cast<double>(i)), 1.0));
    for (Eigen::Index j = 0; j < i; ++j) a(i, j) = rng.normal();
  }
  const MatrixXd la = l * a;
  const MatrixXd w = la * la.transpose();
  MatrixXd out = w.llt().solve(MatrixXd::Identity(d, d));
  return 0.5 * (out + out.transpose());
}

HalfCauchyScale draw_half_cauchy_scale_update(const HalfCauchyScale& current,
                                              const HalfCauchyContext& context,
                                              SeededStream& rng) {
  constexpr double kFloor = 1e-12;
  constexpr double kCeil = 1e12;
  HalfCauchyScale next;
  const double lambda2 = draw_inverse_gamma(0.5 * (context.count + 1.0),
                                            1.0 / current.aux + 0.5 * context.sum_sq, rng);
  const double l2 = std::clamp(lambda2, kFloor, kCeil);
  next.aux = std::clamp(draw_inverse_gamma(1.0, 1.0 + 1.0 / l2, rng), kFloor, kCeil);
  next.scale = std::sqrt(l2);
  return next;
}

}  // namespace avpvar
