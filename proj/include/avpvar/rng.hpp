#pragma once

#include "avpvar/linalg.hpp"

#include <boost/random/mersenne_twister.hpp>

#include <cstdint>
#include <string>

namespace avpvar {

//' Reproducible random stream identified by (seed, stream id).
//' Distinct stream ids give statistically independent sequences; every draw
//' uses Boost.Random distributions so sequences match across platforms.
class SeededStream {
 public:
  SeededStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // A child stream whose id is derived from this stream's id and a tag.
  SeededStream substream(std::uint64_t tag) const;

  double uniform();  // (0, 1)
  double normal();
  VectorXd normal_vector(Eigen::Index n);
  double gamma(double shape, double scale);
  double beta(double a, double b);
  int categorical(const double* weights, int count);  // weights need not be normalized

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  boost::random::mt19937_64 engine_;
};

// Mixes a structured key into a well-spread stream id.
std::uint64_t stream_key(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0,
                         std::uint64_t d = 0);
// 64-bit FNV-1a of a string, used for name-derived stream tags and config hashes.
std::uint64_t fnv1a(const std::string& text);

// Gaussian N(P^{-1} b, P^{-1}) described by its precision P and linear term b.
struct GaussianPosteriorSpec {
  MatrixXd precision;
  VectorXd linear;
};

VectorXd posterior_mean(const GaussianPosteriorSpec& spec);

// mean + L^{-T} z with L L' = precision; z supplied by the caller.
VectorXd draw_mvn_from_precision(const GaussianPosteriorSpec& spec, const VectorXd& z);
VectorXd draw_mvn_from_precision(const GaussianPosteriorSpec& spec, SeededStream& rng);

double draw_inverse_gamma(double shape, double scale, SeededStream& rng);

// Inverse-Wishart(dof, scale) with E = scale / (dof - dim - 1).
MatrixXd draw_inverse_wishart(double dof, const MatrixXd& scale, SeededStream& rng);

// Gaussian information about a half-Cauchy scale lambda: `count` coefficients
// b_j ~ N(0, lambda^2 s_j) contribute sum_sq = sum b_j^2 / s_j.
struct HalfCauchyContext {
  double sum_sq = 0.0;
  double count = 0.0;
};

// lambda ~ C+(0,1) written as lambda^2 | nu ~ IG(1/2, 1/nu), nu ~ IG(1/2, 1).
struct HalfCauchyScale {
  double scale = 1.0;
  double aux = 1.0;
};

HalfCauchyScale draw_half_cauchy_scale_update(const HalfCauchyScale& current,
                                              const HalfCauchyContext& context,
                                              SeededStream& rng);

}  // namespace avpvar
