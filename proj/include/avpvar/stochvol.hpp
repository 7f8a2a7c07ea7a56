#pragma once

#include "avpvar/linalg.hpp"
#include "avpvar/rng.hpp"

#include <array>

namespace avpvar {

struct KscComponent {
  double weight;
  double mean;  // mean of log(chi^2_1) component, the -1.2704 offset already applied
  double variance;
};

// Seven-component normal mixture for log(chi^2_1) (Kim, Shephard and Chib 1998, Table 4).
inline constexpr double kKscOffset = 1.2704;
inline constexpr std::array<KscComponent, 7> kKscMixture{{
    {0.00730, -10.12999 - kKscOffset, 5.79596},
    {0.10556, -3.97281 - kKscOffset, 2.61369},
    {0.00002, -8.56686 - kKscOffset, 5.17950},
    {0.04395, 2.77786 - kKscOffset, 0.16735},
    {0.34001, 0.61942 - kKscOffset, 0.64009},
    {0.24566, 1.79518 - kKscOffset, 0.34023},
    {0.25750, -1.08819 - kKscOffset, 1.26261},
}};

inline constexpr double kSvOffset = 1e-6;

struct SvPrior {
  double initial_mean = 0.0;      // mean of h_1
  double initial_variance = 1.0;  // V_h
  double a0 = 1.0;
  double b0 = 0.01;
};

//' Random-walk log-variance path h_t with innovation variance omega2.
struct SvPath {
  VectorXd log_var;
  double omega2 = 0.1;
};

// States are stored 1..7, matching the component numbering of the table.
struct MixtureIndicators {
  Eigen::VectorXi states;
};

VectorXd transform_residuals(const VectorXd& residuals);

// T x 7 normalized selection probabilities for each t.
MatrixXd mixture_probabilities(const VectorXd& transformed, const VectorXd& log_var);

MixtureIndicators draw_mixture_indicators(const VectorXd& transformed, const SvPath& path,
                                          SeededStream& rng);

// Banded (tridiagonal) Gaussian conditional of h_{1:T}; observations are
// transformed_t = h_t + offset_t + mixture noise.
struct BandGaussian {
  BandMatrix precision;
  VectorXd linear;
};

BandGaussian log_vol_conditional(const VectorXd& transformed, const MixtureIndicators& indicators,
                                 double omega2, const SvPrior& prior,
                                 const VectorXd* offset = nullptr);

VectorXd draw_band_gaussian(const BandGaussian& g, const VectorXd& z);
VectorXd band_gaussian_mean(const BandGaussian& g);

VectorXd draw_log_vol_path(const VectorXd& transformed, const MixtureIndicators& indicators,
                           double omega2, const SvPrior& prior, SeededStream& rng,
                           const VectorXd* offset = nullptr);

struct InverseGammaParams {
  double shape;
  double scale;
};

InverseGammaParams omega2_posterior(const VectorXd& log_var, double a0, double b0);
double update_omega2(const VectorXd& log_var, double a0, double b0, SeededStream& rng);

// Full SV update for one series of residuals: indicators, path, then omega2.
void sv_step(const VectorXd& residuals, SvPath& path, const SvPrior& prior, SeededStream& rng);

}  // namespace avpvar
