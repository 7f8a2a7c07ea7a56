#pragma once

#include "avpvar/avp.hpp"
#include "avpvar/rng.hpp"

#include <functional>
#include <string>
#include <vector>

namespace avpvar {

struct Dgp1Config {
  int T = 50;
  int p = 4;
  double rho = 0.95;
  double sigma0 = 0.2;
  int burn_in = 100;
  int jump_length = 6;
  double jump_low = 4.0;
  double jump_high = 8.0;
  double mu_bound = 2.0;
  double innovation_scale = 1.0;  // multiplies the T^{-1/2} coefficient innovations
  bool jump = true;
  bool random_start = false;  // default window starts at floor(2T/3)

  void validate() const;
};

struct Dgp2Config {
  int T = 100;
  int p = 4;
  double rho = 0.95;
  double sigma0 = 0.2;
  int burn_in = 100;
  double mu_bound = 2.0;
  VectorXd delta = (VectorXd(4) << 0.40, 0.15, 0.10, 0.20).finished();
  VectorXd alpha = (VectorXd(4) << 0.05, 0.25, 0.08, 0.12).finished();
  VectorXd kappa = (VectorXd(4) << 1, 2, 1, 1).finished();
  VectorXd phi = (VectorXd(4) << 0.10, 0.05, 0.35, 0.15).finished();
  VectorXd omega = (VectorXd(4) << 0.5, 0.5, 0.8, 0.3).finished();
  VectorXd tau = (VectorXd(4) << 1.5, 1.2, 1.0, 1.3).finished();
  VectorXd sigma_eta = (VectorXd(4) << 0.04, 0.05, 0.06, 0.07).finished();

  double persistence(int j) const { return 0.95 + 0.04 * j / (p - 1); }  // j from 0
  void validate() const;
};

// What an estimator is allowed to see.
struct DgpObserved {
  VectorXd y;  // T
  MatrixXd x;  // T x p
  // Observable signals, row t for period t: regime S_t, interaction, stress flag.
  VectorXd regime;
  VectorXd interaction;
  VectorXd stress;
  // DGP1 break timing flag (1 inside the window).
  VectorXd window;
};

// Truth kept apart from the estimation inputs.
struct DgpTruth {
  MatrixXd beta;  // T x p
  VectorXd sigma;  // T
};

struct DgpSample {
  DgpObserved observed;
  DgpTruth truth;
};

int jump_window_start(const Dgp1Config& cfg);  // 0-based row of the first break period

DgpSample simulate_dgp1(const Dgp1Config& cfg, SeededStream& rng);
DgpSample simulate_dgp2(const Dgp2Config& cfg, SeededStream& rng);

// Smooth transition 1 / (1 + exp(-2 y)).
double regime_signal(double y_lag);

enum class DriverKind { Agnostic, Targeted };

struct DriverSpec {
  DriverKind kind = DriverKind::Agnostic;
  int m = 20;
};

std::string driver_kind_name(DriverKind kind);

// [1, N_m(0, I)]
MatrixXd build_agnostic_drivers(Eigen::Index periods, int m, SeededStream& rng);
// DGP1: [1, N_9, xi, xi * N_{m/2}]. DGP2: [1, N_9, S, S * N_10] (+ INT block for m >= 40,
// + TE block for m >= 60).
MatrixXd build_targeted_drivers(int dgp, const DgpObserved& sample, int m, SeededStream& rng);

// Mean over t of squared deviations, per coefficient.
VectorXd parameter_mspe(const MatrixXd& estimated, const MatrixXd& truth);

// Estimators of the study. Both see (y, X) and, for AVP, the drivers only.
MatrixXd estimate_tvp_paths(const DgpObserved& data, const McmcSettings& mcmc, std::uint64_t seed,
                            std::uint64_t stream);
MatrixXd estimate_avp_paths(const DgpObserved& data, const MatrixXd& drivers, const McmcSettings& mcmc,
                            std::uint64_t seed, std::uint64_t stream);

struct StudyConfig {
  std::vector<int> dgps{1};
  std::vector<int> sample_sizes{50};
  std::vector<double> rhos{0.95};
  std::vector<DriverSpec> drivers{{DriverKind::Targeted, 60}};
  int replications = 1;
  McmcSettings mcmc;
  std::uint64_t seed = 1;
  int jobs = 1;
  bool random_start = false;
  std::string checkpoint;  // empty: no checkpoint
};

struct StudyRow {
  int dgp = 1;
  int T = 0;
  double rho = 0.0;
  std::string driver_kind;  // "none" for the TVP benchmark
  int m = 0;
  int coefficient = 0;  // 1-based
  std::string model;
  double mspe = 0.0;
  double ratio = 0.0;
};

struct StudyFailure {
  int dgp = 1;
  int T = 0;
  double rho = 0.0;
  std::string model;
  int replication = 0;
  std::string message;
};

struct StudyResult {
  std::vector<StudyRow> rows;
  std::vector<StudyFailure> failures;
  std::vector<std::string> completed_cells;
  int cell_count = 0;
};

std::string model_label(const DriverSpec& d);

StudyResult run_study(const StudyConfig& cfg,
                      const std::function<void(const std::string&)>& progress = {});

void write_study_csv(const StudyResult& result, const std::string& path);

}  // namespace avpvar
