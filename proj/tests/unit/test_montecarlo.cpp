#include "avpvar/montecarlo.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace avpvar;

namespace {

double corr(const VectorXd& a, const VectorXd& b) {
  const VectorXd x = a.array() - a.mean(), y = b.array() - b.mean();
  return x.dot(y) / (x.norm() * y.norm());
}

StudyConfig tiny_study() {
  StudyConfig c;
  c.dgps = {1};
  c.sample_sizes = {30};
  c.rhos = {0.5};
  c.drivers = {{DriverKind::Targeted, 6}, {DriverKind::Agnostic, 4}};
  c.replications = 2;
  c.mcmc = McmcSettings{60, 20, 2};
  c.seed = 5;
  return c;
}

}  // namespace

TEST_CASE("DGP1 jump window") {
  Dgp1Config c;
  c.T = 50;
  const int start = jump_window_start(c);
  CHECK(start == 32);  // period floor(2T/3) = 33 in 1-based terms
  SeededStream rng(1, 1);
  const DgpSample s = simulate_dgp1(c, rng);
  CHECK(s.observed.window.sum() == 6.0);
  for (int t = 0; t < 50; ++t) CHECK(s.observed.window(t) == ((t >= start && t < start + 6) ? 1.0 : 0.0));
  // Inside the window every coefficient moves by the same amount in [4, 8].
  for (int t = start; t < start + 6; ++t) {
    const Eigen::RowVectorXd jump = s.truth.beta.row(t) - s.truth.beta.row(start - 1);
    CHECK(jump.maxCoeff() - jump.minCoeff() < 1.0);
    CHECK(jump.mean() > 4.0 - 1.5);
    CHECK(jump.mean() < 8.0 + 1.5);
  }
  CHECK(s.observed.y.size() == 50);
  CHECK(s.observed.x.rows() == 50);
  CHECK(s.truth.sigma.minCoeff() > 0.0);

  Dgp1Config flat = c;
  flat.innovation_scale = 0.0;
  flat.jump = false;
  SeededStream r2(2, 1);
  const DgpSample f = simulate_dgp1(flat, r2);
  for (int j = 0; j < 4; ++j) {
    CHECK((f.truth.beta.col(j).array() - f.truth.beta(0, j)).abs().maxCoeff() < 1e-12);
    CHECK(std::abs(f.truth.beta(0, j)) <= 2.0);
  }
  // Without a jump the window difference is only the random walk.
  CHECK(f.observed.window.sum() == 6.0);

  Dgp1Config bad = c;
  bad.T = 10;
  CHECK_THROWS(simulate_dgp1(bad, rng));

  Dgp1Config rs = c;
  rs.random_start = true;
  for (int i = 0; i < 20; ++i) {
    const DgpSample r = simulate_dgp1(rs, rng);
    CHECK(r.observed.window.sum() == 6.0);
  }
}

TEST_CASE("predictor correlation structure") {
  Dgp1Config c;
  c.T = 10000;
  c.rho = 0.0;
  c.jump = false;
  c.burn_in = 10;
  SeededStream rng(3, 1);
  const MatrixXd x = simulate_dgp1(c, rng).observed.x;
  const MatrixXd centered = x.rowwise() - x.colwise().mean();
  const MatrixXd cov = centered.transpose() * centered / static_cast<double>(x.rows() - 1);
  const VectorXd sd = cov.diagonal().cwiseSqrt();
  const MatrixXd cr = sd.cwiseInverse().asDiagonal() * cov * sd.cwiseInverse().asDiagonal();
  CHECK((cr - MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 0.05);

  Dgp2Config c2;
  c2.T = 10000;
  c2.rho = 0.95;
  SeededStream r2(4, 1);
  const MatrixXd x2 = simulate_dgp2(c2, r2).observed.x;
  for (int j = 0; j < 4; ++j) {
    const double ac = corr(x2.col(j).tail(9999), x2.col(j).head(9999));
    CHECK(std::abs(ac - 0.95) < 0.05);
  }
}

TEST_CASE("DGP2 components") {
  CHECK(regime_signal(0.0) == 0.5);
  CHECK(regime_signal(-50.0) < 1e-40);
  CHECK(regime_signal(50.0) == doctest::Approx(1.0));

  Dgp2Config c;
  CHECK(c.persistence(0) == doctest::Approx(0.95));
  CHECK(c.persistence(3) == doctest::Approx(0.99));
  SeededStream rng(5, 1);
  const DgpSample s = simulate_dgp2(c, rng);
  CHECK(s.observed.regime.size() == 100);
  CHECK((s.observed.regime.array() > 0.0).all());
  CHECK((s.observed.regime.array() <= 1.0).all());
  CHECK(((s.observed.stress.array() == 0.0) || (s.observed.stress.array() == 1.0)).all());
  CHECK(s.truth.beta.allFinite());

  // With no regime, threshold or random-walk pull, beta stays at mu.
  Dgp2Config off = c;
  off.delta.setZero();
  off.alpha.setZero();
  off.phi.setZero();
  off.sigma_eta.setZero();
  SeededStream r2(6, 1);
  const DgpSample f = simulate_dgp2(off, r2);
  for (int j = 0; j < 4; ++j) CHECK((f.truth.beta.col(j).array() - f.truth.beta(0, j)).abs().maxCoeff() < 1e-12);

  // Threshold effects alone: tau huge keeps them off, so beta = mu as well.
  Dgp2Config te = off;
  te.phi.setConstant(1.0);
  te.tau.setConstant(1e12);
  SeededStream r3(6, 1);
  CHECK((simulate_dgp2(te, r3).truth.beta - f.truth.beta).cwiseAbs().maxCoeff() < 1e-12);

  Dgp2Config bad = c;
  bad.delta = VectorXd::Zero(3);
  CHECK_THROWS(simulate_dgp2(bad, rng));
}

TEST_CASE("driver layouts") {
  SeededStream rng(7, 1);
  const MatrixXd a = build_agnostic_drivers(40, 20, rng);
  CHECK(a.cols() == 21);
  CHECK(a.col(0).isOnes());
  CHECK(std::abs(a.rightCols(20).mean()) < 0.1);

  Dgp1Config c;
  const DgpSample s1 = simulate_dgp1(c, rng);
  const MatrixXd t1 = build_targeted_drivers(1, s1.observed, 60, rng);
  CHECK(t1.cols() == 1 + 9 + 1 + 30);
  CHECK(t1.col(0).isOnes());
  CHECK(t1.col(10) == s1.observed.window);
  CHECK(t1.col(10).sum() == 6.0);
  const VectorXd outside = (1.0 - s1.observed.window.array()).matrix();
  CHECK((t1.rightCols(30).array().colwise() * outside.array()).abs().maxCoeff() == 0.0);
  CHECK(t1.rightCols(30).cwiseAbs().sum() > 0.0);
  CHECK_THROWS(build_targeted_drivers(1, s1.observed, 7, rng));

  Dgp2Config c2;
  const DgpSample s2 = simulate_dgp2(c2, rng);
  CHECK(build_targeted_drivers(2, s2.observed, 20, rng).cols() == 21);
  const MatrixXd t40 = build_targeted_drivers(2, s2.observed, 40, rng);
  CHECK(t40.cols() == 32);
  CHECK(t40.col(10) == s2.observed.regime);
  CHECK(t40.col(21) == s2.observed.interaction);
  const MatrixXd t60 = build_targeted_drivers(2, s2.observed, 60, rng);
  CHECK(t60.cols() == 43);
  CHECK(t60.col(32) == s2.observed.stress);
  CHECK_THROWS(build_targeted_drivers(2, s2.observed, 10, rng));
  CHECK_THROWS(build_targeted_drivers(3, s2.observed, 20, rng));
}

TEST_CASE("parameter MSPE") {
  const MatrixXd a = MatrixXd::Random(20, 4);
  CHECK(parameter_mspe(a, a).isZero(0.0));
  const VectorXd off = parameter_mspe((a.array() + 0.3).matrix(), a);
  for (int j = 0; j < 4; ++j) CHECK(off(j) == doctest::Approx(0.09));
  CHECK_THROWS(parameter_mspe(a, MatrixXd::Zero(19, 4)));
}

TEST_CASE("estimators return full paths") {
  Dgp1Config c;
  c.T = 30;
  SeededStream rng(8, 1);
  const DgpSample s = simulate_dgp1(c, rng);
  const McmcSettings m{60, 20, 2};
  CHECK(estimate_tvp_paths(s.observed, m, 1, 1).rows() == 30);
  const MatrixXd z = build_agnostic_drivers(30, 4, rng);
  const MatrixXd p = estimate_avp_paths(s.observed, z, m, 1, 2);
  CHECK(p.rows() == 30);
  CHECK(p.cols() == 4);
  CHECK(p.allFinite());
  CHECK_THROWS(estimate_avp_paths(s.observed, z.topRows(10), m, 1, 2));
}

TEST_CASE("study bookkeeping, determinism and checkpoints") {
  StudyConfig c = tiny_study();
  const StudyResult a = run_study(c);
  CHECK(a.cell_count == 2);
  CHECK(a.rows.size() == 3 * 4);
  CHECK(a.failures.empty());
  for (int j = 0; j < 4; ++j) CHECK(a.rows[j].ratio == 1.0);
  const StudyResult b = run_study(c);
  bool same = true;
  for (std::size_t i = 0; i < a.rows.size(); ++i) same = same && a.rows[i].mspe == b.rows[i].mspe;
  CHECK(same);

  StudyConfig one = c;
  one.replications = 1;
  const StudyResult r1 = run_study(one);
  // With R = 1 the ratio is the single replication's MSPE ratio.
  for (int j = 0; j < 4; ++j) CHECK(r1.rows[4 + j].ratio == doctest::Approx(r1.rows[4 + j].mspe / r1.rows[j].mspe));

  const auto path = std::filesystem::temp_directory_path() / "avpvar_study_checkpoint.json";
  std::filesystem::remove(path);
  StudyConfig ck = c;
  ck.checkpoint = path.string();
  const StudyResult first = run_study(ck);
  CHECK(std::filesystem::exists(path));
  const StudyResult resumed = run_study(ck);
  same = true;
  for (std::size_t i = 0; i < a.rows.size(); ++i)
    same = same && first.rows[i].mspe == resumed.rows[i].mspe && first.rows[i].mspe == a.rows[i].mspe;
  CHECK(same);
  CHECK(resumed.completed_cells.size() == 2);

  const auto csv = std::filesystem::temp_directory_path() / "avpvar_study.csv";
  write_study_csv(a, csv.string());
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "DGP,T,rho,driver_kind,m,coefficient,model,MSPE,ratio");
  int lines = 0;
  for (std::string l; std::getline(in, l);) ++lines;
  CHECK(lines == 12);

  StudyConfig bad = c;
  bad.replications = 0;
  CHECK_THROWS(run_study(bad));
}

TEST_CASE("doubling replications moves the means within Monte Carlo error") {
  StudyConfig c = tiny_study();
  c.drivers = {{DriverKind::Targeted, 6}};
  // Spread of a single replication from independent seeds.
  std::vector<VectorXd> single;
  for (int s = 0; s < 16; ++s) {
    StudyConfig one = c;
    one.replications = 1;
    one.seed = 300 + s;
    const StudyResult r = run_study(one);
    VectorXd v(4);
    for (int j = 0; j < 4; ++j) v(j) = r.rows[j].mspe;
    single.push_back(v);
  }
  VectorXd mean = VectorXd::Zero(4), var = VectorXd::Zero(4);
  for (const VectorXd& v : single) mean += v / 16.0;
  for (const VectorXd& v : single) var += (v - mean).array().square().matrix() / 15.0;
  c.replications = 8;
  const StudyResult a = run_study(c);
  c.replications = 16;
  const StudyResult b = run_study(c);
  // The 16-replication mean nests the first 8, so the difference has sd s / 4.
  for (int j = 0; j < 4; ++j) {
    const double d = std::abs(a.rows[j].mspe - b.rows[j].mspe);
    MESSAGE("coefficient " << j + 1 << " change " << d << " band " << std::sqrt(var(j)) / 4.0);
    CHECK(d < 4.0 * std::sqrt(var(j)) / 4.0);
  }
}
