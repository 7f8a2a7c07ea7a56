#include "avpvar/montecarlo.hpp"

#include "avpvar/benchmarks.hpp"
#include "avpvar/parallel.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

namespace avpvar {

namespace {

void check_common(int t, int p, double rho, double sigma0, int burn_in) {
  if (t <= 10) throw std::invalid_argument("DGP sample size must exceed 10");
  if (p < 1) throw std::invalid_argument("DGP needs at least one predictor");
  if (!(rho > -1.0 && rho < 1.0)) throw std::invalid_argument("DGP rho must lie in (-1, 1)");
  if (!(sigma0 > 0.0)) throw std::invalid_argument("DGP sigma0 must be positive");
  if (burn_in < 0) throw std::invalid_argument("DGP burn-in must be non-negative");
}

// Predictor VAR(1) innovations N(0, Sigma_x) with Sigma_x[i, j] = rho^|i-j|.
MatrixXd predictor_chol(int p, double rho) {
  MatrixXd s(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) s(i, j) = std::pow(rho, std::abs(i - j));
  return jittered_cholesky(s).lower;
}

double uniform_between(SeededStream& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

// Signals observable at row t from y_{t-1}, y_{t-2}, x_{t-1} (full series with burn-in).
void fill_signals(const VectorXd& y_full, const MatrixXd& x_full, int burn, int t, DgpObserved& out) {
  out.regime.resize(t);
  out.interaction.resize(t);
  out.stress.resize(t);
  for (int s = 0; s < t; ++s) {
    const int g = burn + s;
    const double y1 = g >= 1 ? y_full(g - 1) : 0.0;
    const double y2 = g >= 2 ? y_full(g - 2) : 0.0;
    const double sr = regime_signal(y1);
    double th = 0.0;
    if (g >= 1)
      for (Eigen::Index j = 0; j < x_full.cols(); ++j) th += std::tanh(x_full(g - 1, j));
    out.regime(s) = sr;
    out.interaction(s) = sr * th / static_cast<double>(x_full.cols());
    out.stress(s) = std::abs(y1) + 0.5 * std::abs(y2) > 1.0 ? 1.0 : 0.0;
  }
}

}  // namespace

double regime_signal(double y_lag) { return 1.0 / (1.0 + std::exp(-2.0 * y_lag)); }

void Dgp1Config::validate() const {
  check_common(T, p, rho, sigma0, burn_in);
  if (jump_length < 1) throw std::invalid_argument("jump window length must be positive");
  if (!(jump_low <= jump_high)) throw std::invalid_argument("jump bounds out of order");
  if (!random_start && (T * 2) / 3 - 1 + jump_length > T)
    throw std::invalid_argument("jump window does not fit inside the sample");
}

void Dgp2Config::validate() const {
  check_common(T, p, rho, sigma0, burn_in);
  const std::vector<const VectorXd*> v{&delta, &alpha, &kappa, &phi, &omega, &tau, &sigma_eta};
  for (const VectorXd* e : v)
    if (e->size() != p) throw std::invalid_argument("DGP2 parameter vectors must have length p");
  if ((tau.array() <= 0.0).any()) throw std::invalid_argument("DGP2 thresholds must be positive");
  if (p < 2) throw std::invalid_argument("DGP2 needs p >= 2");
}

int jump_window_start(const Dgp1Config& cfg) { return (cfg.T * 2) / 3 - 1; }

DgpSample simulate_dgp1(const Dgp1Config& cfg, SeededStream& rng) {
  cfg.validate();
  const int t = cfg.T;
  const int p = cfg.p;
  const int burn = cfg.burn_in;
  const int total = burn + t;
  const double scale = 1.0 / std::sqrt(static_cast<double>(t));
  int start = jump_window_start(cfg);
  if (cfg.random_start) {
    const int lo = t / 4;
    const int hi = std::max(lo, t - cfg.jump_length - t / 4);
    start = lo + static_cast<int>(rng.uniform() * (hi - lo + 1));
    start = std::min(start, t - cfg.jump_length);
  }
  const MatrixXd lx = predictor_chol(p, cfg.rho);
  VectorXd mu(p);
  for (int j = 0; j < p; ++j) mu(j) = uniform_between(rng, -cfg.mu_bound, cfg.mu_bound);
  const double h0 = std::log(cfg.sigma0);

  MatrixXd x_full = MatrixXd::Zero(total, p);
  VectorXd y_full = VectorXd::Zero(total);
  DgpSample out;
  out.truth.beta.resize(t, p);
  out.truth.sigma.resize(t);
  out.observed.window = VectorXd::Zero(t);
  VectorXd xprev = VectorXd::Zero(p);
  VectorXd theta = mu;
  double h = h0;
  for (int g = 0; g < total; ++g) {
    const VectorXd x = cfg.rho * xprev + lx * rng.normal_vector(p);
    h = h0 + 0.99 * (h - h0) + scale * rng.normal();
    theta = mu + 0.99 * (theta - mu) + cfg.innovation_scale * scale * rng.normal_vector(p);
    double jump = 0.0;
    const int s = g - burn;
    if (s >= start && s < start + cfg.jump_length) {
      if (cfg.jump) jump = uniform_between(rng, cfg.jump_low, cfg.jump_high);
      out.observed.window(s) = 1.0;
    }
    const VectorXd beta = theta.array() + jump;
    const double sigma = std::exp(h);
    y_full(g) = x.dot(beta) + sigma * rng.normal();
    x_full.row(g) = x.transpose();
    xprev = x;
    if (s >= 0) {
      out.truth.beta.row(s) = beta.transpose();
      out.truth.sigma(s) = sigma;
    }
  }
  out.observed.y = y_full.tail(t);
  out.observed.x = x_full.bottomRows(t);
  fill_signals(y_full, x_full, burn, t, out.observed);
  return out;
}

DgpSample simulate_dgp2(const Dgp2Config& cfg, SeededStream& rng) {
  cfg.validate();
  const int t = cfg.T;
  const int p = cfg.p;
  const int burn = cfg.burn_in;
  const int total = burn + t;
  const double scale = 1.0 / std::sqrt(static_cast<double>(t));
  const MatrixXd lx = predictor_chol(p, cfg.rho);
  VectorXd mu(p);
  for (int j = 0; j < p; ++j) mu(j) = uniform_between(rng, -cfg.mu_bound, cfg.mu_bound);
  const double h0 = std::log(cfg.sigma0);

  MatrixXd x_full = MatrixXd::Zero(total, p);
  VectorXd y_full = VectorXd::Zero(total);
  DgpSample out;
  out.truth.beta.resize(t, p);
  out.truth.sigma.resize(t);
  out.observed.window = VectorXd::Zero(t);
  VectorXd xprev = VectorXd::Zero(p);
  VectorXd beta = mu;  // beta_0 at the mean
  double h = h0;
  for (int g = 0; g < total; ++g) {
    const double y1 = g >= 1 ? y_full(g - 1) : 0.0;
    const double y2 = g >= 2 ? y_full(g - 2) : 0.0;
    const double st = regime_signal(y1);
    const VectorXd x = cfg.rho * xprev + lx * rng.normal_vector(p);
    h = h0 + 0.99 * (h - h0) + scale * rng.normal();
    for (int j = 0; j < p; ++j) {
      const double rw = mu(j) + cfg.persistence(j) * (beta(j) - mu(j));
      const double rs = cfg.delta(j) * st + cfg.alpha(j) * std::tanh(cfg.kappa(j) * xprev(j)) * st;
      const double mj = std::abs(y1) + cfg.omega(j) * std::abs(y2);
      const double te = mj > cfg.tau(j) ? cfg.phi(j) : 0.0;
      beta(j) = rw + rs + te + cfg.sigma_eta(j) * scale * rng.normal();
    }
    const double sigma = std::exp(h);
    y_full(g) = x.dot(beta) + sigma * std::sqrt(1.0 + 0.5 * st) * rng.normal();
    x_full.row(g) = x.transpose();
    xprev = x;
    const int s = g - burn;
    if (s >= 0) {
      out.truth.beta.row(s) = beta.transpose();
      out.truth.sigma(s) = sigma;
    }
  }
  out.observed.y = y_full.tail(t);
  out.observed.x = x_full.bottomRows(t);
  fill_signals(y_full, x_full, burn, t, out.observed);
  return out;
}

std::string driver_kind_name(DriverKind kind) { return kind == DriverKind::Agnostic ? "agnostic" : "targeted"; }

MatrixXd build_agnostic_drivers(Eigen::Index periods, int m, SeededStream& rng) {
  if (m < 1) throw std::invalid_argument("agnostic drivers need m >= 1");
  MatrixXd z(periods, m + 1);
  z.col(0).setOnes();
  for (Eigen::Index t = 0; t < periods; ++t)
    for (int j = 0; j < m; ++j) z(t, 1 + j) = rng.normal();
  return z;
}

namespace {

// [signal, signal * N_count]
void append_signal_block(std::vector<VectorXd>& cols, const VectorXd& signal, int count, SeededStream& rng) {
  cols.push_back(signal);
  for (int j = 0; j < count; ++j) {
    VectorXd c(signal.size());
    for (Eigen::Index t = 0; t < signal.size(); ++t) c(t) = rng.normal();
    cols.push_back(c.cwiseProduct(signal));
  }
}

}  // namespace

MatrixXd build_targeted_drivers(int dgp, const DgpObserved& sample, int m, SeededStream& rng) {
  const Eigen::Index t = sample.y.size();
  std::vector<VectorXd> cols;
  cols.push_back(VectorXd::Ones(t));
  for (int j = 0; j < 9; ++j) {
    VectorXd c(t);
    for (Eigen::Index s = 0; s < t; ++s) c(s) = rng.normal();
    cols.push_back(c);
  }
  if (dgp == 1) {
    if (m < 2 || m % 2 != 0) throw std::invalid_argument("DGP1 targeted drivers need an even m >= 2");
    append_signal_block(cols, sample.window, m / 2, rng);
  } else if (dgp == 2) {
    if (m < 20) throw std::invalid_argument("DGP2 targeted drivers need m >= 20");
    append_signal_block(cols, sample.regime, 10, rng);
    if (m >= 40) append_signal_block(cols, sample.interaction, 10, rng);
    if (m >= 60) append_signal_block(cols, sample.stress, 10, rng);
  } else {
    throw std::invalid_argument("unknown DGP " + std::to_string(dgp));
  }
  MatrixXd z(t, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) z.col(static_cast<Eigen::Index>(j)) = cols[j];
  return z;
}

VectorXd parameter_mspe(const MatrixXd& estimated, const MatrixXd& truth) {
  if (estimated.rows() != truth.rows() || estimated.cols() != truth.cols())
    throw std::invalid_argument("parameter paths differ in shape");
  if (truth.rows() == 0) throw std::invalid_argument("empty parameter paths");
  return (estimated - truth).array().square().colwise().mean().transpose();
}

MatrixXd estimate_tvp_paths(const DgpObserved& data, const McmcSettings& mcmc, std::uint64_t seed,
                            std::uint64_t stream) {
  BenchmarkSpec spec;
  spec.r = 0;
  spec.mcmc = mcmc;
  spec.seed = seed;
  spec.stream = stream;
  const TvpFbPosterior post = fit_tvp_fb_regression(MatrixXd(data.y), data.x, 0, TvpFbOptions{}, spec);
  return post.beta_mean.front();
}

MatrixXd estimate_avp_paths(const DgpObserved& data, const MatrixXd& drivers, const McmcSettings& mcmc,
                            std::uint64_t seed, std::uint64_t stream) {
  const Eigen::Index t = data.y.size();
  if (drivers.rows() != t) throw std::invalid_argument("drivers and sample differ in length");
  // Row t carries Z_{t+1}, so the prefix sum gives the contemporaneous cumulation.
  MatrixXd lead = MatrixXd::Zero(t, drivers.cols());
  if (t > 1) lead.topRows(t - 1) = drivers.bottomRows(t - 1);
  AvpModelSpec spec;
  spec.r = 0;
  spec.mcmc = mcmc;
  spec.seed = seed;
  spec.stream = stream;
  spec.keep_paths = false;
  AvpData d{MatrixXd(data.y), data.x, cumulative_drivers(lead).values};
  const AvpPosterior post = run_gibbs(spec, d);
  AugmentedCoefficients mean = post.draws.front().coefficients;
  mean.beta[0].setZero();
  for (const AvpDraw& dr : post.draws) mean.beta[0] += dr.coefficients.beta[0];
  mean.beta[0] /= static_cast<double>(post.draws.size());
  return recover_time_paths(mean, d.c).beta.front();
}

std::string model_label(const DriverSpec& d) { return "AVP-" + driver_kind_name(d.kind) + "-" + std::to_string(d.m); }

namespace {

using nlohmann::json;

struct RepOutcome {
  bool ok = false;
  VectorXd mspe;
  std::string message;
};

std::string group_key(int dgp, int t, double rho) {
  std::ostringstream s;
  s << "DGP" << dgp << "/T=" << t << "/rho=" << rho;
  return s.str();
}

std::string cell_key(int dgp, int t, double rho, const std::string& model) {
  return group_key(dgp, t, rho) + "/" + model;
}

json outcomes_to_json(const std::vector<std::vector<RepOutcome>>& o) {
  json arr = json::array();
  for (const auto& model : o) {
    json reps = json::array();
    for (const RepOutcome& r : model) {
      json e;
      e["ok"] = r.ok;
      e["mspe"] = std::vector<double>(r.mspe.data(), r.mspe.data() + r.mspe.size());
      e["message"] = r.message;
      reps.push_back(e);
    }
    arr.push_back(reps);
  }
  return arr;
}

std::vector<std::vector<RepOutcome>> outcomes_from_json(const json& arr) {
  std::vector<std::vector<RepOutcome>> o;
  for (const json& model : arr) {
    std::vector<RepOutcome> reps;
    for (const json& e : model) {
      RepOutcome r;
      r.ok = e.at("ok").get<bool>();
      const std::vector<double> v = e.at("mspe").get<std::vector<double>>();
      r.mspe = Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
      r.message = e.at("message").get<std::string>();
      reps.push_back(r);
    }
    o.push_back(reps);
  }
  return o;
}

std::uint64_t rho_code(double rho) { return static_cast<std::uint64_t>(std::llround(rho * 1e6) + 1000000); }

std::uint64_t driver_tag(const DriverSpec& d) {
  return 1000 + static_cast<std::uint64_t>(d.kind == DriverKind::Agnostic ? 0 : 1) * 100000 +
         static_cast<std::uint64_t>(d.m);
}

}  // namespace

StudyResult run_study(const StudyConfig& cfg, const std::function<void(const std::string&)>& progress) {
  if (cfg.replications < 1) throw std::invalid_argument("replications must be at least 1");
  if (cfg.drivers.empty()) throw std::invalid_argument("study needs at least one driver specification");
  cfg.mcmc.validate();
  const std::size_t models = cfg.drivers.size() + 1;  // TVP first

  json checkpoint = json::object();
  if (!cfg.checkpoint.empty()) {
    std::ifstream in(cfg.checkpoint);
    if (in) {
      try {
        in >> checkpoint;
      } catch (const std::exception&) {
        checkpoint = json::object();
      }
      if (!checkpoint.is_object()) checkpoint = json::object();
    }
  }

  StudyResult result;
  result.cell_count = static_cast<int>(cfg.dgps.size() * cfg.sample_sizes.size() * cfg.rhos.size() * cfg.drivers.size());
  for (int dgp : cfg.dgps)
    for (int t : cfg.sample_sizes)
      for (double rho : cfg.rhos) {
        const std::string gk = group_key(dgp, t, rho);
        std::vector<std::vector<RepOutcome>> outcomes;
        if (checkpoint.contains("groups") && checkpoint["groups"].contains(gk) &&
            checkpoint["groups"][gk].at("replications").get<int>() == cfg.replications) {
          outcomes = outcomes_from_json(checkpoint["groups"][gk].at("outcomes"));
        }
        if (outcomes.size() != models) {
          outcomes.assign(models, std::vector<RepOutcome>(static_cast<std::size_t>(cfg.replications)));
          parallel_for(static_cast<std::size_t>(cfg.replications), cfg.jobs, [&](std::size_t rep) {
            const std::uint64_t key = stream_key(static_cast<std::uint64_t>(dgp), static_cast<std::uint64_t>(t),
                                                 rho_code(rho), rep);
            SeededStream data_rng(cfg.seed, key);
            DgpSample sample;
            if (dgp == 1) {
              Dgp1Config c;
              c.T = t;
              c.rho = rho;
              c.random_start = cfg.random_start;
              sample = simulate_dgp1(c, data_rng);
            } else {
              Dgp2Config c;
              c.T = t;
              c.rho = rho;
              sample = simulate_dgp2(c, data_rng);
            }
            const DgpObserved& obs = sample.observed;
            auto run = [&](std::size_t mi, const std::function<MatrixXd()>& fit) {
              RepOutcome& o = outcomes[mi][rep];
              try {
                o.mspe = parameter_mspe(fit(), sample.truth.beta);
                o.ok = o.mspe.allFinite();
                if (!o.ok) o.message = "non-finite parameter error";
              } catch (const std::exception& e) {
                o.ok = false;
                o.message = e.what();
              }
            };
            run(0, [&] { return estimate_tvp_paths(obs, cfg.mcmc, cfg.seed, stream_key(key, 1)); });
            for (std::size_t d = 0; d < cfg.drivers.size(); ++d) {
              const DriverSpec& ds = cfg.drivers[d];
              run(d + 1, [&] {
                SeededStream zr = data_rng.substream(driver_tag(ds));
                const MatrixXd z = ds.kind == DriverKind::Agnostic ? build_agnostic_drivers(t, ds.m, zr)
                                                                   : build_targeted_drivers(dgp, obs, ds.m, zr);
                return estimate_avp_paths(obs, z, cfg.mcmc, cfg.seed, stream_key(key, 2, driver_tag(ds)));
              });
            }
          });
          if (!cfg.checkpoint.empty()) {
            checkpoint["groups"][gk]["replications"] = cfg.replications;
            checkpoint["groups"][gk]["outcomes"] = outcomes_to_json(outcomes);
            json done = json::array();
            for (const DriverSpec& d : cfg.drivers) done.push_back(cell_key(dgp, t, rho, model_label(d)));
            checkpoint["groups"][gk]["completed_cells"] = done;
            std::ofstream out(cfg.checkpoint);
            out << checkpoint.dump(1);
          }
        }

        // Aggregate: TVP row, then each AVP variant against the replications where both succeeded.
        const Eigen::Index p = [&] {
          for (const auto& m : outcomes)
            for (const RepOutcome& r : m)
              if (r.ok) return r.mspe.size();
          return Eigen::Index(4);
        }();
        for (std::size_t mi = 0; mi < models; ++mi)
          for (int rep = 0; rep < cfg.replications; ++rep) {
            const RepOutcome& o = outcomes[mi][rep];
            if (o.ok) continue;
            result.failures.push_back({dgp, t, rho, mi == 0 ? "TVP" : model_label(cfg.drivers[mi - 1]), rep, o.message});
          }
        VectorXd tvp_sum = VectorXd::Zero(p);
        int tvp_n = 0;
        for (const RepOutcome& o : outcomes[0])
          if (o.ok) {
            tvp_sum += o.mspe;
            ++tvp_n;
          }
        for (Eigen::Index j = 0; j < p; ++j)
          result.rows.push_back({dgp, t, rho, "none", 0, static_cast<int>(j + 1), "TVP",
                                 tvp_n > 0 ? tvp_sum(j) / tvp_n : NAN, tvp_n > 0 ? 1.0 : NAN});
        for (std::size_t d = 0; d < cfg.drivers.size(); ++d) {
          VectorXd own = VectorXd::Zero(p);
          VectorXd base = VectorXd::Zero(p);
          int both = 0;
          for (int rep = 0; rep < cfg.replications; ++rep) {
            const RepOutcome& a = outcomes[d + 1][rep];
            const RepOutcome& b = outcomes[0][rep];
            if (!a.ok || !b.ok) continue;
            own += a.mspe;
            base += b.mspe;
            ++both;
          }
          for (Eigen::Index j = 0; j < p; ++j)
            result.rows.push_back({dgp, t, rho, driver_kind_name(cfg.drivers[d].kind), cfg.drivers[d].m,
                                   static_cast<int>(j + 1), model_label(cfg.drivers[d]),
                                   both > 0 ? own(j) / both : NAN, both > 0 ? own(j) / base(j) : NAN});
          result.completed_cells.push_back(cell_key(dgp, t, rho, model_label(cfg.drivers[d])));
        }
        if (progress) progress(gk);
      }
  return result;
}

void write_study_csv(const StudyResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "DGP,T,rho,driver_kind,m,coefficient,model,MSPE,ratio\n";
  out << std::setprecision(10);
  for (const StudyRow& r : result.rows)
    out << r.dgp << ',' << r.T << ',' << r.rho << ',' << r.driver_kind << ',' << r.m << ',' << r.coefficient << ','
        << r.model << ',' << r.mspe << ',' << r.ratio << '\n';
}

}  // namespace avpvar
