#include "avpvar/avp.hpp"
#include "avpvar/benchmarks.hpp"
#include "avpvar/commands.hpp"
#include "avpvar/config.hpp"
#include "avpvar/evaluation.hpp"
#include "avpvar/models.hpp"
#include "avpvar/montecarlo.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

namespace py = pybind11;
using namespace avpvar;

namespace {

DriverSpec parse_driver(const std::string& kind, int m) {
  if (kind == "agnostic") return {DriverKind::Agnostic, m};
  if (kind == "targeted") return {DriverKind::Targeted, m};
  throw py::value_error("driver kind must be 'agnostic' or 'targeted', got '" + kind + "'");
}

McmcSettings mcmc_of(int iterations, int burn_in, int thin) {
  McmcSettings s{iterations, burn_in, thin};
  s.validate();
  return s;
}

py::dict simulate(int dgp, int t, double rho, std::uint64_t seed, std::uint64_t stream,
                  std::optional<std::string> driver_kind, int m, bool random_start) {
  SeededStream rng(seed, stream);
  DgpSample s;
  if (dgp == 1) {
    Dgp1Config c;
    c.T = t;
    c.rho = rho;
    c.random_start = random_start;
    s = simulate_dgp1(c, rng);
  } else if (dgp == 2) {
    Dgp2Config c;
    c.T = t;
    c.rho = rho;
    s = simulate_dgp2(c, rng);
  } else {
    throw py::value_error("dgp must be 1 or 2");
  }
  py::dict out;
  out["y"] = s.observed.y;
  out["x"] = s.observed.x;
  out["beta"] = s.truth.beta;
  out["sigma"] = s.truth.sigma;
  out["regime"] = s.observed.regime;
  out["stress"] = s.observed.stress;
  out["window"] = s.observed.window;
  if (driver_kind) {
    const DriverSpec d = parse_driver(*driver_kind, m);
    SeededStream drng = rng.substream(1);
    out["drivers"] = d.kind == DriverKind::Agnostic ? build_agnostic_drivers(t, m, drng)
                                                     : build_targeted_drivers(dgp, s.observed, m, drng);
  }
  return out;
}

// Holds a fitted AVP-VAR together with the panel tail needed for forecasting.
struct PyAvpFit {
  AvpVarFit fit;
  MatrixXd tail;

  py::array_t<double> baseline_beta() const {
    const auto& d = fit.posterior.draws;
    const Eigen::Index n = fit.posterior.n, k = fit.posterior.k;
    py::array_t<double> a({static_cast<py::ssize_t>(d.size()), static_cast<py::ssize_t>(n),
                           static_cast<py::ssize_t>(k)});
    auto v = a.mutable_unchecked<3>();
    for (std::size_t s = 0; s < d.size(); ++s)
      for (Eigen::Index i = 0; i < n; ++i) {
        const VectorXd b = d[s].coefficients.baseline_beta(i);
        for (Eigen::Index j = 0; j < k; ++j) v(s, i, j) = b(j);
      }
    return a;
  }

  MatrixXd omega2() const {
    const auto& d = fit.posterior.draws;
    MatrixXd o(d.size(), fit.posterior.n);
    for (std::size_t s = 0; s < d.size(); ++s) o.row(s) = d[s].omega2.transpose();
    return o;
  }

  // Posterior mean of the equation-i coefficient paths over the sample, T x k.
  MatrixXd mean_beta_path(std::size_t i) const {
    if (i >= static_cast<std::size_t>(fit.posterior.n)) throw py::index_error("equation out of range");
    MatrixXd acc;
    for (const AvpDraw& d : fit.posterior.draws) {
      const MatrixXd p = recover_time_paths(d.coefficients, fit.posterior.c).beta[i];
      acc = acc.size() ? MatrixXd(acc + p) : p;
    }
    return acc / static_cast<double>(fit.posterior.draws.size());
  }

  py::dict forecast(int horizon, std::uint64_t seed) const {
    if (horizon < 1) throw py::value_error("horizon must be positive");
    SeededStream rng(seed, 41);
    const ForecastDistribution f = avpvar::forecast(fit.posterior, tail, fit.c_next, horizon, rng);
    py::dict out;
    out["median"] = f.median();
    out["mean"] = f.mean();
    out["q10"] = f.quantile(0.1);
    out["q90"] = f.quantile(0.9);
    out["explosive_paths"] = f.explosive_paths;
    return out;
  }
};

PyAvpFit fit_avp(const MatrixXd& panel, const MatrixXd& drivers, int p, int r, int iterations, int burn_in, int thin,
                 std::uint64_t seed) {
  if (drivers.rows() != panel.rows()) throw py::value_error("drivers and panel need the same number of rows");
  AvpModelSpec spec;
  spec.p = p;
  spec.r = r;
  spec.mcmc = mcmc_of(iterations, burn_in, thin);
  spec.seed = seed;
  spec.validate();
  py::gil_scoped_release release;
  PyAvpFit out{run_gibbs(spec, panel, drivers), panel.bottomRows(p)};
  return out;
}

py::list study(const std::vector<int>& dgps, const std::vector<int>& sizes, const std::vector<double>& rhos,
               const std::vector<std::pair<std::string, int>>& drivers, int replications, int iterations, int burn_in,
               int thin, std::uint64_t seed, int jobs) {
  StudyConfig sc;
  sc.dgps = dgps;
  sc.sample_sizes = sizes;
  sc.rhos = rhos;
  sc.drivers.clear();
  for (const auto& [k, m] : drivers) sc.drivers.push_back(parse_driver(k, m));
  sc.replications = replications;
  sc.mcmc = mcmc_of(iterations, burn_in, thin);
  sc.seed = seed;
  sc.jobs = jobs;
  StudyResult res;
  {
    py::gil_scoped_release release;
    res = run_study(sc);
  }
  if (!res.failures.empty())
    throw std::runtime_error(std::to_string(res.failures.size()) + " fits failed, first: " +
                             res.failures.front().message);
  py::list rows;
  for (const StudyRow& r : res.rows) {
    py::dict d;
    d["dgp"] = r.dgp;
    d["T"] = r.T;
    d["rho"] = r.rho;
    d["driver_kind"] = r.driver_kind;
    d["m"] = r.m;
    d["coefficient"] = r.coefficient;
    d["model"] = r.model;
    d["mspe"] = r.mspe;
    d["ratio"] = r.ratio;
    rows.append(d);
  }
  return rows;
}

int run_command(const std::string& command, const std::string& config_path, const std::string& out,
                std::optional<std::uint64_t> seed, std::optional<std::string> preset, int jobs) {
  using Cmd = int (*)(const RunConfig&, const RunOptions&);
  Cmd fn = nullptr;
  if (command == "estimate") fn = cmd_estimate;
  else if (command == "forecast") fn = cmd_forecast;
  else if (command == "evaluate") fn = cmd_evaluate;
  else if (command == "simulate") fn = cmd_simulate;
  else if (command == "compare") fn = cmd_compare;
  else throw py::value_error("unknown command '" + command + "'");
  RunConfig cfg = load_config(config_path);
  apply_overrides(cfg, seed, preset);
  RunOptions opt;
  opt.jobs = jobs;
  opt.output_dir = resolve_output_dir(out, cfg);
  py::gil_scoped_release release;
  return fn(cfg, opt);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Adaptive parameter VAR: samplers, simulation study and evaluation";
  m.attr("__version__") = kToolVersion;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

  m.def("simulate_dgp", &simulate, py::arg("dgp"), py::arg("T"), py::arg("rho") = 0.95, py::arg("seed") = 1,
        py::arg("stream") = 0, py::arg("driver_kind") = py::none(), py::arg("m") = 20,
        py::arg("random_start") = false, "Simulate one Monte Carlo sample; optionally build its driver matrix.");

  py::class_<PyAvpFit>(m, "AvpFit")
      .def_property_readonly("draws", [](const PyAvpFit& f) { return f.fit.posterior.draws.size(); })
      .def_property_readonly("c_next", [](const PyAvpFit& f) { return f.fit.c_next; })
      .def_property_readonly("baseline_beta", &PyAvpFit::baseline_beta, "draws x n x k baseline coefficients")
      .def_property_readonly("omega2", &PyAvpFit::omega2, "draws x n log-volatility innovation variances")
      .def("mean_beta_path", &PyAvpFit::mean_beta_path, py::arg("equation"))
      .def("forecast", &PyAvpFit::forecast, py::arg("horizon"), py::arg("seed") = 1);

  m.def("fit_avp", &fit_avp, py::arg("panel"), py::arg("drivers"), py::arg("p") = 2, py::arg("r") = 1,
        py::arg("iterations") = 11000, py::arg("burn_in") = 1000, py::arg("thin") = 10, py::arg("seed") = 1,
        "Gibbs sampler of the AVP-VAR on a standardized panel with raw drivers Z.");

  m.def(
      "fit_ols_var",
      [](const MatrixXd& panel, int p) {
        const OlsVarFit f = fit_ols_var(panel, p);
        py::dict d;
        d["coefficients"] = f.coefficients;
        d["covariance"] = f.covariance;
        d["residuals"] = f.residuals;
        return d;
      },
      py::arg("panel"), py::arg("p"));

  m.def("run_study", &study, py::arg("dgps"), py::arg("T"), py::arg("rho"), py::arg("drivers"),
        py::arg("replications") = 1, py::arg("iterations") = 11000, py::arg("burn_in") = 1000, py::arg("thin") = 10,
        py::arg("seed") = 1, py::arg("jobs") = 1, "Monte Carlo tracking study; returns one dict per output row.");

  m.def("pinball_loss", &pinball_loss, py::arg("realized"), py::arg("quantile"), py::arg("tau"));
  m.def("model_names", &model_names);
  m.def(
      "config_hash", [](const std::string& text) { return config_hash(parse_config_text(text)); }, py::arg("text"));
  m.def("run", &run_command, py::arg("command"), py::arg("config"), py::arg("out") = "", py::arg("seed") = py::none(),
        py::arg("preset") = py::none(), py::arg("jobs") = 1,
        "Run a CLI subcommand in process; returns its exit code.");
}
