#include "avpvar/commands.hpp"

#include "avpvar/evaluation.hpp"
#include "avpvar/montecarlo.hpp"
#include "avpvar/regression.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>

namespace avpvar {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ostream& logger(const RunOptions& opt) {
  static std::ofstream null_stream;
  return opt.log != nullptr ? *opt.log : null_stream;
}

std::string out_path(const RunOptions& opt, const std::string& name) { return (fs::path(opt.output_dir) / name).string(); }

void prepare_output(const RunOptions& opt) {
  std::error_code ec;
  fs::create_directories(opt.output_dir, ec);
  if (ec) throw ConfigError("output directory " + opt.output_dir + ": " + ec.message());
}

void write_metadata(const RunConfig& cfg, const RunOptions& opt, const std::string& command,
                    const std::vector<std::string>& outputs, const json& extra = json::object()) {
  json m;
  m["tool"] = "avpvar";
  m["version"] = kToolVersion;
  m["command"] = command;
  m["seed"] = cfg.seed;
  m["preset"] = cfg.preset;
  m["mcmc"] = {{"iterations", cfg.mcmc.iterations}, {"burn_in", cfg.mcmc.burn_in}, {"thin", cfg.mcmc.thin}};
  m["config_hash"] = config_hash(cfg);
  m["rng"] = {{"engine", "boost::random::mt19937_64"},
              {"streams", "engine per (seed, stream id); stream id = splitmix64 mix of FNV-1a(model name) and "
                          "the forecast origin, or of (dgp, T, rho, replication) in simulations"}};
  m["halfcauchy_scheme"] = "inverse-gamma auxiliary variables";
  m["outputs"] = outputs;
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
  std::ofstream out(out_path(opt, "metadata.json"));
  if (!out) throw std::runtime_error("cannot write metadata.json");
  out << m.dump(2) << '\n';
}

void require_models(const RunConfig& cfg) {
  if (cfg.models.empty()) throw ConfigError("config.models: at least one model is required");
}

void require_benchmark(const RunConfig& cfg) {
  if (std::find(cfg.models.begin(), cfg.models.end(), cfg.benchmark) == cfg.models.end())
    throw ConfigError("config.benchmark: " + cfg.benchmark + " is not in config.models");
}

ModelSettings model_settings(const RunConfig& cfg, const std::vector<std::string>& names) {
  ModelSettings s;
  s.p = cfg.p;
  s.r = cfg.r;
  s.mcmc = cfg.mcmc;
  s.seed = cfg.seed;
  s.ols_draws = cfg.ols_draws;
  s.training_size = cfg.training_size;
  for (const std::string& o : cfg.ordering)
    s.ordering.push_back(static_cast<int>(std::find(names.begin(), names.end(), o) - names.begin()));
  return s;
}

void check_driver_models(const RunConfig& cfg, const LoadedData& data) {
  for (const std::string& m : cfg.models) {
    const auto kind = parse_model(m);
    if (kind && model_uses_drivers(*kind) && data.drivers.count() == 0)
      throw ConfigError("config.drivers: model " + m + " needs at least one driver");
  }
}

// Keeps the rows where every column is observed; gaps inside the sample are errors.
void trim_missing(MatrixXd& values, std::vector<std::string>& dates, const std::vector<std::string>& names,
                  const std::string& path) {
  const Eigen::Index t = values.rows();
  auto complete = [&](Eigen::Index i) { return values.row(i).allFinite(); };
  Eigen::Index first = 0;
  while (first < t && !complete(first)) ++first;
  Eigen::Index last = t - 1;
  while (last >= first && !complete(last)) --last;
  if (first > last) throw DataError(path + ": no row has all configured series observed");
  for (Eigen::Index i = first; i <= last; ++i)
    if (!complete(i)) {
      for (Eigen::Index j = 0; j < values.cols(); ++j)
        if (!std::isfinite(values(i, j)))
          throw DataError(path + ": missing value for " + names[j] + " at " + dates[i] + " inside the sample");
    }
  values = values.middleRows(first, last - first + 1).eval();
  dates = std::vector<std::string>(dates.begin() + first, dates.begin() + last + 1);
}

std::vector<std::string> coefficient_names(const std::vector<std::string>& vars, int p) {
  std::vector<std::string> out{"const"};
  for (int l = 1; l <= p; ++l)
    for (const std::string& v : vars) out.push_back(v + ".l" + std::to_string(l));
  return out;
}

std::vector<std::string> evaluated_names(const RunConfig& cfg, const LoadedData& data) {
  if (!cfg.evaluate.empty()) return cfg.evaluate;
  std::vector<std::string> out;
  for (std::size_t j = 0; j < std::min<std::size_t>(2, data.panel.names.size()); ++j) out.push_back(data.panel.names[j]);
  return out;
}

std::vector<int> evaluated_indices(const std::vector<std::string>& eval, const std::vector<std::string>& names) {
  std::vector<int> idx;
  for (const std::string& e : eval) idx.push_back(static_cast<int>(std::find(names.begin(), names.end(), e) - names.begin()));
  return idx;
}

RecursiveResult run_oos(const RunConfig& cfg, const RunOptions& opt, const LoadedData& data) {
  const ModelSettings ms = model_settings(cfg, data.panel.names);
  std::vector<ForecastModel> models;
  for (const std::string& m : cfg.models) models.push_back(make_forecast_model(*parse_model(m), ms));
  EvaluationSettings es;
  es.benchmark = cfg.benchmark;
  es.variables = evaluated_indices(evaluated_names(cfg, data), data.panel.names);
  es.seed = cfg.seed;
  es.jobs = opt.jobs;
  OosScheme scheme = cfg.scheme;
  try {
    scheme.validate(data.panel.periods(), cfg.p);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config.scheme: ") + e.what());
  }
  logger(opt) << "recursive evaluation: " << models.size() << " models, "
              << data.panel.periods() - scheme.initial_window(data.panel.periods()) << " origins\n";
  return run_recursive(models, data.panel.values, data.panel.names, data.drivers.values, scheme, es);
}

void write_failures(const std::vector<CellFailure>& failures, const std::string& path) {
  std::ofstream out(path);
  out << "origin,model,message\n";
  for (const CellFailure& f : failures) {
    std::string msg = f.message;
    std::replace(msg.begin(), msg.end(), '"', '\'');
    out << f.origin << ',' << f.model << ",\"" << msg << "\"\n";
  }
}

}  // namespace

std::string resolve_output_dir(const std::string& flag, const RunConfig& cfg) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("AVPVAR_OUT"); env != nullptr && *env != '\0') return env;
  return cfg.output;
}

LoadedData load_data(const RunConfig& cfg) {
  if (cfg.data_path.empty()) throw ConfigError("config.data.path: required for this command");
  if (cfg.variables.empty()) throw ConfigError("config.variables: at least one variable is required");
  if (!fs::exists(cfg.data_path)) throw ConfigError("config.data.path: data file not found: " + cfg.data_path);
  const CsvSeries main = read_series_csv(cfg.data_path);
  std::vector<std::string> vnames;
  std::vector<Tcode> vcodes;
  for (const SeriesSpec& s : cfg.variables) {
    vnames.push_back(s.name);
    vcodes.push_back(tcode_from_int(s.tcode));
  }
  std::vector<std::string> znames;
  std::vector<Tcode> zcodes;
  for (const SeriesSpec& s : cfg.drivers) {
    znames.push_back(s.name);
    zcodes.push_back(tcode_from_int(s.tcode));
  }
  MatrixXd y = select_columns(main, vnames, cfg.data_path);
  MatrixXd z(main.values.rows(), 0);
  std::vector<std::string> dates = main.dates;
  if (!znames.empty()) {
    if (cfg.drivers_path.empty()) {
      z = select_columns(main, znames, cfg.data_path);
    } else {
      if (!fs::exists(cfg.drivers_path))
        throw ConfigError("config.data.drivers_path: driver file not found: " + cfg.drivers_path);
      const CsvSeries zf = read_series_csv(cfg.drivers_path);
      const MatrixXd zall = select_columns(zf, znames, cfg.drivers_path);
      // Inner join on the date labels.
      std::map<std::string, Eigen::Index> zrow;
      for (std::size_t i = 0; i < zf.dates.size(); ++i) zrow[zf.dates[i]] = static_cast<Eigen::Index>(i);
      std::vector<Eigen::Index> keep;
      std::vector<std::string> kd;
      for (std::size_t i = 0; i < dates.size(); ++i)
        if (zrow.count(dates[i])) {
          keep.push_back(static_cast<Eigen::Index>(i));
          kd.push_back(dates[i]);
        }
      if (keep.empty()) throw DataError(cfg.drivers_path + ": no dates in common with " + cfg.data_path);
      MatrixXd y2(static_cast<Eigen::Index>(keep.size()), y.cols());
      MatrixXd z2(static_cast<Eigen::Index>(keep.size()), zall.cols());
      for (std::size_t i = 0; i < keep.size(); ++i) {
        y2.row(static_cast<Eigen::Index>(i)) = y.row(keep[i]);
        z2.row(static_cast<Eigen::Index>(i)) = zall.row(zrow[kd[i]]);
      }
      y = y2;
      z = z2;
      dates = kd;
    }
  }
  MatrixXd all(y.rows(), y.cols() + z.cols());
  all << y, z;
  std::vector<std::string> allnames = vnames;
  allnames.insert(allnames.end(), znames.begin(), znames.end());
  trim_missing(all, dates, allnames, cfg.data_path);

  TimeSeriesPanel raw;
  raw.values = all.leftCols(y.cols());
  raw.dates = dates;
  raw.names = vnames;
  raw.tcodes = vcodes;
  LoadedData out;
  out.panel = transform_panel(raw);
  if (!znames.empty()) {
    TimeSeriesPanel rz;
    rz.values = all.rightCols(z.cols());
    rz.dates = dates;
    rz.names = znames;
    rz.tcodes = zcodes;
    const TimeSeriesPanel tz = transform_panel(rz);
    const Eigen::Index t = std::min(out.panel.periods(), tz.periods());
    out.panel.values = out.panel.values.bottomRows(t).eval();
    out.panel.dates.erase(out.panel.dates.begin(), out.panel.dates.end() - t);
    out.drivers.values = tz.values.bottomRows(t);
    out.drivers.names = znames;
  } else {
    out.drivers.values = MatrixXd(out.panel.periods(), 0);
  }
  out.panel.validate();
  return out;
}

int cmd_estimate(const RunConfig& cfg, const RunOptions& opt) {
  require_models(cfg);
  const LoadedData data = load_data(cfg);
  check_driver_models(cfg, data);
  prepare_output(opt);
  const StandardizedData sd = standardize(data.panel, data.drivers);
  const ModelSettings ms = model_settings(cfg, data.panel.names);
  std::vector<std::string> outputs;
  int failures = 0;
  json failed = json::array();
  for (const std::string& name : cfg.models) {
    const ModelKind kind = *parse_model(name);
    logger(opt) << "estimating " << name << '\n';
    try {
      const PredictiveModel fit = fit_model(kind, ms, sd.panel.values, sd.drivers.values, stream_key(cfg.seed, fnv1a(name)));
      // Summary over draws of the coefficients used at the forecast origin.
      const std::vector<std::string> vars =
          kind == ModelKind::Favar || kind == ModelKind::FavarSv
              ? [&] {
                  std::vector<std::string> v{"factor"};
                  v.insert(v.end(), data.panel.names.begin(), data.panel.names.end());
                  return v;
                }()
              : data.panel.names;
      const std::vector<std::string> coefs = coefficient_names(vars, cfg.p);
      const std::string file = "estimate_" + name + ".csv";
      std::ofstream out(out_path(opt, file));
      out << std::setprecision(10) << "equation,coefficient,mean,sd,q05,q95\n";
      const std::size_t nd = fit.draws.size();
      for (std::size_t i = 0; i < vars.size(); ++i)
        for (std::size_t c = 0; c < coefs.size(); ++c) {
          std::vector<double> v(nd);
          for (std::size_t d = 0; d < nd; ++d) v[d] = fit.draws[d].coefficients(i, c);
          double mean = 0.0, ss = 0.0;
          for (double x : v) mean += x;
          mean /= nd;
          for (double x : v) ss += (x - mean) * (x - mean);
          const double sdv = nd > 1 ? std::sqrt(ss / (nd - 1)) : 0.0;
          out << vars[i] << ',' << coefs[c] << ',' << mean << ',' << sdv << ',' << quantile_of(v, 0.05) << ','
              << quantile_of(v, 0.95) << '\n';
        }
      for (std::size_t i = 0; i < vars.size(); ++i)
        for (std::size_t j = 0; j < vars.size(); ++j) {
          std::vector<double> v(nd);
          for (std::size_t d = 0; d < nd; ++d) v[d] = fit.draws[d].covariance(i, j);
          double mean = 0.0, ss = 0.0;
          for (double x : v) mean += x;
          mean /= nd;
          for (double x : v) ss += (x - mean) * (x - mean);
          out << vars[i] << ",cov." << vars[j] << ',' << mean << ',' << (nd > 1 ? std::sqrt(ss / (nd - 1)) : 0.0)
              << ',' << quantile_of(v, 0.05) << ',' << quantile_of(v, 0.95) << '\n';
        }
      outputs.push_back(file);
    } catch (const std::exception& e) {
      ++failures;
      failed.push_back({{"model", name}, {"message", e.what()}});
      logger(opt) << "  failed: " << e.what() << '\n';
    }
  }
  outputs.push_back("metadata.json");
  write_metadata(cfg, opt, "estimate", outputs,
                 {{"standardization", "full sample, sample standard deviation"}, {"failures", failed}});
  return failures > 0 ? 1 : 0;
}

int cmd_forecast(const RunConfig& cfg, const RunOptions& opt) {
  require_models(cfg);
  require_benchmark(cfg);
  const LoadedData data = load_data(cfg);
  check_driver_models(cfg, data);
  prepare_output(opt);
  const RecursiveResult res = run_oos(cfg, opt, data);
  write_records_csv(res.records, data.panel.names, out_path(opt, "forecasts.csv"));
  write_scores_csv(res.scores, out_path(opt, "scores.csv"));
  write_failures(res.failures, out_path(opt, "failures.csv"));

  // Forecasts beyond the end of the sample from a full-sample fit.
  const int horizon = cfg.forecast_horizon > 0 ? cfg.forecast_horizon : cfg.scheme.max_horizon();
  const StandardizedData sd = standardize(data.panel, data.drivers);
  const ModelSettings ms = model_settings(cfg, data.panel.names);
  std::ofstream ahead(out_path(opt, "forecast_ahead.csv"));
  ahead << std::setprecision(10) << "model,variable,horizon,median,q10,q90\n";
  int failures = static_cast<int>(res.failures.size());
  for (const std::string& name : cfg.models) {
    try {
      const std::uint64_t tag = fnv1a(name);
      const PredictiveModel fit = fit_model(*parse_model(name), ms, sd.panel.values, sd.drivers.values,
                                            stream_key(cfg.seed, tag, static_cast<std::uint64_t>(data.panel.periods())));
      SeededStream rng(cfg.seed, stream_key(cfg.seed, tag, static_cast<std::uint64_t>(data.panel.periods()), 7));
      ForecastDistribution dist = forecast_model(fit, horizon, rng);
      destandardize(dist, sd.panel_state);
      const MatrixXd med = dist.median(), lo = dist.quantile(0.1), hi = dist.quantile(0.9);
      for (Eigen::Index j = 0; j < med.cols(); ++j)
        for (int h = 1; h <= horizon; ++h)
          ahead << name << ',' << data.panel.names[j] << ',' << h << ',' << med(h - 1, j) << ',' << lo(h - 1, j) << ','
                << hi(h - 1, j) << '\n';
    } catch (const std::exception& e) {
      ++failures;
      logger(opt) << name << " full-sample forecast failed: " << e.what() << '\n';
    }
  }
  write_metadata(cfg, opt, "forecast", {"forecasts.csv", "scores.csv", "failures.csv", "forecast_ahead.csv", "metadata.json"},
                 {{"failed_cells", res.failures.size()}, {"explosive_paths", res.explosive_paths}});
  return failures > 0 ? 1 : 0;
}

int cmd_evaluate(const RunConfig& cfg, const RunOptions& opt) {
  require_models(cfg);
  require_benchmark(cfg);
  const LoadedData data = load_data(cfg);
  check_driver_models(cfg, data);
  prepare_output(opt);
  const RecursiveResult res = run_oos(cfg, opt, data);
  write_scores_csv(res.scores, out_path(opt, "scores.csv"));
  const std::vector<std::string> eval = evaluated_names(cfg, data);
  const std::map<std::string, double> timing = cfg.report_timing ? res.seconds : std::map<std::string, double>{};
  const std::vector<std::pair<Metric, std::string>> tables{{Metric::Mspe, "table_mspe.csv"},
                                                           {Metric::Mae, "table_mae.csv"},
                                                           {Metric::Qs90, "table_qs90.csv"},
                                                           {Metric::Qs10, "table_qs10.csv"}};
  std::vector<std::string> outputs{"scores.csv"};
  for (const auto& [metric, file] : tables) {
    write_table_csv(res.scores, metric, eval, cfg.scheme.horizons, timing, out_path(opt, file));
    outputs.push_back(file);
  }
  write_long_csv(res.scores, out_path(opt, "scores_long.csv"));
  write_failures(res.failures, out_path(opt, "failures.csv"));
  outputs.insert(outputs.end(), {"scores_long.csv", "failures.csv", "metadata.json"});
  json secs = json::object();
  if (cfg.report_timing)
    for (const auto& [m, s] : res.seconds) secs[m] = s;
  write_metadata(cfg, opt, "evaluate", outputs,
                 {{"failed_cells", res.failures.size()},
                  {"explosive_paths", res.explosive_paths},
                  {"benchmark", cfg.benchmark},
                  {"timing_seconds", secs}});
  if (!res.failures.empty()) logger(opt) << res.failures.size() << " failed (origin, model) cells excluded\n";
  return res.failures.empty() ? 0 : 1;
}

int cmd_simulate(const RunConfig& cfg, const RunOptions& opt) {
  if (!cfg.simulate) throw ConfigError("config.simulate: required for the simulate command");
  prepare_output(opt);
  StudyConfig sc;
  sc.dgps = cfg.simulate->dgps;
  sc.sample_sizes = cfg.simulate->sample_sizes;
  sc.rhos = cfg.simulate->rhos;
  sc.drivers = cfg.simulate->drivers;
  sc.replications = cfg.simulate->replications;
  sc.random_start = cfg.simulate->random_start;
  sc.mcmc = cfg.mcmc;
  sc.seed = cfg.seed;
  sc.jobs = opt.jobs;
  sc.checkpoint = out_path(opt, "checkpoint.json");
  for (const DriverSpec& d : sc.drivers)
    for (int dgp : sc.dgps) {
      if (d.kind != DriverKind::Targeted) continue;
      if (dgp == 1 && d.m % 2 != 0) throw ConfigError("config.simulate.drivers: DGP1 targeted m must be even");
      if (dgp == 2 && d.m < 20) throw ConfigError("config.simulate.drivers: DGP2 targeted m must be at least 20");
    }
  // The checkpoint is only valid for the same configuration.
  {
    std::ifstream in(sc.checkpoint);
    if (in) {
      json cp;
      try {
        in >> cp;
      } catch (const std::exception&) {
        cp = json::object();
      }
      in.close();
      if (!cp.is_object() || cp.value("config_hash", "") != config_hash(cfg)) fs::remove(sc.checkpoint);
    }
    if (!fs::exists(sc.checkpoint)) {
      std::ofstream out(sc.checkpoint);
      out << json{{"config_hash", config_hash(cfg)}, {"groups", json::object()}}.dump(1);
    }
  }
  const StudyResult res = run_study(sc, [&](const std::string& group) { logger(opt) << "completed " << group << '\n'; });
  write_study_csv(res, out_path(opt, "study.csv"));
  {
    std::ofstream out(out_path(opt, "study_failures.csv"));
    out << "DGP,T,rho,model,replication,message\n";
    for (const StudyFailure& f : res.failures) {
      std::string msg = f.message;
      std::replace(msg.begin(), msg.end(), '"', '\'');
      out << f.dgp << ',' << f.T << ',' << f.rho << ',' << f.model << ',' << f.replication << ",\"" << msg << "\"\n";
    }
  }
  write_metadata(cfg, opt, "simulate", {"study.csv", "study_failures.csv", "checkpoint.json", "metadata.json"},
                 {{"cells", res.cell_count}, {"completed_cells", res.completed_cells}, {"failures", res.failures.size()}});
  return res.failures.empty() ? 0 : 1;
}

int cmd_compare(const RunConfig& cfg, const RunOptions& opt) {
  const LoadedData data = load_data(cfg);
  std::vector<std::string> models = cfg.models;
  if (models.empty()) models = {"AVP-VAR", "TVP-VAR", "TVP-VAR-EB", "UC-SV"};
  for (const std::string& m : models) {
    const ModelKind k = *parse_model(m);
    if (k != ModelKind::AvpVar && k != ModelKind::TvpVarFb && k != ModelKind::TvpVarEb && k != ModelKind::UcSv)
      throw ConfigError("config.models: compare supports AVP-VAR, TVP-VAR, TVP-VAR-EB and UC-SV, not " + m);
    if (k == ModelKind::AvpVar && data.drivers.count() == 0)
      throw ConfigError("config.drivers: model AVP-VAR needs at least one driver");
  }
  prepare_output(opt);
  const StandardizedData sd = standardize(data.panel, data.drivers);
  const ModelSettings ms = model_settings(cfg, data.panel.names);
  const VarDesign design = build_design(sd.panel.values, cfg.p);
  const Eigen::Index t = design.y.rows();
  const Eigen::Index n = design.y.cols();
  const Eigen::Index k = design.x.cols();
  std::vector<std::string> header;
  std::vector<VectorXd> intercepts;
  std::vector<VectorXd> cumres;
  int failures = 0;
  for (const std::string& name : models) {
    const ModelKind kind = *parse_model(name);
    logger(opt) << "in-sample fit " << name << '\n';
    MatrixXd icpt(t, n);
    MatrixXd resid(t, n);
    BenchmarkSpec bs;
    bs.p = cfg.p;
    bs.r = cfg.r;
    bs.mcmc = cfg.mcmc;
    bs.seed = cfg.seed;
    bs.stream = stream_key(cfg.seed, fnv1a(name), 1);
    bs.training_size = cfg.training_size;
    try {
      if (kind == ModelKind::AvpVar) {
        AvpModelSpec spec;
        spec.p = cfg.p;
        spec.r = cfg.r;
        spec.mcmc = cfg.mcmc;
        spec.seed = cfg.seed;
        spec.stream = bs.stream;
        spec.keep_paths = false;
        const AvpVarFit fit = run_gibbs(spec, sd.panel.values, sd.drivers.values);
        AugmentedCoefficients mean = fit.posterior.draws.front().coefficients;
        for (Eigen::Index i = 0; i < n; ++i) {
          mean.beta[i].setZero();
          for (const AvpDraw& d : fit.posterior.draws) mean.beta[i] += d.coefficients.beta[i];
          mean.beta[i] /= static_cast<double>(fit.posterior.draws.size());
        }
        const CoefficientPaths paths = recover_time_paths(mean, fit.posterior.c);
        for (Eigen::Index i = 0; i < n; ++i) {
          icpt.col(i) = paths.beta[i].col(0);
          resid.col(i) = design.y.col(i) - path_fit(design.x, paths.beta[i]);
        }
      } else if (kind == ModelKind::TvpVarFb) {
        const TvpFbPosterior post = fit_tvp_var_fb(sd.panel.values, bs);
        for (Eigen::Index i = 0; i < n; ++i) {
          icpt.col(i) = post.beta_mean[i].col(0);
          resid.col(i) = design.y.col(i) - path_fit(design.x, post.beta_mean[i]);
        }
      } else if (kind == ModelKind::TvpVarEb) {
        std::vector<int> ord = ms.ordering;
        if (ord.empty())
          for (Eigen::Index i = 0; i < n; ++i) ord.push_back(static_cast<int>(i));
        const TvpEbPosterior post = fit_tvp_var_eb(sd.panel.values, bs, ord);
        MatrixXd yp(sd.panel.values.rows(), n);
        for (Eigen::Index i = 0; i < n; ++i) yp.col(i) = sd.panel.values.col(ord[i]);
        const VarDesign dp = build_design(yp, cfg.p);
        for (Eigen::Index j = 0; j < n; ++j) {
          const MatrixXd path = post.beta_mean.middleCols(j * k, k);
          icpt.col(ord[j]) = path.col(0);
          resid.col(ord[j]) = dp.y.col(j) - path_fit(dp.x, path);
        }
      } else {
        for (Eigen::Index i = 0; i < n; ++i) {
          BenchmarkSpec si = bs;
          si.stream = stream_key(bs.stream, static_cast<std::uint64_t>(i) + 1);
          const VectorXd series = design.y.col(i);
          const UcsvPosterior post = fit_ucsv(series, si);
          icpt.col(i) = post.tau_mean;
          resid.col(i) = series - post.tau_mean;
        }
      }
    } catch (const std::exception& e) {
      ++failures;
      logger(opt) << "  failed: " << e.what() << '\n';
      continue;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      header.push_back(name + ":" + data.panel.names[i]);
      intercepts.push_back(icpt.col(i));
      VectorXd c(t);
      double acc = 0.0;
      for (Eigen::Index s = 0; s < t; ++s) c(s) = acc += std::abs(resid(s, i));
      cumres.push_back(c);
    }
  }
  std::vector<std::string> dates(data.panel.dates.end() - t, data.panel.dates.end());
  MatrixXd im(t, static_cast<Eigen::Index>(intercepts.size()));
  MatrixXd rm(t, static_cast<Eigen::Index>(cumres.size()));
  for (std::size_t j = 0; j < intercepts.size(); ++j) {
    im.col(static_cast<Eigen::Index>(j)) = intercepts[j];
    rm.col(static_cast<Eigen::Index>(j)) = cumres[j];
  }
  write_matrix_csv(out_path(opt, "intercepts.csv"), header, im, dates, "date");
  write_matrix_csv(out_path(opt, "cumulative_abs_residuals.csv"), header, rm, dates, "date");
  write_metadata(cfg, opt, "compare", {"intercepts.csv", "cumulative_abs_residuals.csv", "metadata.json"},
                 {{"scale", "standardized"}, {"failures", failures}});
  return failures > 0 ? 1 : 0;
}

}  // namespace avpvar
