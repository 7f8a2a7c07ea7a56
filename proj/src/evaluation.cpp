#include "avpvar/evaluation.hpp"

#include "avpvar/parallel.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <stdexcept>

namespace avpvar {

double pinball_loss(double realized, double quantile, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("pinball level must lie in (0, 1)");
  return tau * std::max(realized - quantile, 0.0) + (1.0 - tau) * std::max(quantile - realized, 0.0);
}

OosScheme OosScheme::monthly() {
  OosScheme s;
  s.horizons = {1, 2, 3, 4, 5, 6, 9, 12, 15, 18, 24};
  return s;
}

OosScheme OosScheme::quarterly() {
  OosScheme s;
  s.horizons = {1, 2, 3, 4, 5, 6, 7, 8};
  return s;
}

int OosScheme::max_horizon() const {
  int h = 0;
  for (int v : horizons) h = std::max(h, v);
  return h;
}

Eigen::Index OosScheme::initial_window(Eigen::Index periods) const {
  return static_cast<Eigen::Index>(std::ceil(initial_fraction * static_cast<double>(periods)));
}

void OosScheme::validate(Eigen::Index periods, int p) const {
  if (horizons.empty()) throw std::invalid_argument("evaluation needs at least one horizon");
  for (int h : horizons)
    if (h < 1) throw std::invalid_argument("forecast horizons must be positive");
  if (!(initial_fraction > 0.0 && initial_fraction < 1.0))
    throw std::invalid_argument("initial fraction must lie in (0, 1)");
  if (step < 1) throw std::invalid_argument("origin step must be at least 1");
  const Eigen::Index w = initial_window(periods);
  const Eigen::Index need = std::max<Eigen::Index>(p, min_window);
  if (w < need)
    throw std::invalid_argument("initial window of " + std::to_string(w) + " rows is below the minimum " +
                                std::to_string(need));
  if (w + 1 > periods) throw std::invalid_argument("no observations left to evaluate");
}

ForecastModel make_forecast_model(ModelKind kind, const ModelSettings& settings) {
  return {model_name(kind), [kind, settings](const MatrixXd& panel, const MatrixXd& drivers, std::uint64_t stream) {
            return fit_model(kind, settings, panel, drivers, stream);
          }};
}

const ScoreRow* ScoreTable::find(const std::string& variable, int horizon, const std::string& model) const {
  for (const ScoreRow& r : rows)
    if (r.variable == variable && r.horizon == horizon && r.model == model) return &r;
  return nullptr;
}

MatrixXd standardize_window(const MatrixXd& values, StandardizationState& state) {
  const Eigen::Index n = values.cols();
  state.means.resize(n);
  state.scales.resize(n);
  MatrixXd out(values.rows(), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double mean = values.col(j).mean();
    double sd = values.rows() > 1 ? sample_sd(values.col(j)) : 0.0;
    if (!(sd > 1e-12)) sd = 1.0;
    state.means(j) = mean;
    state.scales(j) = sd;
    out.col(j) = (values.col(j).array() - mean) / sd;
  }
  return out;
}

ScoreTable aggregate_scores(const std::vector<ForecastRecord>& records, const std::vector<std::string>& names,
                            const std::string& benchmark) {
  struct Acc {
    double se = 0, ae = 0, q90 = 0, q10 = 0;
    int n = 0;
  };
  std::map<std::tuple<int, int, std::string>, Acc> acc;
  std::vector<std::string> model_order;
  std::set<std::string> seen;
  for (const ForecastRecord& r : records) {
    if (seen.insert(r.model).second) model_order.push_back(r.model);
    Acc& a = acc[{r.variable, r.horizon, r.model}];
    const double e = r.realized - r.median;
    a.se += e * e;
    a.ae += std::abs(e);
    a.q90 += pinball_loss(r.realized, r.q90, 0.9);
    a.q10 += pinball_loss(r.realized, r.q10, 0.1);
    ++a.n;
  }
  ScoreTable table;
  table.benchmark = benchmark;
  for (const auto& [key, a] : acc) {
    const auto& [var, h, model] = key;
    ScoreRow row;
    row.variable = var < static_cast<int>(names.size()) ? names[var] : std::to_string(var);
    row.horizon = h;
    row.model = model;
    row.count = a.n;
    row.mspe = a.se / a.n;
    row.mae = a.ae / a.n;
    row.qs90 = a.q90 / a.n;
    row.qs10 = a.q10 / a.n;
    table.rows.push_back(row);
  }
  for (ScoreRow& row : table.rows) {
    const ScoreRow* b = nullptr;
    for (const ScoreRow& c : table.rows)
      if (c.variable == row.variable && c.horizon == row.horizon && c.model == benchmark) b = &c;
    if (b == nullptr) {
      row.mspe_ratio = row.mae_ratio = row.qs90_ratio = row.qs10_ratio = NAN;
      continue;
    }
    if (row.model == benchmark) {
      row.mspe_ratio = row.mae_ratio = row.qs90_ratio = row.qs10_ratio = 1.0;
      continue;
    }
    row.mspe_ratio = row.mspe / b->mspe;
    row.mae_ratio = row.mae / b->mae;
    row.qs90_ratio = row.qs90 / b->qs90;
    row.qs10_ratio = row.qs10 / b->qs10;
  }
  // Rows ordered by variable, horizon, then first appearance of the model.
  std::stable_sort(table.rows.begin(), table.rows.end(), [&](const ScoreRow& a, const ScoreRow& b) {
    auto vi = [&](const std::string& v) {
      return std::find(names.begin(), names.end(), v) - names.begin();
    };
    auto mi = [&](const std::string& m) {
      return std::find(model_order.begin(), model_order.end(), m) - model_order.begin();
    };
    if (vi(a.variable) != vi(b.variable)) return vi(a.variable) < vi(b.variable);
    if (a.horizon != b.horizon) return a.horizon < b.horizon;
    return mi(a.model) < mi(b.model);
  });
  return table;
}

RecursiveResult run_recursive(const std::vector<ForecastModel>& models, const MatrixXd& panel,
                              const std::vector<std::string>& names, const MatrixXd& drivers,
                              const OosScheme& scheme, const EvaluationSettings& settings) {
  if (models.empty()) throw std::invalid_argument("evaluation needs at least one model");
  bool has_benchmark = false;
  for (const ForecastModel& m : models) has_benchmark = has_benchmark || m.name == settings.benchmark;
  if (!has_benchmark) throw std::invalid_argument("benchmark " + settings.benchmark + " is not in the model list");
  if (drivers.cols() > 0 && drivers.rows() != panel.rows())
    throw std::invalid_argument("drivers and panel differ in length");
  if (static_cast<Eigen::Index>(names.size()) != panel.cols())
    throw std::invalid_argument("variable names do not match the panel");
  const Eigen::Index periods = panel.rows();
  scheme.validate(periods, 1);
  std::vector<int> vars = settings.variables;
  if (vars.empty())
    for (int j = 0; j < std::min<int>(2, static_cast<int>(panel.cols())); ++j) vars.push_back(j);
  for (int v : vars)
    if (v < 0 || v >= panel.cols()) throw std::invalid_argument("evaluated variable index out of range");
  const int hmax = scheme.max_horizon();

  std::vector<Eigen::Index> origins;
  for (Eigen::Index o = scheme.initial_window(periods); o <= periods - 1; o += scheme.step) origins.push_back(o);

  struct Task {
    std::vector<ForecastRecord> records;
    bool failed = false;
    std::string message;
    double seconds = 0.0;
    int explosive = 0;
  };
  const std::size_t nm = models.size();
  std::vector<Task> tasks(origins.size() * nm);
  parallel_for(tasks.size(), settings.jobs, [&](std::size_t idx) {
    const Eigen::Index origin = origins[idx / nm];
    const ForecastModel& model = models[idx % nm];
    Task& task = tasks[idx];
    const auto t0 = std::chrono::steady_clock::now();
    try {
      StandardizationState ps;
      StandardizationState ds;
      const MatrixXd ys = standardize_window(panel.topRows(origin), ps);
      const MatrixXd zs = drivers.cols() > 0 ? standardize_window(drivers.topRows(origin), ds)
                                             : MatrixXd(origin, 0);
      const std::uint64_t tag = fnv1a(model.name);
      const PredictiveModel fit = model.fit(ys, zs, stream_key(settings.seed, tag, static_cast<std::uint64_t>(origin)));
      SeededStream rng(settings.seed, stream_key(settings.seed, tag, static_cast<std::uint64_t>(origin), 7));
      ForecastDistribution dist = forecast_model(fit, hmax, rng);
      destandardize(dist, ps, settings.explosive_threshold);
      task.explosive = dist.explosive_paths;
      const MatrixXd med = dist.median();
      const MatrixXd lo = dist.quantile(0.1);
      const MatrixXd hi = dist.quantile(0.9);
      for (int h : scheme.horizons) {
        const Eigen::Index target = origin - 1 + h;
        if (target > periods - 1) continue;
        for (int v : vars) {
          ForecastRecord r;
          r.origin = origin;
          r.model = model.name;
          r.variable = v;
          r.horizon = h;
          r.realized = panel(target, v);
          r.median = med(h - 1, v);
          r.q10 = lo(h - 1, v);
          r.q90 = hi(h - 1, v);
          if (!std::isfinite(r.median) || !std::isfinite(r.q10) || !std::isfinite(r.q90))
            throw NumericalError("non-finite forecast quantiles");
          task.records.push_back(r);
        }
      }
    } catch (const std::exception& e) {
      task.failed = true;
      task.records.clear();
      task.message = e.what();
    }
    task.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  });

  RecursiveResult result;
  result.variable_names = names;
  for (const ForecastModel& m : models) result.seconds[m.name] = 0.0;
  for (std::size_t idx = 0; idx < tasks.size(); ++idx) {
    const Task& t = tasks[idx];
    result.seconds[models[idx % nm].name] += t.seconds;
    result.explosive_paths += t.explosive;
    if (t.failed) {
      result.failures.push_back({origins[idx / nm], models[idx % nm].name, t.message});
      continue;
    }
    result.records.insert(result.records.end(), t.records.begin(), t.records.end());
  }
  result.scores = aggregate_scores(result.records, names, settings.benchmark);
  return result;
}

std::string metric_name(Metric m) {
  switch (m) {
    case Metric::Mspe: return "MSPE";
    case Metric::Mae: return "MAE";
    case Metric::Qs90: return "QS90";
    case Metric::Qs10: return "QS10";
  }
  return "";
}

namespace {

double ratio_of(const ScoreRow& r, Metric m) {
  switch (m) {
    case Metric::Mspe: return r.mspe_ratio;
    case Metric::Mae: return r.mae_ratio;
    case Metric::Qs90: return r.qs90_ratio;
    case Metric::Qs10: return r.qs10_ratio;
  }
  return NAN;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << std::setprecision(10);
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace

void write_scores_csv(const ScoreTable& table, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "variable,horizon,model,MSPE,MAE,QS90,QS10,MSPE_ratio,MAE_ratio,QS90_ratio,QS10_ratio,count\n";
  for (const ScoreRow& r : table.rows)
    out << csv_field(r.variable) << ',' << r.horizon << ',' << r.model << ',' << r.mspe << ',' << r.mae << ','
        << r.qs90 << ',' << r.qs10 << ',' << r.mspe_ratio << ',' << r.mae_ratio << ',' << r.qs90_ratio << ','
        << r.qs10_ratio << ',' << r.count << '\n';
}

void write_table_csv(const ScoreTable& table, Metric metric, const std::vector<std::string>& variables,
                     const std::vector<int>& horizons, const std::map<std::string, double>& seconds,
                     const std::string& path) {
  std::ofstream out = open_out(path);
  out << std::fixed << std::setprecision(3);
  out << "panel,h";
  for (ModelKind k : table_models()) out << ',' << model_name(k);
  out << '\n';
  char letter = 'A';
  for (const std::string& v : variables) {
    const std::string panel = std::string("Panel ") + letter++ + ": " + v;
    for (int h : horizons) {
      out << csv_field(panel) << ',' << h;
      for (ModelKind k : table_models()) {
        out << ',';
        const ScoreRow* r = table.find(v, h, model_name(k));
        if (r != nullptr && std::isfinite(ratio_of(*r, metric))) out << ratio_of(*r, metric);
      }
      out << '\n';
    }
  }
  const std::string speed = std::string("Panel ") + letter + ": Computational speed (total time relative to TVP-VAR-EB)";
  out << csv_field(speed) << ",Ratio";
  const auto eb = seconds.find("TVP-VAR-EB");
  for (ModelKind k : table_models()) {
    out << ',';
    const auto it = seconds.find(model_name(k));
    if (it != seconds.end() && eb != seconds.end() && eb->second > 0.0) out << it->second / eb->second;
  }
  out << '\n';
}

void write_long_csv(const ScoreTable& table, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "variable,horizon,metric,model,value\n";
  for (Metric m : {Metric::Mspe, Metric::Mae, Metric::Qs90, Metric::Qs10})
    for (const ScoreRow& r : table.rows)
      out << csv_field(r.variable) << ',' << r.horizon << ',' << metric_name(m) << ',' << r.model << ','
          << ratio_of(r, m) << '\n';
}

void write_records_csv(const std::vector<ForecastRecord>& records, const std::vector<std::string>& names,
                       const std::string& path) {
  std::ofstream out = open_out(path);
  out << "origin,model,variable,horizon,realized,median,q10,q90\n";
  for (const ForecastRecord& r : records)
    out << r.origin << ',' << r.model << ',' << csv_field(names[r.variable]) << ',' << r.horizon << ',' << r.realized
        << ',' << r.median << ',' << r.q10 << ',' << r.q90 << '\n';
}

}  // namespace avpvar
