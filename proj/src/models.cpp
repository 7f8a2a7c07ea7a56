#include "avpvar/models.hpp"

#include <numeric>
#include <stdexcept>

namespace avpvar {

namespace {

struct NameEntry {
  ModelKind kind;
  const char* name;
};

constexpr NameEntry kNames[] = {
    {ModelKind::AvpVar, "AVP-VAR"},     {ModelKind::CpVar, "CP-VAR"},     {ModelKind::CpVarSv, "CP-VAR-SV"},
    {ModelKind::TvpVarEb, "TVP-VAR-EB"}, {ModelKind::TvpVarFb, "TVP-VAR"}, {ModelKind::VarSvot, "VAR-SVOt"},
    {ModelKind::Favar, "FAVAR"},        {ModelKind::FavarSv, "FAVAR-SV"}, {ModelKind::OlsVar, "OLS-VAR"},
    {ModelKind::UcSv, "UC-SV"},
};

BenchmarkSpec benchmark_spec(const ModelSettings& s, std::uint64_t stream) {
  BenchmarkSpec b;
  b.p = s.p;
  b.r = s.r;
  b.mcmc = s.mcmc;
  b.seed = s.seed;
  b.stream = stream;
  b.training_size = s.training_size;
  return b;
}

std::vector<int> all_columns(Eigen::Index n, int offset = 0) {
  std::vector<int> c(static_cast<std::size_t>(n));
  std::iota(c.begin(), c.end(), offset);
  return c;
}

}  // namespace

const std::vector<ModelKind>& table_models() {
  static const std::vector<ModelKind> m{ModelKind::AvpVar,   ModelKind::CpVar,   ModelKind::CpVarSv,
                                        ModelKind::TvpVarEb, ModelKind::TvpVarFb, ModelKind::VarSvot,
                                        ModelKind::Favar,    ModelKind::FavarSv};
  return m;
}

std::vector<std::string> model_names() {
  std::vector<std::string> out;
  for (const NameEntry& e : kNames) out.emplace_back(e.name);
  return out;
}

std::string model_name(ModelKind kind) {
  for (const NameEntry& e : kNames)
    if (e.kind == kind) return e.name;
  return "";
}

std::optional<ModelKind> parse_model(const std::string& name) {
  for (const NameEntry& e : kNames)
    if (name == e.name) return e.kind;
  if (name == "TVP-VAR-FB") return ModelKind::TvpVarFb;
  return std::nullopt;
}

bool model_uses_drivers(ModelKind kind) {
  return kind == ModelKind::AvpVar || kind == ModelKind::Favar || kind == ModelKind::FavarSv;
}

PredictiveModel fit_model(ModelKind kind, const ModelSettings& s, const MatrixXd& panel, const MatrixXd& drivers,
                          std::uint64_t stream) {
  const Eigen::Index n = panel.cols();
  if (panel.rows() <= s.p) throw DataError("insufficient data for p = " + std::to_string(s.p));
  PredictiveModel out;
  out.p = s.p;
  out.history = panel.bottomRows(s.p);
  out.output_columns = all_columns(n);
  const BenchmarkSpec bs = benchmark_spec(s, stream);
  switch (kind) {
    case ModelKind::AvpVar: {
      AvpModelSpec spec;
      spec.p = s.p;
      spec.r = s.r;
      spec.mcmc = s.mcmc;
      spec.seed = s.seed;
      spec.stream = stream;
      spec.keep_paths = false;
      const AvpVarFit fit = run_gibbs(spec, panel, drivers);
      out.draws = predictive_draws(fit.posterior, fit.c_next);
      break;
    }
    case ModelKind::CpVar:
      out.draws = predictive_draws(fit_cp_var(panel, bs), VectorXd());
      break;
    case ModelKind::CpVarSv:
      out.draws = fit_cp_var_sv(panel, bs).predictive;
      break;
    case ModelKind::TvpVarEb:
      out.draws = fit_tvp_var_eb(panel, bs, s.ordering).predictive;
      break;
    case ModelKind::TvpVarFb:
      out.draws = fit_tvp_var_fb(panel, bs).predictive;
      break;
    case ModelKind::VarSvot:
      out.draws = fit_var_svot(panel, bs).predictive;
      break;
    case ModelKind::Favar:
    case ModelKind::FavarSv: {
      const FavarFit fit = fit_favar(panel, drivers, kind == ModelKind::FavarSv, bs, s.ols_draws);
      out.draws = fit.predictive;
      out.history = fit.augmented.bottomRows(s.p);
      out.output_columns = all_columns(n, 1);
      break;
    }
    case ModelKind::OlsVar: {
      const OlsVarFit fit = fit_ols_var(panel, s.p);
      out.draws = replicate_predictive(fit.coefficients, fit.covariance, s.ols_draws);
      break;
    }
    case ModelKind::UcSv: {
      std::vector<UcsvPosterior> fits;
      for (Eigen::Index i = 0; i < n; ++i) {
        BenchmarkSpec si = bs;
        si.stream = stream_key(stream, static_cast<std::uint64_t>(i) + 1);
        fits.push_back(fit_ucsv(panel.col(i), si));
      }
      out.draws = ucsv_predictive(fits, s.p);
      break;
    }
  }
  if (out.draws.empty()) throw std::runtime_error(model_name(kind) + " produced no predictive draws");
  return out;
}

ForecastDistribution forecast_model(const PredictiveModel& model, int horizon, SeededStream& rng) {
  ForecastDistribution full = simulate_forecasts(model.draws, model.history, model.p, horizon, rng);
  const Eigen::Index sys = full.series();
  bool identity = static_cast<Eigen::Index>(model.output_columns.size()) == sys;
  for (std::size_t j = 0; identity && j < model.output_columns.size(); ++j)
    identity = model.output_columns[j] == static_cast<int>(j);
  if (identity) return full;
  ForecastDistribution out;
  out.paths.reserve(full.paths.size());
  for (const MatrixXd& path : full.paths) {
    MatrixXd sel(path.rows(), static_cast<Eigen::Index>(model.output_columns.size()));
    for (std::size_t j = 0; j < model.output_columns.size(); ++j)
      sel.col(static_cast<Eigen::Index>(j)) = path.col(model.output_columns[j]);
    out.paths.push_back(std::move(sel));
  }
  return out;
}

}  // namespace avpvar
