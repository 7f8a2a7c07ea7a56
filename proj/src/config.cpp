#include "avpvar/config.hpp"

#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace avpvar {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) { throw ConfigError(path + ": " + msg); }

void reject_unknown(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) {
      std::string list;
      for (const std::string& a : allowed) list += (list.empty() ? "" : ", ") + a;
      fail(path + "." + it.key(), "unknown key (allowed: " + list + ")");
    }
}

std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

long long get_int(const json& v, const std::string& path, long long lo, long long hi = (1LL << 53)) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  const long long x = v.get<long long>();
  if (x < lo || x > hi) fail(path, "value " + std::to_string(x) + " out of range [" + std::to_string(lo) + ", " +
                                       std::to_string(hi) + "]");
  return x;
}

double get_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

bool get_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) fail(path, "expected true or false");
  return v.get<bool>();
}

const json& get_array(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array");
  return v;
}

std::string idx(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

std::vector<SeriesSpec> parse_series(const json& v, const std::string& path) {
  std::vector<SeriesSpec> out;
  std::set<std::string> seen;
  const json& arr = get_array(v, path);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string p = idx(path, i);
    reject_unknown(arr[i], p, {"name", "tcode"});
    if (!arr[i].contains("name")) fail(p, "missing required key 'name'");
    SeriesSpec s;
    s.name = get_string(arr[i]["name"], p + ".name");
    if (s.name.empty()) fail(p + ".name", "must not be empty");
    if (!seen.insert(s.name).second) fail(p + ".name", "duplicate series " + s.name);
    if (arr[i].contains("tcode")) {
      s.tcode = static_cast<int>(get_int(arr[i]["tcode"], p + ".tcode", 1, 6));
      if (s.tcode != 1 && s.tcode != 2 && s.tcode != 5 && s.tcode != 6) fail(p + ".tcode", "must be one of 1, 2, 5, 6");
    }
    out.push_back(s);
  }
  return out;
}

std::vector<std::string> parse_strings(const json& v, const std::string& path) {
  std::vector<std::string> out;
  const json& arr = get_array(v, path);
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(get_string(arr[i], idx(path, i)));
  return out;
}

std::string valid_model_list() {
  std::string s;
  for (const std::string& n : model_names()) s += (s.empty() ? "" : ", ") + n;
  return s;
}

json to_canonical(const RunConfig& c) {
  json j;
  j["data"] = {{"path", c.data_path}, {"drivers_path", c.drivers_path}};
  j["variables"] = json::array();
  for (const SeriesSpec& s : c.variables) j["variables"].push_back({{"name", s.name}, {"tcode", s.tcode}});
  j["drivers"] = json::array();
  for (const SeriesSpec& s : c.drivers) j["drivers"].push_back({{"name", s.name}, {"tcode", s.tcode}});
  j["evaluate"] = c.evaluate;
  j["models"] = c.models;
  j["benchmark"] = c.benchmark;
  j["p"] = c.p;
  j["r"] = c.r;
  j["preset"] = c.preset;
  j["mcmc"] = {{"iterations", c.mcmc.iterations}, {"burn_in", c.mcmc.burn_in}, {"thin", c.mcmc.thin}};
  j["scheme"] = {{"horizons", c.scheme.horizons},
                 {"initial_fraction", c.scheme.initial_fraction},
                 {"step", c.scheme.step},
                 {"min_window", c.scheme.min_window}};
  j["ordering"] = c.ordering;
  j["forecast_horizon"] = c.forecast_horizon;
  j["ols_draws"] = c.ols_draws;
  j["training_size"] = c.training_size;
  j["report_timing"] = c.report_timing;
  j["seed"] = c.seed;
  j["output"] = c.output;
  if (c.simulate) {
    json s;
    s["dgps"] = c.simulate->dgps;
    s["T"] = c.simulate->sample_sizes;
    s["rho"] = c.simulate->rhos;
    s["drivers"] = json::array();
    for (const DriverSpec& d : c.simulate->drivers) s["drivers"].push_back({{"kind", driver_kind_name(d.kind)}, {"m", d.m}});
    s["replications"] = c.simulate->replications;
    s["random_start"] = c.simulate->random_start;
    j["simulate"] = s;
  }
  return j;
}

}  // namespace

McmcSettings preset_settings(const std::string& preset) {
  if (preset == "mc") return McmcSettings::mc();
  if (preset == "insample") return McmcSettings::insample();
  throw ConfigError("preset: unknown preset '" + preset + "' (valid: mc, insample)");
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  const std::string root = "config";
  reject_unknown(j, root,
                 {"data", "variables", "drivers", "evaluate", "models", "benchmark", "p", "r", "preset", "mcmc",
                  "scheme", "ordering", "forecast_horizon", "ols_draws", "training_size", "report_timing", "seed",
                  "output", "simulate"});
  RunConfig c;
  if (j.contains("data")) {
    reject_unknown(j["data"], root + ".data", {"path", "drivers_path"});
    if (j["data"].contains("path")) c.data_path = get_string(j["data"]["path"], root + ".data.path");
    if (j["data"].contains("drivers_path"))
      c.drivers_path = get_string(j["data"]["drivers_path"], root + ".data.drivers_path");
  }
  if (j.contains("variables")) c.variables = parse_series(j["variables"], root + ".variables");
  if (j.contains("drivers")) c.drivers = parse_series(j["drivers"], root + ".drivers");
  if (j.contains("evaluate")) c.evaluate = parse_strings(j["evaluate"], root + ".evaluate");
  if (j.contains("models")) {
    c.models = parse_strings(j["models"], root + ".models");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < c.models.size(); ++i) {
      const auto kind = parse_model(c.models[i]);
      if (!kind) fail(idx(root + ".models", i), "unknown model '" + c.models[i] + "' (valid: " + valid_model_list() + ")");
      c.models[i] = model_name(*kind);
      if (!seen.insert(c.models[i]).second) fail(idx(root + ".models", i), "duplicate model " + c.models[i]);
    }
  }
  if (j.contains("benchmark")) {
    c.benchmark = get_string(j["benchmark"], root + ".benchmark");
    const auto kind = parse_model(c.benchmark);
    if (!kind) fail(root + ".benchmark", "unknown model '" + c.benchmark + "' (valid: " + valid_model_list() + ")");
    c.benchmark = model_name(*kind);
  }
  if (j.contains("p")) c.p = static_cast<int>(get_int(j["p"], root + ".p", 1, 24));
  if (j.contains("r")) c.r = static_cast<int>(get_int(j["r"], root + ".r", 0, 10));
  if (j.contains("preset")) {
    c.preset = get_string(j["preset"], root + ".preset");
    if (c.preset != "mc" && c.preset != "insample" && c.preset != "custom")
      fail(root + ".preset", "must be one of mc, insample, custom");
  }
  if (j.contains("mcmc")) {
    if (c.preset != "custom") fail(root + ".mcmc", "only allowed with preset \"custom\"");
    reject_unknown(j["mcmc"], root + ".mcmc", {"iterations", "burn_in", "thin"});
    for (const char* k : {"iterations", "burn_in", "thin"})
      if (!j["mcmc"].contains(k)) fail(root + ".mcmc", std::string("missing required key '") + k + "'");
    c.mcmc.iterations = static_cast<int>(get_int(j["mcmc"]["iterations"], root + ".mcmc.iterations", 1, 100000000));
    c.mcmc.burn_in = static_cast<int>(get_int(j["mcmc"]["burn_in"], root + ".mcmc.burn_in", 0, 100000000));
    c.mcmc.thin = static_cast<int>(get_int(j["mcmc"]["thin"], root + ".mcmc.thin", 1, 100000));
    if (c.mcmc.iterations <= c.mcmc.burn_in) fail(root + ".mcmc", "iterations must exceed burn_in");
  } else if (c.preset == "custom") {
    fail(root + ".preset", "preset \"custom\" requires an mcmc block");
  } else {
    c.mcmc = preset_settings(c.preset);
  }
  if (j.contains("scheme")) {
    const std::string sp = root + ".scheme";
    const json& s = j["scheme"];
    reject_unknown(s, sp, {"frequency", "horizons", "initial_fraction", "step", "min_window"});
    if (s.contains("frequency")) {
      const std::string f = get_string(s["frequency"], sp + ".frequency");
      if (f == "monthly")
        c.scheme = OosScheme::monthly();
      else if (f == "quarterly")
        c.scheme = OosScheme::quarterly();
      else
        fail(sp + ".frequency", "must be monthly or quarterly");
    }
    if (s.contains("horizons")) {
      const json& arr = get_array(s["horizons"], sp + ".horizons");
      if (arr.empty()) fail(sp + ".horizons", "must not be empty");
      c.scheme.horizons.clear();
      for (std::size_t i = 0; i < arr.size(); ++i)
        c.scheme.horizons.push_back(static_cast<int>(get_int(arr[i], idx(sp + ".horizons", i), 1, 1000)));
    }
    if (s.contains("initial_fraction")) {
      c.scheme.initial_fraction = get_number(s["initial_fraction"], sp + ".initial_fraction");
      if (!(c.scheme.initial_fraction > 0.0 && c.scheme.initial_fraction < 1.0))
        fail(sp + ".initial_fraction", "must lie in (0, 1)");
    }
    if (s.contains("step")) c.scheme.step = static_cast<int>(get_int(s["step"], sp + ".step", 1, 100000));
    if (s.contains("min_window"))
      c.scheme.min_window = static_cast<int>(get_int(s["min_window"], sp + ".min_window", 1, 100000));
  }
  if (j.contains("ordering")) c.ordering = parse_strings(j["ordering"], root + ".ordering");
  if (j.contains("forecast_horizon"))
    c.forecast_horizon = static_cast<int>(get_int(j["forecast_horizon"], root + ".forecast_horizon", 0, 1000));
  if (j.contains("ols_draws")) c.ols_draws = static_cast<int>(get_int(j["ols_draws"], root + ".ols_draws", 1, 1000000));
  if (j.contains("training_size"))
    c.training_size = static_cast<int>(get_int(j["training_size"], root + ".training_size", 2, 100000));
  if (j.contains("report_timing")) c.report_timing = get_bool(j["report_timing"], root + ".report_timing");
  if (j.contains("seed")) c.seed = static_cast<std::uint64_t>(get_int(j["seed"], root + ".seed", 0));
  if (j.contains("output")) c.output = get_string(j["output"], root + ".output");
  if (j.contains("simulate")) {
    const std::string sp = root + ".simulate";
    const json& s = j["simulate"];
    reject_unknown(s, sp, {"dgps", "T", "rho", "drivers", "replications", "random_start"});
    SimulateSpec sim;
    if (s.contains("dgps")) {
      sim.dgps.clear();
      const json& arr = get_array(s["dgps"], sp + ".dgps");
      for (std::size_t i = 0; i < arr.size(); ++i) sim.dgps.push_back(static_cast<int>(get_int(arr[i], idx(sp + ".dgps", i), 1, 2)));
    }
    if (s.contains("T")) {
      sim.sample_sizes.clear();
      const json& arr = get_array(s["T"], sp + ".T");
      for (std::size_t i = 0; i < arr.size(); ++i)
        sim.sample_sizes.push_back(static_cast<int>(get_int(arr[i], idx(sp + ".T", i), 11, 1000000)));
    }
    if (s.contains("rho")) {
      sim.rhos.clear();
      const json& arr = get_array(s["rho"], sp + ".rho");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const double r = get_number(arr[i], idx(sp + ".rho", i));
        if (!(r > -1.0 && r < 1.0)) fail(idx(sp + ".rho", i), "must lie in (-1, 1)");
        sim.rhos.push_back(r);
      }
    }
    if (s.contains("drivers")) {
      sim.drivers.clear();
      const json& arr = get_array(s["drivers"], sp + ".drivers");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string dp = idx(sp + ".drivers", i);
        reject_unknown(arr[i], dp, {"kind", "m"});
        if (!arr[i].contains("kind") || !arr[i].contains("m")) fail(dp, "requires 'kind' and 'm'");
        DriverSpec d;
        const std::string kind = get_string(arr[i]["kind"], dp + ".kind");
        if (kind == "agnostic")
          d.kind = DriverKind::Agnostic;
        else if (kind == "targeted")
          d.kind = DriverKind::Targeted;
        else
          fail(dp + ".kind", "must be agnostic or targeted");
        d.m = static_cast<int>(get_int(arr[i]["m"], dp + ".m", 1, 10000));
        sim.drivers.push_back(d);
      }
    }
    for (const std::vector<int>* v : {&sim.dgps, &sim.sample_sizes})
      if (v->empty()) fail(sp, "grid lists must not be empty");
    if (sim.rhos.empty() || sim.drivers.empty()) fail(sp, "grid lists must not be empty");
    if (s.contains("replications"))
      sim.replications = static_cast<int>(get_int(s["replications"], sp + ".replications", 1, 1000000));
    if (s.contains("random_start")) sim.random_start = get_bool(s["random_start"], sp + ".random_start");
    c.simulate = sim;
  }

  // Cross-field checks.
  std::set<std::string> names;
  for (const SeriesSpec& s : c.variables) names.insert(s.name);
  for (const SeriesSpec& s : c.drivers)
    if (names.count(s.name)) fail(root + ".drivers", "series " + s.name + " is both a variable and a driver");
  for (std::size_t i = 0; i < c.evaluate.size(); ++i)
    if (!names.count(c.evaluate[i])) fail(idx(root + ".evaluate", i), "not a configured variable: " + c.evaluate[i]);
  if (!c.ordering.empty()) {
    if (c.ordering.size() != c.variables.size()) fail(root + ".ordering", "must list every variable exactly once");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < c.ordering.size(); ++i)
      if (!names.count(c.ordering[i]) || !seen.insert(c.ordering[i]).second)
        fail(idx(root + ".ordering", i), "must list every variable exactly once");
  }
  c.canonical = to_canonical(c).dump();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config_text(ss.str(), path);
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.rfind(path, 0) == 0) throw;
    throw ConfigError(path + ": " + msg);
  }
}

void apply_overrides(RunConfig& cfg, std::optional<std::uint64_t> seed, std::optional<std::string> preset) {
  if (seed) cfg.seed = *seed;
  if (preset) {
    cfg.mcmc = preset_settings(*preset);
    cfg.preset = *preset;
  }
  cfg.canonical = to_canonical(cfg).dump();
}

std::string config_hash(const RunConfig& cfg) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << fnv1a(cfg.canonical);
  return s.str();
}

}  // namespace avpvar
