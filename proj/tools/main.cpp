#include "avpvar/commands.hpp"
#include "avpvar/parallel.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  int jobs = 0;
  std::string out;
  std::optional<std::string> preset;
  bool quiet = false;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
  sub->add_option("--seed", f.seed, "override the configured seed");
  sub->add_option("--jobs", f.jobs, "worker threads (default: hardware concurrency)")->check(CLI::PositiveNumber);
  sub->add_option("--out", f.out, "output directory (overrides AVPVAR_OUT and the config)");
  sub->add_option("--preset", f.preset, "MCMC preset")->check(CLI::IsMember({"mc", "insample"}));
  sub->add_flag("--quiet", f.quiet, "suppress progress messages");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive parameter VAR estimation, forecasting and simulation"};
  app.set_version_flag("--version", std::string("avpvar ") + avpvar::kToolVersion);
  app.require_subcommand(1);
  Flags flags;
  using Cmd = int (*)(const avpvar::RunConfig&, const avpvar::RunOptions&);
  const std::vector<std::tuple<std::string, std::string, Cmd>> commands{
      {"estimate", "full-sample posterior summaries", avpvar::cmd_estimate},
      {"forecast", "recursive forecasts and forecasts beyond the sample end", avpvar::cmd_forecast},
      {"evaluate", "recursive out-of-sample evaluation and ratio tables", avpvar::cmd_evaluate},
      {"simulate", "Monte Carlo parameter-tracking study", avpvar::cmd_simulate},
      {"compare", "in-sample intercept paths and cumulative absolute residuals", avpvar::cmd_compare}};
  std::vector<std::pair<CLI::App*, Cmd>> subs;
  for (const auto& [name, help, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, flags);
    subs.emplace_back(sub, fn);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    avpvar::RunConfig cfg = avpvar::load_config(flags.config);
    avpvar::apply_overrides(cfg, flags.seed, flags.preset);
    avpvar::RunOptions opt;
    opt.jobs = flags.jobs > 0 ? flags.jobs : avpvar::default_jobs();
    opt.output_dir = avpvar::resolve_output_dir(flags.out, cfg);
    opt.log = flags.quiet ? nullptr : &std::cerr;
    for (const auto& [sub, fn] : subs)
      if (sub->parsed()) return fn(cfg, opt);
  } catch (const avpvar::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const avpvar::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
