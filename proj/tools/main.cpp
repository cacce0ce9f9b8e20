// bib: command-line front end for the inference experiments.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "bib/error.hpp"
#include "bib/experiments.hpp"
#include "bib/io.hpp"

namespace {

struct CommonOptions {
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<double> beta;
  std::optional<std::int64_t> steps;
  std::optional<std::int64_t> burnin;
  std::optional<int> replicas;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "flat key=value config file")->check(CLI::ExistingFile);
  cmd->add_option("--set", o.sets, "override one config key (key=value), repeatable");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--mode", o.mode, "bayes or bib");
  cmd->add_option("--beta", o.beta, "discount rate");
  cmd->add_option("--steps", o.steps, "total steps including burn-in");
  cmd->add_option("--burnin", o.burnin, "discarded prefix");
  cmd->add_option("--replicas", o.replicas, "independent replicas");
}

// Config file first, then --set, then the dedicated flags.
bib::Settings collect_settings(const CommonOptions& o) {
  bib::Settings s;
  if (!o.config.empty()) s = bib::parse_settings(bib::read_file(o.config));
  for (const std::string& kv : o.sets) {
    for (const auto& [k, v] : bib::parse_settings(kv)) s[k] = v;
  }
  if (o.seed) s["seed"] = std::to_string(*o.seed);
  if (o.mode) s["mode"] = *o.mode;
  if (o.beta) s["beta"] = bib::format_double(*o.beta);
  if (o.steps) s["steps"] = std::to_string(*o.steps);
  if (o.burnin) s["burnin"] = std::to_string(*o.burnin);
  if (o.replicas) s["replicas"] = std::to_string(*o.replicas);
  return s;
}

int fail(std::string_view code, const std::string& message) {
  std::cerr << nlohmann::json{{"error", code}, {"message", message}}.dump() << std::endl;
  return code == "usage" ? 2 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian / inverse-Bayesian inference experiments"};
  app.require_subcommand(1);

  CommonOptions sim_opts;
  std::string sim_out;
  auto* sim = app.add_subcommand("simulate", "write a post-burn-in trace CSV");
  add_common(sim, sim_opts);
  sim->add_option("--out", sim_out, "trace file (or directory when replicas > 1)")->required();

  CommonOptions sweep_opts;
  std::string sweep_out;
  std::optional<double> beta_start, beta_end, beta_step;
  std::optional<std::string> modes;
  auto* sweep = app.add_subcommand("sweep", "replica-averaged split RMSE over a beta grid");
  add_common(sweep, sweep_opts);
  sweep->add_option("--beta-start", beta_start);
  sweep->add_option("--beta-end", beta_end);
  sweep->add_option("--beta-step", beta_step);
  sweep->add_option("--modes", modes, "comma-separated subset of bayes,bib");
  sweep->add_option("--out", sweep_out, "summary CSV")->required();

  std::string trace_path, analyze_out;
  double analyze_beta = 0.0;
  int intervals = 100;
  auto* analyze = app.add_subcommand("analyze", "rest periods, resets and burst/change test");
  analyze->add_option("--trace", trace_path, "trace CSV from simulate")->required();
  analyze->add_option("--beta", analyze_beta, "activity threshold")->required();
  analyze->add_option("--intervals", intervals, "bins for the contingency table");
  analyze->add_option("--out", analyze_out, "report JSON")->required();

  std::string durations_path, fit_out;
  auto* fittail = app.add_subcommand("fittail", "TP vs EP fit and model selection");
  fittail->add_option("--durations", durations_path, "single-column duration CSV")->required();
  fittail->add_option("--out", fit_out, "ModelSelection JSON")->required();

  std::string figure, repro_out;
  std::uint64_t repro_seed = 1;
  double scale = 1.0;
  auto* reproduce = app.add_subcommand("reproduce", "run a figure pipeline at desk scale");
  reproduce->add_option("--figure", figure, "fig3, fig6, fig8, fig9 or fig10")->required();
  reproduce->add_option("--seed", repro_seed, "master seed");
  reproduce->add_option("--scale", scale, "replica and step multiplier");
  reproduce->add_option("--out", repro_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what());
  }

  try {
    if (*sim) {
      bib::RunConfig cfg;
      bib::apply_settings(cfg, collect_settings(sim_opts));
      bib::cmd_simulate(cfg, sim_out);
    } else if (*sweep) {
      bib::SweepConfig cfg;
      bib::Settings s = collect_settings(sweep_opts);
      if (beta_start) s["beta_start"] = bib::format_double(*beta_start);
      if (beta_end) s["beta_end"] = bib::format_double(*beta_end);
      if (beta_step) s["beta_step"] = bib::format_double(*beta_step);
      if (modes) s["modes"] = *modes;
      bib::apply_settings(cfg, s);
      bib::cmd_sweep(cfg, sweep_out);
    } else if (*analyze) {
      bib::cmd_analyze(trace_path, intervals, analyze_beta, analyze_out);
    } else if (*fittail) {
      bib::cmd_fittail(durations_path, fit_out);
    } else if (*reproduce) {
      bib::cmd_reproduce(figure, repro_seed, scale, repro_out);
    }
  } catch (const bib::Error& e) {
    return fail(bib::to_string(e.code()), e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
  return 0;
}
