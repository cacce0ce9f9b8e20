#include "bib/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bib/error.hpp"
#include "bib/io.hpp"

namespace bib {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double as_double(const std::string& key, const std::string& value) {
  try {
    return parse_double(value);
  } catch (const Error&) {
    throw Error(Errc::kInvalidConfig, key + ": not a number: '" + value + "'");
  }
}

std::int64_t as_int(const std::string& key, const std::string& value) {
  const double v = as_double(key, value);
  if (v != std::floor(v) || std::fabs(v) > 9.0e18) {
    throw Error(Errc::kInvalidConfig, key + ": not an integer: '" + value + "'");
  }
  return static_cast<std::int64_t>(v);
}

std::uint64_t as_seed(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used, 0);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw Error(Errc::kInvalidConfig, key + ": not an unsigned 64-bit integer: '" + value + "'");
  }
}

// Returns false if the key is not a RunConfig key.
bool apply_run_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  InferenceConfig& inf = cfg.inference;
  EnvConfig& env = cfg.env;
  if (key == "beta") inf.beta = as_double(key, value);
  else if (key == "sigma0") inf.sigma0 = as_double(key, value);
  else if (key == "mode") inf.mode = parse_mode(value);
  else if (key == "grid_n") inf.grid_n = static_cast<int>(as_int(key, value));
  else if (key == "grid_origin") inf.grid_origin = as_double(key, value);
  else if (key == "grid_delta") inf.grid_delta = as_double(key, value);
  else if (key == "theta0") inf.theta0 = as_double(key, value);
  else if (key == "phi0") inf.phi0 = as_double(key, value);
  else if (key == "omega") env.omega = as_double(key, value);
  else if (key == "change_prob") env.change_prob = as_double(key, value);
  else if (key == "mean_low") env.mean_low = as_double(key, value);
  else if (key == "mean_high") env.mean_high = as_double(key, value);
  else if (key == "eta0") env.eta0 = as_double(key, value);
  else if (key == "steps") cfg.steps = as_int(key, value);
  else if (key == "burnin") cfg.burnin = as_int(key, value);
  else if (key == "seed") cfg.seed = as_seed(key, value);
  else if (key == "replicas") cfg.replicas = static_cast<int>(as_int(key, value));
  else return false;
  return true;
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

json ccdf_points(const DurationSample& data, const TailFitResult& tp, const TailFitResult& ep) {
  json emp = json::array();
  json tp_pts = json::array();
  json ep_pts = json::array();
  for (const auto& [tau, s] : empirical_ccdf(data, tp.tau_min, tp.tau_max)) {
    emp.push_back({tau, s});
    tp_pts.push_back({tau, model_ccdf(tp, tau)});
    ep_pts.push_back({tau, model_ccdf(ep, tau)});
  }
  return {{"tau_min", tp.tau_min}, {"tau_max", tp.tau_max},
          {"empirical", emp}, {"tp", tp_pts}, {"ep", ep_pts}};
}

std::string beta_label(double beta) {
  std::ostringstream ss;
  ss << beta;
  return ss.str();
}

std::string replica_name(const std::string& stem, std::size_t r, const std::string& ext) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03zu", r);
  return stem + "_r" + buf + ext;
}

}  // namespace

// ---- configuration ---------------------------------------------------------

void SweepConfig::validate() const {
  run.validate();
  if (!(beta_step > 0.0)) throw Error(Errc::kInvalidConfig, "beta_step must be positive");
  if (!(beta_start <= beta_end)) throw Error(Errc::kInvalidConfig, "beta_start must not exceed beta_end");
  if (modes.empty()) throw Error(Errc::kInvalidConfig, "sweep needs at least one mode");
  for (double b : betas()) {
    InferenceConfig probe = run.inference;
    probe.beta = b;
    probe.validate();
  }
}

std::vector<double> SweepConfig::betas() const {
  std::vector<double> out;
  const double tolerance = 1e-9 * beta_step;
  for (int k = 0;; ++k) {
    // Snap to 12 decimals so 0.05 + 2 * 0.05 reports as 0.15.
    const double b = std::round((beta_start + k * beta_step) * 1e12) / 1e12;
    if (b > beta_end + tolerance) break;
    out.push_back(b);
  }
  return out;
}

Settings parse_settings(const std::string& text) {
  Settings out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(Errc::kInvalidConfig,
                  "config line " + std::to_string(line_no) + ": expected key=value");
    }
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

void apply_settings(RunConfig& cfg, const Settings& settings) {
  for (const auto& [key, value] : settings) {
    if (!apply_run_key(cfg, key, value)) {
      throw Error(Errc::kInvalidConfig, "unknown config key '" + key + "'");
    }
  }
}

void apply_settings(SweepConfig& cfg, const Settings& settings) {
  for (const auto& [key, value] : settings) {
    if (apply_run_key(cfg.run, key, value)) continue;
    if (key == "beta_start") cfg.beta_start = as_double(key, value);
    else if (key == "beta_end") cfg.beta_end = as_double(key, value);
    else if (key == "beta_step") cfg.beta_step = as_double(key, value);
    else if (key == "modes") {
      cfg.modes.clear();
      std::istringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) cfg.modes.push_back(parse_mode(item));
      }
    } else {
      throw Error(Errc::kInvalidConfig, "unknown config key '" + key + "'");
    }
  }
}

// ---- simulate --------------------------------------------------------------

std::vector<fs::path> cmd_simulate(const RunConfig& cfg, const fs::path& out) {
  cfg.validate();
  std::vector<fs::path> paths;
  if (cfg.replicas == 1) {
    paths.push_back(out);
  } else {
    for (int r = 0; r < cfg.replicas; ++r) {
      paths.push_back(out / replica_name("trace", static_cast<std::size_t>(r), ".csv"));
    }
  }
  parallel_for(paths.size(), [&](std::size_t r) {
    std::ostringstream ss;
    write_trace_csv(ss, simulate(cfg, static_cast<int>(r)));
    write_file(paths[r], ss.str());
  });
  return paths;
}

// ---- sweep -----------------------------------------------------------------

std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  struct Job {
    Mode mode;
    double beta;
    int replica;
  };
  std::vector<Job> jobs;
  const std::vector<double> betas = cfg.betas();
  for (Mode m : cfg.modes) {
    for (double b : betas) {
      for (int r = 0; r < cfg.run.replicas; ++r) jobs.push_back({m, b, r});
    }
  }
  const auto results = parallel_map<std::optional<SplitRmse>>(jobs.size(), [&](std::size_t i) {
    RunConfig run = cfg.run;
    run.inference.mode = jobs[i].mode;
    run.inference.beta = jobs[i].beta;
    try {
      return std::optional<SplitRmse>(split_rmse(simulate(run, jobs[i].replica)));
    } catch (const Error& e) {
      if (e.code() != Errc::kInsufficientData) throw;
      return std::optional<SplitRmse>();
    }
  });

  std::vector<SweepRow> rows;
  std::size_t i = 0;
  for (Mode m : cfg.modes) {
    for (double b : betas) {
      SweepRow row{m, b, 0.0, 0.0, 0};
      for (int r = 0; r < cfg.run.replicas; ++r, ++i) {
        if (!results[i]) continue;
        row.rmse_f += results[i]->rmse_f;
        row.rmse_s += results[i]->rmse_s;
        ++row.replicas;
      }
      if (row.replicas == 0) {
        throw Error(Errc::kInsufficientData,
                    "no replica produced a complete inter-change interval at beta=" +
                        format_double(b));
      }
      row.rmse_f /= row.replicas;
      row.rmse_s /= row.replicas;
      rows.push_back(row);
    }
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "mode,beta,rmse_f,rmse_s,replicas\n";
  for (const SweepRow& r : rows) {
    out << to_string(r.mode) << ',' << format_double(r.beta) << ',' << format_double(r.rmse_f)
        << ',' << format_double(r.rmse_s) << ',' << r.replicas << '\n';
  }
  return out.str();
}

void cmd_sweep(const SweepConfig& cfg, const fs::path& out) {
  write_file(out, sweep_csv(run_sweep(cfg)));
}

// ---- analyze ---------------------------------------------------------------

json to_json(const ChiSquare& test) {
  return {{"chi2", test.chi2}, {"df", test.df}, {"p", test.p}, {"v", test.v}, {"n", test.n}};
}

json to_json(const Contingency2x2& table) {
  json j = {{"n11", table.n11}, {"n10", table.n10}, {"n01", table.n01}, {"n00", table.n00},
            {"defined", table.test.has_value()}};
  j["test"] = table.test ? to_json(*table.test) : json(nullptr);
  return j;
}

json analysis_report(Trace trace, int n_intervals, double beta) {
  if (!(beta >= 0.0 && beta < 1.0)) throw Error(Errc::kInvalidArgument, "beta must lie in [0, 1)");
  if (trace.records.empty()) throw Error(Errc::kInsufficientData, "trace has no rows");
  const std::vector<std::uint8_t> binary = active_rest_series(trace, beta);
  for (std::size_t i = 0; i < binary.size(); ++i) trace.records[i].active = binary[i] != 0;

  const auto active = std::count(binary.begin(), binary.end(), std::uint8_t{1});
  std::int64_t bursts = 0;
  for (std::size_t i = 1; i < binary.size(); ++i) bursts += binary[i - 1] == 0 && binary[i] == 1;

  json j;
  j["rows"] = trace.records.size();
  j["t_first"] = trace.records.front().t;
  j["t_last"] = trace.records.back().t;
  j["beta"] = beta;
  j["n_intervals"] = n_intervals;
  j["change_times"] = trace.change_times;
  j["rest_periods"] = rest_periods(binary);
  j["reset_intervals"] = reset_intervals(trace);
  j["active"] = {{"steps", active},
                 {"fraction", static_cast<double>(active) / static_cast<double>(binary.size())},
                 {"bursts", bursts}};
  j["contingency"] = to_json(burst_change_contingency(trace, n_intervals));
  return j;
}

void cmd_analyze(const fs::path& trace_path, int n_intervals, double beta, const fs::path& out) {
  std::istringstream in(read_file(trace_path));
  write_file(out, analysis_report(read_trace_csv(in), n_intervals, beta).dump(2) + "\n");
}

// ---- fittail ---------------------------------------------------------------

json to_json(const TailFitResult& fit) {
  return {{"model", to_string(fit.model)}, {"exponent", fit.exponent},
          {"tau_min", fit.tau_min},        {"tau_max", fit.tau_max},
          {"loglik", fit.loglik},          {"ks_d", fit.ks_d},
          {"n_used", fit.n_used},          {"aic", fit.aic},
          {"aicw", fit.aicw},              {"d_adj", fit.d_adj},
          {"boundary_hit", fit.boundary_hit}};
}

json to_json(const ModelSelection& sel) {
  return {{"tp_at_tp_range", to_json(sel.tp_at_tp_range)},
          {"ep_at_tp_range", to_json(sel.ep_at_tp_range)},
          {"tp_at_ep_range", to_json(sel.tp_at_ep_range)},
          {"ep_at_ep_range", to_json(sel.ep_at_ep_range)},
          {"winner", to_string(sel.winner)},
          {"decision_path", to_string(sel.decision_path)}};
}

json fittail_report(const DurationSample& data) {
  if (static_cast<std::int64_t>(data.size()) < kMinPointsInRange) {
    throw Error(Errc::kInsufficientData, "need at least " + std::to_string(kMinPointsInRange) +
                                             " durations, got " + std::to_string(data.size()));
  }
  const ModelSelection sel = select_model(data);
  json j = to_json(sel);
  j["n"] = data.size();
  j["ccdf"] = {{"tp_range", ccdf_points(data, sel.tp_at_tp_range, sel.ep_at_tp_range)},
               {"ep_range", ccdf_points(data, sel.tp_at_ep_range, sel.ep_at_ep_range)}};
  return j;
}

void cmd_fittail(const fs::path& durations, const fs::path& out) {
  std::istringstream in(read_file(durations));
  write_file(out, fittail_report(DurationSample(read_durations_csv(in))).dump(2) + "\n");
}

// ---- tail experiments ------------------------------------------------------

std::vector<ReplicaFit> run_tail_experiment(const RunConfig& cfg, DurationKind kind) {
  cfg.validate();
  return parallel_map<ReplicaFit>(static_cast<std::size_t>(cfg.replicas), [&](std::size_t r) {
    const Trace trace = simulate(cfg, static_cast<int>(r));
    ReplicaFit fit;
    fit.durations = kind == DurationKind::kRestPeriods
                        ? rest_periods(active_rest_series(trace, cfg.inference.beta))
                        : reset_intervals(trace);
    try {
      fit.selection = select_model(DurationSample(fit.durations));
    } catch (const Error& e) {
      fit.failure = std::string(to_string(e.code())) + ": " + e.what();
    }
    return fit;
  });
}

// ---- reproduce -------------------------------------------------------------

namespace {

constexpr std::int64_t kBurnin = 10000;
constexpr int kTailBaseReplicas = 100;
constexpr std::int64_t kTailBaseSteps = 250000;

int scaled_replicas(int base, double scale) {
  return std::max(1, static_cast<int>(std::lround(base * scale)));
}

std::int64_t scaled_steps(std::int64_t base, double scale) {
  return std::max<std::int64_t>(1000, std::llround(static_cast<double>(base) * scale));
}

struct TailCondition {
  Mode mode;
  double beta;
  std::vector<ReplicaFit> fits;
};

// Runs one tail experiment per (mode, beta) and writes durations, per-replica
// fits and a summary CSV under dir.
std::vector<TailCondition> reproduce_tails(const fs::path& dir, DurationKind kind,
                                           const std::vector<Mode>& modes,
                                           const std::vector<double>& betas,
                                           std::uint64_t seed, double scale) {
  const std::string stem = kind == DurationKind::kRestPeriods ? "rest" : "reset";
  std::vector<TailCondition> out;
  std::ostringstream summary;
  summary << "mode,beta,replica,n,winner,decision_path,gamma,tp_tau_min,tp_tau_max,"
             "lambda,ep_tau_min,status\n";
  for (Mode mode : modes) {
    for (double beta : betas) {
      RunConfig cfg;
      cfg.inference.mode = mode;
      cfg.inference.beta = beta;
      cfg.seed = seed;
      cfg.burnin = kBurnin;
      cfg.steps = kBurnin + scaled_steps(kTailBaseSteps, scale);
      cfg.replicas = scaled_replicas(kTailBaseReplicas, scale);
      TailCondition cond{mode, beta, run_tail_experiment(cfg, kind)};
      const fs::path sub = dir / (std::string(to_string(mode)) + "_beta_" + beta_label(beta));
      for (std::size_t r = 0; r < cond.fits.size(); ++r) {
        const ReplicaFit& f = cond.fits[r];
        std::ostringstream durations;
        write_durations_csv(durations, f.durations);
        write_file(sub / replica_name(stem, r, ".csv"), durations.str());
        summary << to_string(mode) << ',' << format_double(beta) << ',' << r << ','
                << f.durations.size() << ',';
        if (f.selection) {
          const ModelSelection& s = *f.selection;
          write_file(sub / replica_name("fit", r, ".json"),
                     fittail_report(DurationSample(f.durations)).dump(2) + "\n");
          summary << to_string(s.winner) << ',' << to_string(s.decision_path) << ','
                  << format_double(s.tp_at_tp_range.exponent) << ',' << s.tp_at_tp_range.tau_min
                  << ',' << s.tp_at_tp_range.tau_max << ','
                  << format_double(s.ep_at_ep_range.exponent) << ',' << s.ep_at_ep_range.tau_min
                  << ",ok\n";
        } else {
          summary << ",,,,,,\"" << f.failure << "\"\n";
        }
      }
      out.push_back(std::move(cond));
    }
  }
  write_file(dir / "summary.csv", summary.str());
  return out;
}

json exponent_summary(const std::vector<TailCondition>& conds) {
  json j = json::array();
  for (const TailCondition& c : conds) {
    std::vector<double> gammas;
    int tp = 0;
    for (const ReplicaFit& f : c.fits) {
      if (!f.selection) continue;
      gammas.push_back(f.selection->tp_at_tp_range.exponent);
      tp += f.selection->winner == TailModel::kTp;
    }
    j.push_back({{"mode", to_string(c.mode)}, {"beta", c.beta}, {"replicas", c.fits.size()},
                 {"fitted", gammas.size()}, {"tp_selected", tp},
                 {"gamma_mean", mean_of(gammas)}, {"gamma_sd", sd_of(gammas)}});
  }
  return j;
}

std::vector<double> tp_exponents(const TailCondition& c) {
  std::vector<double> g;
  for (const ReplicaFit& f : c.fits) {
    if (f.selection) g.push_back(f.selection->tp_at_tp_range.exponent);
  }
  return g;
}

}  // namespace

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids{"fig3", "fig6", "fig8", "fig9", "fig10"};
  return ids;
}

void cmd_reproduce(const std::string& figure, std::uint64_t seed, double scale,
                   const fs::path& out_dir) {
  const auto& ids = figure_ids();
  if (std::find(ids.begin(), ids.end(), figure) == ids.end()) {
    std::string list;
    for (const auto& id : ids) list += (list.empty() ? "" : ", ") + id;
    throw Error(Errc::kInvalidArgument, "unknown figure '" + figure + "'; valid ids: " + list);
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw Error(Errc::kInvalidConfig, "scale must be positive");
  }
  const fs::path dir = out_dir / figure;
  const std::vector<double> reset_betas{0.01, 0.05, 0.1};

  if (figure == "fig3") {
    SweepConfig sweep;
    sweep.run.seed = seed;
    sweep.run.burnin = kBurnin;
    sweep.run.steps = kBurnin + scaled_steps(100000, scale);
    sweep.run.replicas = scaled_replicas(10, scale);
    sweep.beta_start = 0.05;
    sweep.beta_end = 0.25;
    sweep.beta_step = 0.05;
    write_file(dir / "sweep.csv", sweep_csv(run_sweep(sweep)));
    return;
  }
  if (figure == "fig6") {
    const auto conds =
        reproduce_tails(dir, DurationKind::kRestPeriods, {Mode::kBib}, {0.05, 0.1}, seed, scale);
    json j;
    j["conditions"] = exponent_summary(conds);
    try {
      const TTest t = pooled_t_test(tp_exponents(conds[0]), tp_exponents(conds[1]));
      j["t_test"] = {{"t", t.t}, {"df", t.df}, {"p", t.p}};
    } catch (const Error& e) {
      j["t_test"] = {{"error", e.what()}};
    }
    write_file(dir / "exponents.json", j.dump(2) + "\n");
    return;
  }
  if (figure == "fig8" || figure == "fig9") {
    const Mode mode = figure == "fig8" ? Mode::kBayes : Mode::kBib;
    const auto conds =
        reproduce_tails(dir, DurationKind::kResetIntervals, {mode}, reset_betas, seed, scale);
    write_file(dir / "exponents.json", json{{"conditions", exponent_summary(conds)}}.dump(2) + "\n");
    return;
  }
  // fig10: selection counts per (mode, beta) plus a beta x model chi-square per mode.
  const auto conds = reproduce_tails(dir, DurationKind::kResetIntervals,
                                     {Mode::kBayes, Mode::kBib}, reset_betas, seed, scale);
  std::ostringstream counts;
  counts << "mode,beta,tp,ep,failed,replicas\n";
  json tests = json::object();
  std::map<Mode, std::vector<std::vector<std::int64_t>>> tables;
  for (const TailCondition& c : conds) {
    std::int64_t tp = 0, ep = 0, failed = 0;
    for (const ReplicaFit& f : c.fits) {
      if (!f.selection) ++failed;
      else if (f.selection->winner == TailModel::kTp) ++tp;
      else ++ep;
    }
    counts << to_string(c.mode) << ',' << format_double(c.beta) << ',' << tp << ',' << ep << ','
           << failed << ',' << c.fits.size() << '\n';
    tables[c.mode].push_back({tp, ep});
  }
  for (const auto& [mode, table] : tables) {
    try {
      tests[std::string(to_string(mode))] = to_json(chi_square_k(table));
    } catch (const Error& e) {
      tests[std::string(to_string(mode))] = {{"defined", false}, {"reason", e.what()}};
    }
  }
  write_file(dir / "selection_counts.csv", counts.str());
  write_file(dir / "chi_square.json", tests.dump(2) + "\n");
}

}  // namespace bib
