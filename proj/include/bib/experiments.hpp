#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bib/analysis.hpp"
#include "bib/simulation.hpp"
#include "bib/tailfit.hpp"

namespace bib {

struct SweepConfig {
  RunConfig run;
  double beta_start = 0.05;
  double beta_end = 0.25;
  double beta_step = 0.005;
  std::vector<Mode> modes{Mode::kBayes, Mode::kBib};

  void validate() const;
  std::vector<double> betas() const;
};

// Flat key=value settings, as read from --config files and --set flags.
using Settings = std::map<std::string, std::string>;

// Parses "key=value" lines; '#' starts a comment.
Settings parse_settings(const std::string& text);

// Unknown keys raise Error(kInvalidConfig).
void apply_settings(RunConfig& cfg, const Settings& settings);
void apply_settings(SweepConfig& cfg, const Settings& settings);

// ---- simulate --------------------------------------------------------------

// One replica writes to `out`; several write out/trace_rNNN.csv.
std::vector<std::filesystem::path> cmd_simulate(const RunConfig& cfg,
                                                const std::filesystem::path& out);

// ---- sweep -----------------------------------------------------------------

struct SweepRow {
  Mode mode = Mode::kBayes;
  double beta = 0.0;
  double rmse_f = 0.0;
  double rmse_s = 0.0;
  int replicas = 0;  // replicas with at least one complete interval
};

std::vector<SweepRow> run_sweep(const SweepConfig& cfg);
std::string sweep_csv(const std::vector<SweepRow>& rows);
void cmd_sweep(const SweepConfig& cfg, const std::filesystem::path& out);

// ---- analyze ---------------------------------------------------------------

// Rest periods, reset intervals, change/burst contingency and active fraction.
// Active flags are recomputed as alpha > beta before any analysis.
nlohmann::json analysis_report(Trace trace, int n_intervals, double beta);
void cmd_analyze(const std::filesystem::path& trace_path, int n_intervals, double beta,
                 const std::filesystem::path& out);

// ---- fittail ---------------------------------------------------------------

nlohmann::json to_json(const TailFitResult& fit);
nlohmann::json to_json(const ModelSelection& sel);
nlohmann::json to_json(const ChiSquare& test);
nlohmann::json to_json(const Contingency2x2& table);

// select_model plus empirical and fitted CCDF points for both ranges.
nlohmann::json fittail_report(const DurationSample& data);
void cmd_fittail(const std::filesystem::path& durations, const std::filesystem::path& out);

// ---- tail experiments ------------------------------------------------------

enum class DurationKind { kRestPeriods, kResetIntervals };

struct ReplicaFit {
  std::vector<std::int64_t> durations;
  std::optional<ModelSelection> selection;
  std::string failure;  // set when the fit threw
};

// Simulates `cfg.replicas` replicas and fits the chosen durations of each.
std::vector<ReplicaFit> run_tail_experiment(const RunConfig& cfg, DurationKind kind);

// ---- reproduce -------------------------------------------------------------

const std::vector<std::string>& figure_ids();

// Runs the pipeline behind one figure with replicas and analyzed steps scaled
// by `scale`, writing everything under out_dir/<figure>.
void cmd_reproduce(const std::string& figure, std::uint64_t seed, double scale,
                   const std::filesystem::path& out_dir);

}  // namespace bib
