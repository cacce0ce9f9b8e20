#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bib/inference.hpp"

namespace bib {

// Post-burn-in records plus the step indices (values of StepRecord::t) at
// which the environment mean jumped inside the window.
struct Trace {
  std::vector<StepRecord> records;
  std::vector<std::int64_t> change_times;

  // Change times are read off the eta column: a change at row i > 0 is
  // eta[i] != eta[i-1]. Used for in-memory and file traces alike, so both
  // routes agree exactly.
  static Trace from_records(std::vector<StepRecord> records);

  // Throws Error(kInvalidArgument) if rows are not consecutive in t or
  // change_times is unsorted or out of range.
  void validate() const;
};

struct SplitRmse {
  double rmse_f = 0.0;
  double rmse_s = 0.0;
  std::size_t intervals = 0;
};

// Mean RMSE over the first and second halves of every complete
// inter-change interval.
SplitRmse split_rmse(const Trace& trace);

std::vector<std::uint8_t> active_rest_series(const Trace& trace, double beta);

// Lengths of maximal zero runs that touch neither end of the series.
std::vector<std::int64_t> rest_periods(std::span<const std::uint8_t> binary);

std::vector<std::int64_t> reset_intervals(const Trace& trace);

struct ChiSquare {
  double chi2 = 0.0;
  int df = 0;
  double p = 1.0;
  double v = 0.0;
  std::int64_t n = 0;
};

// Pearson chi-square test of independence on an r x c table (row-major).
// Throws Error(kDegenerate) if any row or column sum is zero.
ChiSquare chi_square_k(const std::vector<std::vector<std::int64_t>>& table);

// change x burst cells: n11 = change and burst, n10 = change only,
// n01 = burst only, n00 = neither.
struct Contingency2x2 {
  std::int64_t n11 = 0;
  std::int64_t n10 = 0;
  std::int64_t n01 = 0;
  std::int64_t n00 = 0;
  // Empty when a margin is zero; the table is then flagged, not tested.
  std::optional<ChiSquare> test;

  Contingency2x2& operator+=(const Contingency2x2& other);
  // Recomputes `test` from the counts.
  void evaluate();
};

// Splits the trace into n_intervals equal bins (remainder rows dropped) and
// tabulates, per bin, whether the mean jumped and whether a rest -> active
// transition of the recorded active flags occurred.
Contingency2x2 burst_change_contingency(const Trace& trace, int n_intervals);

// Right tail of the chi-square distribution.
double chi_square_sf(double chi2, int df);

struct TTest {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;  // two-sided
};

// Two-sample Student t-test with pooled variance.
TTest pooled_t_test(std::span<const double> a, std::span<const double> b);

}  // namespace bib
