#include "bib/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "bib/error.hpp"

namespace bib {

Trace Trace::from_records(std::vector<StepRecord> records) {
  Trace trace;
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].eta != records[i - 1].eta) {
      trace.change_times.push_back(records[i].t);
    }
  }
  trace.records = std::move(records);
  return trace;
}

void Trace::validate() const {
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].t != records[i - 1].t + 1) {
      throw Error(Errc::kInvalidArgument, "trace rows must have consecutive t");
    }
  }
  for (std::size_t i = 0; i < change_times.size(); ++i) {
    if (i > 0 && change_times[i] <= change_times[i - 1]) {
      throw Error(Errc::kInvalidArgument, "change times must be strictly increasing");
    }
    if (records.empty() || change_times[i] < records.front().t ||
        change_times[i] > records.back().t) {
      throw Error(Errc::kInvalidArgument, "change time outside the trace");
    }
  }
}

SplitRmse split_rmse(const Trace& trace) {
  trace.validate();
  SplitRmse out;
  if (trace.records.empty()) {
    throw Error(Errc::kInsufficientData, "split_rmse needs a nonempty trace");
  }
  const std::int64_t t0 = trace.records.front().t;
  auto sq_err = [&](std::int64_t t) {
    const StepRecord& r = trace.records[static_cast<std::size_t>(t - t0)];
    const double e = r.theta - r.eta;
    return e * e;
  };
  double sum_f = 0.0;
  double sum_s = 0.0;
  for (std::size_t k = 0; k + 1 < trace.change_times.size(); ++k) {
    const std::int64_t start = trace.change_times[k];
    // The interval runs up to the step just before the next change.
    const std::int64_t n = trace.change_times[k + 1] - 1 - start;
    const std::int64_t half = n / 2;
    if (half < 1) continue;
    double first = 0.0;
    for (std::int64_t t = start; t < start + half; ++t) first += sq_err(t);
    double second = 0.0;
    for (std::int64_t t = start + half; t <= start + n; ++t) second += sq_err(t);
    sum_f += std::sqrt(first / static_cast<double>(half));
    sum_s += std::sqrt(second / static_cast<double>(n - half + 1));
    ++out.intervals;
  }
  if (out.intervals == 0) {
    throw Error(Errc::kInsufficientData, "trace holds no complete inter-change interval");
  }
  out.rmse_f = sum_f / static_cast<double>(out.intervals);
  out.rmse_s = sum_s / static_cast<double>(out.intervals);
  return out;
}

std::vector<std::uint8_t> active_rest_series(const Trace& trace, double beta) {
  std::vector<std::uint8_t> out;
  out.reserve(trace.records.size());
  for (const StepRecord& r : trace.records) out.push_back(r.alpha > beta ? 1 : 0);
  return out;
}

std::vector<std::int64_t> rest_periods(std::span<const std::uint8_t> binary) {
  std::vector<std::int64_t> out;
  std::size_t i = 0;
  const std::size_t n = binary.size();
  while (i < n) {
    if (binary[i] != 0) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && binary[j] == 0) ++j;
    const bool censored = i == 0 || j == n;
    if (!censored) out.push_back(static_cast<std::int64_t>(j - i));
    i = j;
  }
  return out;
}

std::vector<std::int64_t> reset_intervals(const Trace& trace) {
  std::vector<std::int64_t> out;
  std::optional<std::int64_t> last;
  for (const StepRecord& r : trace.records) {
    if (!r.reset) continue;
    if (last) out.push_back(r.t - *last);
    last = r.t;
  }
  return out;
}

double chi_square_sf(double chi2, int df) {
  if (df < 1) throw Error(Errc::kInvalidArgument, "chi-square needs df >= 1");
  if (!(chi2 >= 0.0)) throw Error(Errc::kInvalidArgument, "chi-square statistic must be >= 0");
  if (chi2 == 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * chi2);
}

ChiSquare chi_square_k(const std::vector<std::vector<std::int64_t>>& table) {
  const std::size_t rows = table.size();
  if (rows < 2) throw Error(Errc::kInvalidArgument, "chi-square table needs >= 2 rows");
  const std::size_t cols = table.front().size();
  if (cols < 2) throw Error(Errc::kInvalidArgument, "chi-square table needs >= 2 columns");
  std::vector<double> row_sum(rows, 0.0);
  std::vector<double> col_sum(cols, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    if (table[i].size() != cols) throw Error(Errc::kInvalidArgument, "ragged chi-square table");
    for (std::size_t j = 0; j < cols; ++j) {
      if (table[i][j] < 0) throw Error(Errc::kInvalidArgument, "negative cell count");
      const double c = static_cast<double>(table[i][j]);
      row_sum[i] += c;
      col_sum[j] += c;
      total += c;
    }
  }
  for (double s : row_sum) {
    if (s == 0.0) throw Error(Errc::kDegenerate, "chi-square table has an empty row");
  }
  for (double s : col_sum) {
    if (s == 0.0) throw Error(Errc::kDegenerate, "chi-square table has an empty column");
  }
  ChiSquare out;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double expected = row_sum[i] * col_sum[j] / total;
      const double diff = static_cast<double>(table[i][j]) - expected;
      out.chi2 += diff * diff / expected;
    }
  }
  out.df = static_cast<int>((rows - 1) * (cols - 1));
  out.n = static_cast<std::int64_t>(total);
  out.p = chi_square_sf(out.chi2, out.df);
  const double k = static_cast<double>(std::min(rows, cols) - 1);
  out.v = std::min(1.0, std::sqrt(out.chi2 / (total * k)));
  return out;
}

Contingency2x2& Contingency2x2::operator+=(const Contingency2x2& other) {
  n11 += other.n11;
  n10 += other.n10;
  n01 += other.n01;
  n00 += other.n00;
  evaluate();
  return *this;
}

void Contingency2x2::evaluate() {
  try {
    test = chi_square_k({{n11, n10}, {n01, n00}});
  } catch (const Error& e) {
    if (e.code() != Errc::kDegenerate) throw;
    test.reset();
  }
}

Contingency2x2 burst_change_contingency(const Trace& trace, int n_intervals) {
  if (n_intervals < 2) {
    throw Error(Errc::kInvalidArgument, "burst_change_contingency needs >= 2 intervals");
  }
  trace.validate();
  const std::size_t bin = trace.records.size() / static_cast<std::size_t>(n_intervals);
  if (bin == 0) {
    throw Error(Errc::kInsufficientData, "trace shorter than the number of intervals");
  }
  const std::int64_t t0 = trace.records.front().t;
  std::vector<std::uint8_t> changed(trace.records.size(), 0);
  for (std::int64_t t : trace.change_times) changed[static_cast<std::size_t>(t - t0)] = 1;

  Contingency2x2 out;
  for (int b = 0; b < n_intervals; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * bin;
    bool change = false;
    bool burst = false;
    for (std::size_t i = lo; i < lo + bin; ++i) {
      change = change || changed[i] != 0;
      burst = burst || (i > 0 && !trace.records[i - 1].active && trace.records[i].active);
    }
    if (change && burst) ++out.n11;
    else if (change) ++out.n10;
    else if (burst) ++out.n01;
    else ++out.n00;
  }
  out.evaluate();
  return out;
}

TTest pooled_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw Error(Errc::kInsufficientData, "t-test needs two samples of size >= 2");
  }
  auto mean = [](std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  };
  auto ss = [](std::span<const double> x, double m) {
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s;
  };
  const double ma = mean(a);
  const double mb = mean(b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  TTest out;
  out.df = na + nb - 2.0;
  const double pooled = (ss(a, ma) + ss(b, mb)) / out.df;
  const double se = std::sqrt(pooled * (1.0 / na + 1.0 / nb));
  if (!(se > 0.0)) throw Error(Errc::kDegenerate, "t-test samples have zero variance");
  out.t = (ma - mb) / se;
  boost::math::students_t dist(out.df);
  out.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(out.t)));
  return out;
}

}  // namespace bib
