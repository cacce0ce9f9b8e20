#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "bib/analysis.hpp"
#include "bib/error.hpp"
#include "oracles.hpp"

using namespace bib;

namespace {

StepRecord row(std::int64_t t, double eta, double theta, double alpha = 0.0, bool reset = false) {
  StepRecord r;
  r.t = t;
  r.eta = eta;
  r.theta = theta;
  r.alpha = alpha;
  r.reset = reset;
  r.phi = r.sigma = 0.09;
  return r;
}

}  // namespace

TEST_CASE("change times come from the eta column") {
  std::vector<StepRecord> rows;
  const double etas[] = {0, 0, 1, 1, 1, -2, -2};
  for (int i = 0; i < 7; ++i) rows.push_back(row(100 + i, etas[i], 0.0));
  const Trace tr = Trace::from_records(rows);
  CHECK(tr.change_times == std::vector<std::int64_t>{102, 105});
  CHECK_NOTHROW(tr.validate());
}

TEST_CASE("split_rmse trivial cases") {
  std::vector<StepRecord> exact, offset;
  for (int t = 0; t < 60; ++t) {
    const double eta = static_cast<double>(t / 20);
    exact.push_back(row(t, eta, eta));
    offset.push_back(row(t, eta, eta - 0.25));
  }
  const SplitRmse zero = split_rmse(Trace::from_records(exact));
  CHECK(zero.rmse_f == 0.0);
  CHECK(zero.rmse_s == 0.0);
  CHECK(zero.intervals == 1);

  const SplitRmse constant = split_rmse(Trace::from_records(offset));
  CHECK(constant.rmse_f == doctest::Approx(0.25));
  CHECK(constant.rmse_s == doctest::Approx(0.25));
}

TEST_CASE("split_rmse two-interval hand computation") {
  // Changes at t = 1, 5, 10.
  // Interval [1, 4], n = 3: first half {1}, second {2, 3, 4}.
  // Interval [5, 9], n = 4: first half {5, 6}, second {7, 8, 9}.
  const double eta[] = {0, 1, 1, 1, 1, 2, 2, 2, 2, 2, 3, 3};
  const double err[] = {9, 0.3, 0.1, 0.2, 0.2, 0.4, 0.0, 0.1, 0.1, 0.1, 9, 9};
  std::vector<StepRecord> rows;
  for (int t = 0; t < 12; ++t) rows.push_back(row(t, eta[t], eta[t] + err[t]));
  const SplitRmse r = split_rmse(Trace::from_records(rows));
  // f: (0.3 + sqrt(0.16 / 2)) / 2, s: (sqrt(0.09 / 3) + 0.1) / 2
  CHECK(r.intervals == 2);
  CHECK(r.rmse_f == doctest::Approx((0.3 + std::sqrt(0.08)) / 2.0).epsilon(1e-12));
  CHECK(r.rmse_s == doctest::Approx((std::sqrt(0.03) + 0.1) / 2.0).epsilon(1e-12));
}

TEST_CASE("split_rmse is invariant under reordering intervals") {
  std::mt19937_64 eng(3);
  std::normal_distribution<double> noise(0.0, 0.2);
  std::vector<std::vector<double>> blocks;
  for (int len : {7, 12, 30}) {
    std::vector<double> e(len);
    for (double& x : e) x = noise(eng);
    blocks.push_back(e);
  }
  auto build = [&](const std::vector<int>& order) {
    std::vector<StepRecord> rows;
    std::int64_t t = 0;
    rows.push_back(row(t++, -1.0, -1.0));
    double eta = 0.0;
    for (int b : order) {
      for (double e : blocks[b]) rows.push_back(row(t++, eta, eta + e));
      eta += 1.0;
    }
    rows.push_back(row(t++, eta, eta));
    return split_rmse(Trace::from_records(rows));
  };
  const SplitRmse a = build({0, 1, 2});
  const SplitRmse b = build({2, 0, 1});
  CHECK(a.rmse_f == doctest::Approx(b.rmse_f).epsilon(1e-14));
  CHECK(a.rmse_s == doctest::Approx(b.rmse_s).epsilon(1e-14));
}

TEST_CASE("split_rmse needs a complete interval") {
  std::vector<StepRecord> rows;
  for (int t = 0; t < 10; ++t) rows.push_back(row(t, t < 5 ? 0.0 : 1.0, 0.0));
  CHECK_THROWS_AS(split_rmse(Trace::from_records(rows)), Error);
}

TEST_CASE("active/rest series uses a strict inequality") {
  std::vector<StepRecord> rows;
  for (int t = 0; t < 8; ++t) rows.push_back(row(t, 0, 0, t % 2 ? 0.06 : 0.05));
  const auto series = active_rest_series(Trace::from_records(rows), 0.05);
  for (int t = 0; t < 8; ++t) CHECK(series[t] == (t % 2 ? 1 : 0));

  std::vector<StepRecord> flat(5, row(0, 0, 0, 0.05));
  for (auto s : active_rest_series(Trace{flat, {}}, 0.05)) CHECK(s == 0);
  std::vector<StepRecord> high(5, row(0, 0, 0, 0.5));
  for (auto s : active_rest_series(Trace{high, {}}, 0.05)) CHECK(s == 1);
}

TEST_CASE("rest periods with censoring") {
  using V = std::vector<std::uint8_t>;
  using R = std::vector<std::int64_t>;
  CHECK(rest_periods(V{1, 0, 0, 0, 1}) == R{3});
  CHECK(rest_periods(V{1, 1, 1}).empty());
  CHECK(rest_periods(V{0, 0, 1, 0, 1, 0, 0}) == R{1});
  CHECK(rest_periods(V{}).empty());
  CHECK(rest_periods(V{0, 0, 0}).empty());
}

TEST_CASE("rest period accounting and boundary invariance") {
  std::mt19937_64 eng(8);
  std::bernoulli_distribution coin(0.3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::uint8_t> v(1 + trial);
    for (auto& x : v) x = coin(eng);
    const auto rests = rest_periods(v);
    // Window = rests + active steps + censored boundary zeros.
    std::size_t lead = 0;
    while (lead < v.size() && v[lead] == 0) ++lead;
    std::size_t trail = 0;
    if (lead < v.size()) {
      while (v[v.size() - 1 - trail] == 0) ++trail;
    }
    std::int64_t total = 0;
    for (auto r : rests) total += r;
    const auto ones = std::count(v.begin(), v.end(), std::uint8_t{1});
    CHECK(static_cast<std::size_t>(total + ones) + lead + trail == v.size());

    std::vector<std::uint8_t> padded{1, 1};
    padded.insert(padded.end(), v.begin(), v.end());
    padded.push_back(1);
    const auto wider = rest_periods(padded);
    // Padding may un-censor boundary runs but never changes interior runs.
    CHECK(wider.size() >= rests.size());
  }
}

TEST_CASE("reset intervals") {
  std::vector<StepRecord> rows;
  for (int t = 0; t < 40; ++t) rows.push_back(row(t, 0, 0, 0, t == 5 || t == 9 || t == 30));
  CHECK(reset_intervals(Trace::from_records(rows)) == std::vector<std::int64_t>{4, 21});

  std::vector<StepRecord> one;
  for (int t = 0; t < 10; ++t) one.push_back(row(t, 0, 0, 0, t == 3));
  CHECK(reset_intervals(Trace::from_records(one)).empty());

  std::vector<StepRecord> periodic;
  for (int t = 0; t < 1000; ++t) periodic.push_back(row(t, 0, 0, 0, t % 7 == 2));
  for (auto dt : reset_intervals(Trace::from_records(periodic))) CHECK(dt == 7);
}

TEST_CASE("chi_square_k examples") {
  const ChiSquare perfect = chi_square_k({{50, 0}, {0, 50}});
  CHECK(perfect.chi2 == doctest::Approx(100.0));
  CHECK(perfect.v == doctest::Approx(1.0));
  CHECK(perfect.df == 1);

  const ChiSquare none = chi_square_k({{25, 25}, {25, 25}});
  CHECK(none.chi2 == 0.0);
  CHECK(none.v == 0.0);
  CHECK(none.p == 1.0);

  const ChiSquare small = chi_square_k({{10, 0}, {0, 10}});
  CHECK(small.chi2 == doctest::Approx(20.0));

  const ChiSquare uniform = chi_square_k({{4, 4, 4}, {4, 4, 4}});
  CHECK(uniform.chi2 == 0.0);
  CHECK(uniform.df == 2);

  CHECK_THROWS_AS(chi_square_k({{0, 0}, {3, 4}}), Error);
  CHECK_THROWS_AS(chi_square_k({{1, 0}, {3, 0}}), Error);
}

TEST_CASE("chi-square tail probability agrees with integrating the density") {
  CHECK(chi_square_sf(3.841, 1) == doctest::Approx(0.05).epsilon(1e-3));
  for (double c : {0.5, 1.0, 3.841, 10.0, 25.0}) {
    CHECK(chi_square_sf(c, 1) == doctest::Approx(oracle::chi2_df1_tail(c)).epsilon(1e-8));
  }
  // df = 2 has the closed form exp(-c / 2).
  CHECK(chi_square_sf(5.0, 2) == doctest::Approx(std::exp(-2.5)).epsilon(1e-12));
}

TEST_CASE("proportional rows give zero chi-square") {
  std::mt19937_64 eng(4);
  std::uniform_int_distribution<int> cell(1, 30), scale(1, 5);
  for (int i = 0; i < 100; ++i) {
    std::vector<std::int64_t> base{cell(eng), cell(eng), cell(eng)};
    std::vector<std::vector<std::int64_t>> table{base, base};
    const int k = scale(eng);
    for (auto& x : table[1]) x *= k;
    CHECK(chi_square_k(table).chi2 == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("burst_change_contingency tabulates bins") {
  // 4 bins of 5 rows. Bin 0: change + burst; bin 1: change only;
  // bin 2: burst only; bin 3: neither. Remainder rows are dropped.
  std::vector<StepRecord> rows;
  for (int t = 0; t < 22; ++t) {
    const double eta = t < 2 ? 0.0 : (t < 7 ? 1.0 : 2.0);
    StepRecord r = row(t, eta, 0.0);
    r.active = t == 3 || t == 12;
    rows.push_back(r);
  }
  rows[21].eta = 5.0;  // change inside the dropped remainder
  const Contingency2x2 c = burst_change_contingency(Trace::from_records(rows), 4);
  CHECK(c.n11 == 1);
  CHECK(c.n10 == 1);
  CHECK(c.n01 == 1);
  CHECK(c.n00 == 1);
  REQUIRE(c.test.has_value());
  CHECK(c.test->chi2 == 0.0);

  CHECK_THROWS_AS(burst_change_contingency(Trace::from_records(rows), 1), Error);
}

TEST_CASE("contingency with an empty margin is flagged, not tested") {
  std::vector<StepRecord> rows;
  for (int t = 0; t < 100; ++t) rows.push_back(row(t, 0.0, 0.0));
  const Contingency2x2 c = burst_change_contingency(Trace::from_records(rows), 10);
  CHECK(c.n00 == 10);
  CHECK_FALSE(c.test.has_value());
}

TEST_CASE("pooled t-test") {
  const std::vector<double> a{1.0, 2.0, 3.0, 4.0};
  const std::vector<double> b{2.0, 3.0, 4.0, 5.0};
  const TTest t = pooled_t_test(a, b);
  // Means differ by 1; pooled variance 5/3; se = sqrt(5/3 * 1/2).
  CHECK(t.t == doctest::Approx(-1.0 / std::sqrt(5.0 / 6.0)));
  CHECK(t.df == 6.0);
  CHECK(t.p > 0.2);
  CHECK(t.p < 0.4);
}
