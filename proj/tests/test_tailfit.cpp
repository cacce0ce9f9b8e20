#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "bib/error.hpp"
#include "bib/tailfit.hpp"
#include "oracles.hpp"

using namespace bib;

namespace {

std::vector<std::int64_t> tp_sample(double gamma, std::int64_t lo, std::int64_t hi, int n,
                                    std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  oracle::TruncatedPowerLawSampler draw(gamma, lo, hi);
  std::vector<std::int64_t> out(n);
  for (auto& x : out) x = draw(eng);
  return out;
}

std::vector<std::int64_t> ep_sample(double lambda, std::int64_t lo, int n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::vector<std::int64_t> out(n);
  for (auto& x : out) x = oracle::sample_geometric_tail(lambda, lo, eng);
  return out;
}

}  // namespace

TEST_CASE("zeta_trunc") {
  CHECK(zeta_trunc(1.7, 9, 9) == doctest::Approx(std::pow(9.0, -1.7)));
  CHECK(zeta_trunc(1.0, 1, 3) == doctest::Approx(11.0 / 6.0));
  CHECK(zeta_trunc(0.0, 1, 100) == 100.0);
  CHECK(zeta_trunc(2.0, 1, 100000) == doctest::Approx(std::numbers::pi * std::numbers::pi / 6.0).epsilon(1e-4));
  CHECK_THROWS_AS(zeta_trunc(1.0, 5, 4), Error);
  CHECK_THROWS_AS(zeta_trunc(1.0, 0, 4), Error);
}

TEST_CASE("tp_loglik") {
  const std::vector<std::int64_t> d{2, 3};
  // -ln 2 - ln 3 - 2 ln(5/6)
  CHECK(tp_loglik(d, 1.0, 2, 3) == doctest::Approx(-1.427116).epsilon(1e-6));
  const std::vector<std::int64_t> one{4};
  CHECK(tp_loglik(one, 2.0, 4, 4) == doctest::Approx(0.0));
  CHECK_THROWS_AS(tp_loglik(d, 1.0, 3, 3), Error);
}

TEST_CASE("ep_lambda_hat closed form") {
  const std::vector<std::int64_t> a{2, 3, 4};
  CHECK(ep_lambda_hat(a, 2) == doctest::Approx(std::log(2.0)));
  for (std::int64_t k : {1, 5, 40}) {
    const std::vector<std::int64_t> pair{k, k + 1};
    CHECK(ep_lambda_hat(pair, k) == doctest::Approx(std::log(3.0)));
  }
  const std::vector<std::int64_t> flat{3, 3, 3};
  CHECK_THROWS_AS(ep_lambda_hat(flat, 3), Error);
}

TEST_CASE("closed-form rate is the likelihood maximum") {
  std::mt19937_64 eng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto data = ep_sample(0.05 + 0.02 * trial, 3, 40, 100 + trial);
    const double lam = ep_lambda_hat(data, 3);
    const double best = ep_loglik(data, lam, 3);
    for (double g = 0.001; g < 3.0; g += 0.001) {
      REQUIRE(ep_loglik(data, g, 3) <= best + 1e-9);
    }
  }
}

TEST_CASE("model_ccdf") {
  TailFitResult tp;
  tp.model = TailModel::kTp;
  tp.exponent = 1.3;
  tp.tau_min = 2;
  tp.tau_max = 50;
  CHECK(model_ccdf(tp, 2) == doctest::Approx(1.0));
  CHECK(model_ccdf(tp, 50) == doctest::Approx(std::pow(50.0, -1.3) / zeta_trunc(1.3, 2, 50)));
  double prev = 2.0;
  for (std::int64_t t = 2; t <= 50; ++t) {
    const double c = model_ccdf(tp, t);
    CHECK(c <= prev);
    prev = c;
  }
  CHECK_THROWS_AS(model_ccdf(tp, 51), Error);
  CHECK_THROWS_AS(model_ccdf(tp, 1), Error);

  TailFitResult ep;
  ep.model = TailModel::kEp;
  ep.exponent = std::log(2.0);
  ep.tau_min = 4;
  CHECK(model_ccdf(ep, 4) == 1.0);
  CHECK(model_ccdf(ep, 7) == doctest::Approx(0.125));
}

TEST_CASE("ks distance matches a direct recomputation") {
  const DurationSample data(tp_sample(1.8, 1, 300, 500, 5));
  for (const TailFitResult& fit : {fit_tp(data), fit_ep(data)}) {
    double d = 0.0;
    const auto tail = data.tail_from(fit.tau_min);
    const double n = static_cast<double>(tail.size());
    for (std::size_t i = 0; i < tail.size(); ++i) {
      if (i > 0 && tail[i] == tail[i - 1]) continue;
      const double emp = static_cast<double>(tail.size() - i) / n;
      d = std::max(d, std::fabs(emp - model_ccdf(fit, tail[i])));
    }
    CHECK(fit.ks_d == doctest::Approx(d).epsilon(1e-12));
    CHECK(ks_distance(data, fit) == doctest::Approx(d).epsilon(1e-12));
  }
}

TEST_CASE("TP fit equals a brute-force scan over cut-offs and the exponent grid") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const DurationSample data(tp_sample(1.0 + 0.2 * seed, 1, 60, 80, seed));
    const auto cands = tau_min_candidates(data);
    REQUIRE_FALSE(cands.empty());
    double best_ks = std::numeric_limits<double>::infinity();
    double best_gamma = 0.0;
    std::int64_t best_tau = 0;
    for (std::int64_t c : cands) {
      const auto tail = data.tail_from(c);
      double ll_best = -std::numeric_limits<double>::infinity();
      double g_best = 0.0;
      for (int k = 0; k < kGammaGridSize; ++k) {
        const double ll = tp_loglik(tail, gamma_grid_value(k), c, data.max());
        if (ll > ll_best) {
          ll_best = ll;
          g_best = gamma_grid_value(k);
        }
      }
      TailFitResult f;
      f.exponent = g_best;
      f.tau_min = c;
      f.tau_max = data.max();
      const double ks = ks_distance(data, f);
      if (ks < best_ks) {
        best_ks = ks;
        best_gamma = g_best;
        best_tau = c;
      }
    }
    const TailFitResult fit = fit_tp(data);
    CHECK(fit.exponent == best_gamma);
    CHECK(fit.tau_min == best_tau);
    CHECK(fit.ks_d == doctest::Approx(best_ks).epsilon(1e-12));
  }
}

TEST_CASE("candidate cut-offs") {
  std::vector<std::int64_t> v;
  for (int i = 1; i <= 30; ++i) v.push_back(i);
  const auto c = tau_min_candidates(DurationSample(v));
  // Values 1..21 leave at least 10 points; the maximum is excluded.
  REQUIRE(c.size() == 21);
  CHECK(c.front() == 1);
  CHECK(c.back() == 21);

  const DurationSample flat(std::vector<std::int64_t>(50, 7));
  CHECK(tau_min_candidates(flat).empty());
  CHECK_THROWS_AS(fit_tp(flat), Error);
  CHECK_THROWS_AS(select_model(flat), Error);
  CHECK_THROWS_AS(DurationSample({1, 0, 3}), Error);
}

TEST_CASE("recovers a truncated power law") {
  const DurationSample data(tp_sample(1.5, 1, 1000, 10000, 21));
  const ModelSelection sel = select_model(data);
  CHECK(sel.tp_at_tp_range.exponent >= 1.45);
  CHECK(sel.tp_at_tp_range.exponent <= 1.55);
  CHECK(sel.winner == TailModel::kTp);
  CHECK(sel.decision_path == DecisionPath::kAicwAgree);
  CHECK(sel.tp_at_tp_range.aicw + sel.ep_at_tp_range.aicw == doctest::Approx(1.0));
  CHECK(sel.tp_at_ep_range.aicw + sel.ep_at_ep_range.aicw == doctest::Approx(1.0));
}

TEST_CASE("recovers a geometric tail") {
  const DurationSample data(ep_sample(0.1, 1, 10000, 22));
  const ModelSelection sel = select_model(data);
  CHECK(sel.ep_at_ep_range.exponent >= 0.095);
  CHECK(sel.ep_at_ep_range.exponent <= 0.105);
  CHECK(sel.winner == TailModel::kEp);
}

TEST_CASE("selection bookkeeping") {
  const DurationSample data(tp_sample(2.0, 1, 200, 400, 9));
  const ModelSelection sel = select_model(data);
  const double log_n = std::log(static_cast<double>(data.size()));
  for (const TailFitResult* f : {&sel.tp_at_tp_range, &sel.ep_at_tp_range,
                                 &sel.tp_at_ep_range, &sel.ep_at_ep_range}) {
    CHECK(f->aic == doctest::Approx(-2.0 * f->loglik + 2.0));
    CHECK(f->d_adj == doctest::Approx(log_n / std::log(static_cast<double>(f->n_used)) * f->ks_d));
  }
  CHECK(sel.ep_at_tp_range.tau_min == sel.tp_at_tp_range.tau_min);
  CHECK(sel.tp_at_ep_range.tau_min == sel.ep_at_ep_range.tau_min);
  if (sel.decision_path == DecisionPath::kDAdjTiebreak) {
    CHECK((sel.winner == TailModel::kEp) ==
          (sel.ep_at_ep_range.d_adj < sel.tp_at_tp_range.d_adj));
  }
}

TEST_CASE("weights are unchanged by a common likelihood shift") {
  // Weights only see the AIC difference.
  const DurationSample data(ep_sample(0.3, 1, 300, 4));
  const ModelSelection sel = select_model(data);
  const double diff = sel.tp_at_tp_range.aic - sel.ep_at_tp_range.aic;
  const double w = 1.0 / (1.0 + std::exp(diff / 2.0));
  CHECK(sel.tp_at_tp_range.aicw == doctest::Approx(w));
}
