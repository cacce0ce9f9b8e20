#include "bib/tailfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bib/error.hpp"

namespace bib {
namespace {

struct TailView {
  std::span<const std::int64_t> data;  // values >= tau_min, sorted
  std::int64_t tau_min = 0;
  std::int64_t tau_max = 0;
};

TailView checked_tail(const DurationSample& sample, std::int64_t tau_min) {
  if (sample.empty()) throw Error(Errc::kInsufficientData, "empty duration sample");
  TailView view{sample.tail_from(tau_min), tau_min, sample.max()};
  if (static_cast<std::int64_t>(view.data.size()) < kMinPointsInRange) {
    throw Error(Errc::kInsufficientData,
                "fewer than " + std::to_string(kMinPointsInRange) +
                    " points at or above tau_min=" + std::to_string(tau_min));
  }
  if (view.data.front() == view.data.back()) {
    throw Error(Errc::kDegenerate, "all in-range durations are equal");
  }
  return view;
}

double sum_log(std::span<const std::int64_t> data) {
  double s = 0.0;
  for (std::int64_t v : data) s += std::log(static_cast<double>(v));
  return s;
}

// Distinct values of a sorted span with the count of entries >= each.
template <typename Fn>
void for_each_distinct(std::span<const std::int64_t> data, Fn&& fn) {
  const std::size_t n = data.size();
  std::size_t i = 0;
  while (i < n) {
    fn(data[i], n - i);
    const std::int64_t v = data[i];
    while (i < n && data[i] == v) ++i;
  }
}

// Suffix sums Z[k] = sum_{i = lo + k}^{hi} i^-gamma, accumulated from hi
// downwards exactly as zeta_trunc does.
void fill_suffix_zeta(double gamma, std::int64_t lo, std::int64_t hi,
                      std::vector<double>& out) {
  out.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
  double s = 0.0;
  for (std::int64_t i = hi; i >= lo; --i) {
    s += std::pow(static_cast<double>(i), -gamma);
    out[static_cast<std::size_t>(i - lo)] = s;
  }
}

double aicw_of(double aic_self, double aic_other) {
  const double aic_min = std::min(aic_self, aic_other);
  const double w_self = std::exp(-(aic_self - aic_min) / 2.0);
  const double w_other = std::exp(-(aic_other - aic_min) / 2.0);
  return w_self / (w_self + w_other);
}

// TP fits for every candidate; the winner minimises the KS distance.
TailFitResult fit_tp_over(const DurationSample& sample,
                          const std::vector<std::int64_t>& candidates) {
  std::vector<TailView> views;
  std::vector<double> log_sums;
  for (std::int64_t c : candidates) {
    views.push_back(checked_tail(sample, c));
    log_sums.push_back(sum_log(views.back().data));
  }
  const std::int64_t lo = candidates.front();
  const std::int64_t hi = sample.max();

  std::vector<int> best_k(views.size(), 0);
  std::vector<double> best_ll(views.size(), -std::numeric_limits<double>::infinity());
  std::vector<double> zeta;
  for (int k = 0; k < kGammaGridSize; ++k) {
    const double gamma = gamma_grid_value(k);
    fill_suffix_zeta(gamma, lo, hi, zeta);
    for (std::size_t j = 0; j < views.size(); ++j) {
      const double n = static_cast<double>(views[j].data.size());
      const double ll =
          -n * std::log(zeta[static_cast<std::size_t>(views[j].tau_min - lo)]) -
          gamma * log_sums[j];
      if (ll > best_ll[j]) {
        best_ll[j] = ll;
        best_k[j] = k;
      }
    }
  }

  std::vector<double> ks(views.size(), 0.0);
  std::vector<int> ks_grid(best_k);
  std::sort(ks_grid.begin(), ks_grid.end());
  ks_grid.erase(std::unique(ks_grid.begin(), ks_grid.end()), ks_grid.end());
  for (int k : ks_grid) {
    fill_suffix_zeta(gamma_grid_value(k), lo, hi, zeta);
    for (std::size_t j = 0; j < views.size(); ++j) {
      if (best_k[j] != k) continue;
      const TailView& v = views[j];
      const double norm = zeta[static_cast<std::size_t>(v.tau_min - lo)];
      const double n = static_cast<double>(v.data.size());
      double d = 0.0;
      for_each_distinct(v.data, [&](std::int64_t tau, std::size_t at_least) {
        const double emp = static_cast<double>(at_least) / n;
        const double model = zeta[static_cast<std::size_t>(tau - lo)] / norm;
        d = std::max(d, std::fabs(emp - model));
      });
      ks[j] = d;
    }
  }

  std::size_t best = 0;
  for (std::size_t j = 1; j < views.size(); ++j) {
    if (ks[j] < ks[best]) best = j;
  }
  TailFitResult out;
  out.model = TailModel::kTp;
  out.exponent = gamma_grid_value(best_k[best]);
  out.tau_min = views[best].tau_min;
  out.tau_max = hi;
  out.n_used = static_cast<std::int64_t>(views[best].data.size());
  out.loglik = tp_loglik(views[best].data, out.exponent, out.tau_min, out.tau_max);
  out.ks_d = ks[best];
  out.boundary_hit = best_k[best] == 0 || best_k[best] == kGammaGridSize - 1;
  return out;
}

TailFitResult fit_ep_over(const DurationSample& sample,
                          const std::vector<std::int64_t>& candidates) {
  TailFitResult best;
  bool have = false;
  for (std::int64_t c : candidates) {
    const TailView v = checked_tail(sample, c);
    TailFitResult fit;
    fit.model = TailModel::kEp;
    fit.tau_min = c;
    fit.tau_max = v.tau_max;
    fit.exponent = ep_lambda_hat(v.data, c);
    fit.n_used = static_cast<std::int64_t>(v.data.size());
    fit.ks_d = ks_distance(sample, fit);
    if (!have || fit.ks_d < best.ks_d) {
      best = fit;
      have = true;
    }
  }
  best.loglik = ep_loglik(sample.tail_from(best.tau_min), best.exponent, best.tau_min);
  return best;
}

}  // namespace

std::string_view to_string(TailModel model) {
  return model == TailModel::kTp ? "TP" : "EP";
}

std::string_view to_string(DecisionPath path) {
  return path == DecisionPath::kAicwAgree ? "AICW_AGREE" : "D_ADJ_TIEBREAK";
}

DurationSample::DurationSample(std::vector<std::int64_t> values)
    : values_(std::move(values)) {
  for (std::int64_t v : values_) {
    if (v < 1) {
      throw Error(Errc::kInvalidArgument,
                  "durations must be positive integers, got " + std::to_string(v));
    }
  }
  std::sort(values_.begin(), values_.end());
}

std::span<const std::int64_t> DurationSample::tail_from(std::int64_t tau_min) const {
  const auto it = std::lower_bound(values_.begin(), values_.end(), tau_min);
  return {it, values_.end()};
}

double gamma_grid_value(int k) { return static_cast<double>(50 + k) / 100.0; }

double zeta_trunc(double gamma, std::int64_t a, std::int64_t b) {
  if (a < 1) throw Error(Errc::kInvalidArgument, "zeta_trunc needs a >= 1");
  if (a > b) throw Error(Errc::kInvalidArgument, "zeta_trunc needs a <= b");
  double s = 0.0;
  for (std::int64_t i = b; i >= a; --i) s += std::pow(static_cast<double>(i), -gamma);
  return s;
}

double tp_loglik(std::span<const std::int64_t> data, double gamma,
                 std::int64_t tau_min, std::int64_t tau_max) {
  for (std::int64_t v : data) {
    if (v < tau_min || v > tau_max) {
      throw Error(Errc::kInvalidArgument,
                  "duration " + std::to_string(v) + " outside the TP range");
    }
  }
  const double n = static_cast<double>(data.size());
  return -n * std::log(zeta_trunc(gamma, tau_min, tau_max)) - gamma * sum_log(data);
}

double ep_loglik(std::span<const std::int64_t> data, double lambda,
                 std::int64_t tau_min) {
  if (!(lambda > 0.0)) throw Error(Errc::kInvalidArgument, "EP rate must be positive");
  double excess = 0.0;
  for (std::int64_t v : data) {
    if (v < tau_min) {
      throw Error(Errc::kInvalidArgument,
                  "duration " + std::to_string(v) + " below the EP cut-off");
    }
    excess += static_cast<double>(v - tau_min);
  }
  const double m = static_cast<double>(data.size());
  return m * std::log(-std::expm1(-lambda)) - lambda * excess;
}

double ep_lambda_hat(std::span<const std::int64_t> data, std::int64_t tau_min) {
  double excess = 0.0;
  std::size_t m = 0;
  for (std::int64_t v : data) {
    if (v < tau_min) continue;
    excess += static_cast<double>(v - tau_min);
    ++m;
  }
  if (m == 0) throw Error(Errc::kInsufficientData, "no durations at or above tau_min");
  if (excess == 0.0) {
    throw Error(Errc::kDegenerate, "all durations equal tau_min; EP rate diverges");
  }
  return std::log1p(static_cast<double>(m) / excess);
}

double model_ccdf(const TailFitResult& fit, std::int64_t tau) {
  if (tau < fit.tau_min) throw Error(Errc::kInvalidArgument, "tau below the model support");
  if (fit.model == TailModel::kTp) {
    if (tau > fit.tau_max) throw Error(Errc::kInvalidArgument, "tau above the TP support");
    return zeta_trunc(fit.exponent, tau, fit.tau_max) /
           zeta_trunc(fit.exponent, fit.tau_min, fit.tau_max);
  }
  return std::exp(-fit.exponent * static_cast<double>(tau - fit.tau_min));
}

std::vector<std::pair<std::int64_t, double>> empirical_ccdf(
    const DurationSample& data, std::int64_t tau_min, std::int64_t tau_max) {
  std::span<const std::int64_t> tail = data.tail_from(tau_min);
  const auto end = std::upper_bound(tail.begin(), tail.end(), tau_max);
  tail = tail.first(static_cast<std::size_t>(end - tail.begin()));
  std::vector<std::pair<std::int64_t, double>> out;
  const double n = static_cast<double>(tail.size());
  for_each_distinct(tail, [&](std::int64_t tau, std::size_t at_least) {
    out.emplace_back(tau, static_cast<double>(at_least) / n);
  });
  return out;
}

double ks_distance(const DurationSample& data, const TailFitResult& fit) {
  if (fit.model == TailModel::kTp) {
    // Share the suffix sums across points; identical to model_ccdf.
    std::vector<double> zeta;
    fill_suffix_zeta(fit.exponent, fit.tau_min, fit.tau_max, zeta);
    double d = 0.0;
    for (const auto& [tau, emp] : empirical_ccdf(data, fit.tau_min, fit.tau_max)) {
      const double model = zeta[static_cast<std::size_t>(tau - fit.tau_min)] / zeta[0];
      d = std::max(d, std::fabs(emp - model));
    }
    return d;
  }
  double d = 0.0;
  for (const auto& [tau, emp] : empirical_ccdf(data, fit.tau_min, data.max())) {
    d = std::max(d, std::fabs(emp - model_ccdf(fit, tau)));
  }
  return d;
}

std::vector<std::int64_t> tau_min_candidates(const DurationSample& data) {
  const auto n = static_cast<std::int64_t>(data.size());
  const std::int64_t need =
      std::max<std::int64_t>(kMinPointsInRange, (n + 19) / 20);  // ceil(5%)
  std::vector<std::int64_t> out;
  if (data.empty()) return out;
  for_each_distinct(data.values(), [&](std::int64_t tau, std::size_t at_least) {
    if (static_cast<std::int64_t>(at_least) >= need && tau < data.max()) {
      out.push_back(tau);
    }
  });
  return out;
}

TailFitResult fit_tp_at(const DurationSample& data, std::int64_t tau_min) {
  return fit_tp_over(data, {tau_min});
}

TailFitResult fit_ep_at(const DurationSample& data, std::int64_t tau_min) {
  return fit_ep_over(data, {tau_min});
}

TailFitResult fit_tp(const DurationSample& data) {
  const auto candidates = tau_min_candidates(data);
  if (candidates.empty()) {
    throw Error(Errc::kInsufficientData,
                "no admissible tau_min: need >= " + std::to_string(kMinPointsInRange) +
                    " in-range points spanning >= 2 distinct durations");
  }
  return fit_tp_over(data, candidates);
}

TailFitResult fit_ep(const DurationSample& data) {
  const auto candidates = tau_min_candidates(data);
  if (candidates.empty()) {
    throw Error(Errc::kInsufficientData,
                "no admissible tau_min: need >= " + std::to_string(kMinPointsInRange) +
                    " in-range points spanning >= 2 distinct durations");
  }
  return fit_ep_over(data, candidates);
}

ModelSelection select_model(const DurationSample& data) {
  ModelSelection sel;
  sel.tp_at_tp_range = fit_tp(data);
  sel.ep_at_ep_range = fit_ep(data);
  sel.ep_at_tp_range = fit_ep_at(data, sel.tp_at_tp_range.tau_min);
  sel.tp_at_ep_range = fit_tp_at(data, sel.ep_at_ep_range.tau_min);

  const double log_n = std::log(static_cast<double>(data.size()));
  for (TailFitResult* fit : {&sel.tp_at_tp_range, &sel.ep_at_tp_range,
                             &sel.tp_at_ep_range, &sel.ep_at_ep_range}) {
    fit->aic = -2.0 * fit->loglik + 2.0;
    fit->d_adj = log_n / std::log(static_cast<double>(fit->n_used)) * fit->ks_d;
  }
  auto weigh = [](TailFitResult& tp, TailFitResult& ep) {
    tp.aicw = aicw_of(tp.aic, ep.aic);
    ep.aicw = aicw_of(ep.aic, tp.aic);
  };
  weigh(sel.tp_at_tp_range, sel.ep_at_tp_range);
  weigh(sel.tp_at_ep_range, sel.ep_at_ep_range);

  const bool tp_first = sel.tp_at_tp_range.aicw > sel.ep_at_tp_range.aicw;
  const bool tp_second = sel.tp_at_ep_range.aicw > sel.ep_at_ep_range.aicw;
  const bool ep_first = sel.tp_at_tp_range.aicw < sel.ep_at_tp_range.aicw;
  const bool ep_second = sel.tp_at_ep_range.aicw < sel.ep_at_ep_range.aicw;
  if (tp_first && tp_second) {
    sel.winner = TailModel::kTp;
    sel.decision_path = DecisionPath::kAicwAgree;
  } else if (ep_first && ep_second) {
    sel.winner = TailModel::kEp;
    sel.decision_path = DecisionPath::kAicwAgree;
  } else {
    sel.decision_path = DecisionPath::kDAdjTiebreak;
    sel.winner = sel.ep_at_ep_range.d_adj < sel.tp_at_tp_range.d_adj ? TailModel::kEp
                                                                      : TailModel::kTp;
  }
  return sel;
}

}  // namespace bib
