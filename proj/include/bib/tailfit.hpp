#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace bib {

enum class TailModel { kTp, kEp };
enum class DecisionPath { kAicwAgree, kDAdjTiebreak };

std::string_view to_string(TailModel model);
std::string_view to_string(DecisionPath path);

// Sorted positive integer durations.
class DurationSample {
 public:
  DurationSample() = default;
  // Sorts; throws Error(kInvalidArgument) on any value < 1.
  explicit DurationSample(std::vector<std::int64_t> values);

  std::span<const std::int64_t> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  std::int64_t max() const { return values_.back(); }

  // Suffix of the sorted sample with every value >= tau_min.
  std::span<const std::int64_t> tail_from(std::int64_t tau_min) const;

 private:
  std::vector<std::int64_t> values_;
};

struct TailFitResult {
  TailModel model = TailModel::kTp;
  double exponent = 0.0;  // gamma for TP, lambda for EP
  std::int64_t tau_min = 1;
  std::int64_t tau_max = 1;  // data maximum; unused by the EP model
  double loglik = 0.0;
  double ks_d = 0.0;
  std::int64_t n_used = 0;
  double aic = 0.0;
  double aicw = 0.0;
  double d_adj = 0.0;
  bool boundary_hit = false;  // TP only: gamma landed on a grid edge
};

struct ModelSelection {
  TailFitResult tp_at_tp_range;
  TailFitResult ep_at_tp_range;
  TailFitResult tp_at_ep_range;
  TailFitResult ep_at_ep_range;
  TailModel winner = TailModel::kTp;
  DecisionPath decision_path = DecisionPath::kAicwAgree;
};

// Exponent grid searched by the TP fitter: 0.50, 0.51, ..., 3.50.
inline constexpr int kGammaGridSize = 301;
double gamma_grid_value(int k);

// Fewest in-range points accepted for a fit.
inline constexpr std::int64_t kMinPointsInRange = 10;

// sum_{i=a}^{b} i^-gamma, accumulated from b down to a.
double zeta_trunc(double gamma, std::int64_t a, std::int64_t b);

double tp_loglik(std::span<const std::int64_t> data, double gamma,
                 std::int64_t tau_min, std::int64_t tau_max);
double ep_loglik(std::span<const std::int64_t> data, double lambda,
                 std::int64_t tau_min);

// Closed-form EP maximum-likelihood rate over data >= tau_min.
double ep_lambda_hat(std::span<const std::int64_t> data, std::int64_t tau_min);

// TP: zeta(gamma, tau, tau_max) / zeta(gamma, tau_min, tau_max).
// EP: exp(-lambda (tau - tau_min)).
double model_ccdf(const TailFitResult& fit, std::int64_t tau);

// Empirical CCDF of data restricted to [tau_min, tau_max]: one point per
// distinct in-range value, (# in range >= tau) / n.
std::vector<std::pair<std::int64_t, double>> empirical_ccdf(
    const DurationSample& data, std::int64_t tau_min, std::int64_t tau_max);

// Max |empirical - model| over the distinct in-range values.
double ks_distance(const DurationSample& data, const TailFitResult& fit);

// Fits at a fixed tau_min; tau_max is always the data maximum.
TailFitResult fit_tp_at(const DurationSample& data, std::int64_t tau_min);
TailFitResult fit_ep_at(const DurationSample& data, std::int64_t tau_min);

// Candidate lower cut-offs: distinct values leaving at least
// max(kMinPointsInRange, 5% of the sample) points and two distinct values
// in range.
std::vector<std::int64_t> tau_min_candidates(const DurationSample& data);

// Maximum likelihood fits with tau_min chosen to minimise the KS distance.
TailFitResult fit_tp(const DurationSample& data);
TailFitResult fit_ep(const DurationSample& data);

ModelSelection select_model(const DurationSample& data);

}  // namespace bib
