#include "bib/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "bib/error.hpp"

namespace bib {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool positive_variance(double v) { return v > 0.0; }  // false for NaN

void check_beta(double beta) {
  if (!(beta >= 0.0 && beta < 1.0)) {
    throw Error(Errc::kInvalidArgument,
                "beta must lie in [0, 1), got " + std::to_string(beta));
  }
}

void check_state(const BeliefState& s) {
  if (!std::isfinite(s.theta)) {
    throw Error(Errc::kInvalidArgument, "belief estimate theta must be finite");
  }
  if (!positive_variance(s.phi) || !positive_variance(s.sigma)) {
    throw Error(Errc::kInvalidArgument,
                "belief variances must be positive (phi=" + std::to_string(s.phi) +
                    ", sigma=" + std::to_string(s.sigma) + ")");
  }
}

}  // namespace

std::string_view to_string(Mode mode) {
  return mode == Mode::kBayes ? "bayes" : "bib";
}

Mode parse_mode(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "bayes") return Mode::kBayes;
  if (lower == "bib") return Mode::kBib;
  throw Error(Errc::kInvalidConfig,
              "unknown mode '" + std::string(text) + "' (expected bayes or bib)");
}

void InferenceConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(Errc::kInvalidConfig, msg); };
  if (!(beta >= 0.0 && beta < 1.0)) fail("beta must lie in [0, 1)");
  if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) fail("sigma0 must be positive and finite");
  if (!(phi0 > 0.0) || !std::isfinite(phi0)) fail("phi0 must be positive and finite");
  if (!(grid_delta > 0.0) || !std::isfinite(grid_delta)) fail("grid_delta must be positive");
  if (grid_n < 1) fail("grid_n must be at least 1");
  if (!std::isfinite(grid_origin)) fail("grid_origin must be finite");
  if (!std::isfinite(theta0)) fail("theta0 must be finite");
}

double learning_rate(double phi, double sigma, double beta) {
  if (!positive_variance(phi) || !positive_variance(sigma)) {
    throw Error(Errc::kInvalidArgument, "learning_rate needs positive variances");
  }
  check_beta(beta);
  if (std::isinf(phi)) return 1.0;
  if (std::isinf(sigma)) return 0.0;
  const double denom = phi + (1.0 - beta) * sigma;
  if (std::isinf(denom)) {
    // Both terms huge but finite: work with the ratio instead.
    return 1.0 / (1.0 + (1.0 - beta) * (sigma / phi));
  }
  return phi / denom;
}

BeliefState bayes_update(const BeliefState& state, double d,
                         const InferenceConfig& cfg) {
  check_state(state);
  if (!std::isfinite(d)) {
    throw Error(Errc::kInvalidArgument, "observation must be finite");
  }
  BeliefState next = state;
  const double a = learning_rate(state.phi, state.sigma, cfg.beta);
  next.alpha = a;
  // phi' = alpha * sigma, with the sigma -> inf limit taken explicitly
  // (alpha = 0 there, but the product tends to phi / (1 - beta)).
  next.phi = std::isinf(state.sigma) && std::isfinite(state.phi)
                 ? state.phi / (1.0 - cfg.beta)
                 : a * state.sigma;
  // (1 - a) theta + a d, kept inside [min(theta, d), max(theta, d)].
  const double moved = state.theta + a * (d - state.theta);
  next.theta = std::clamp(moved, std::min(state.theta, d), std::max(state.theta, d));
  return next;
}

BeliefState inverse_bayes_update(const BeliefState& state,
                                 const InferenceConfig& cfg) {
  if (cfg.mode != Mode::kBib) {
    throw Error(Errc::kInvalidArgument,
                "inverse Bayesian update is only defined in BIB mode");
  }
  check_state(state);
  check_beta(cfg.beta);
  BeliefState next = state;
  if (std::isinf(state.sigma)) return next;
  // sigma (phi + sigma) / (phi + (1 - beta) sigma)
  //   = sigma + beta sigma / (phi / sigma + 1 - beta)
  // The second form only overflows when the result does.
  const double ratio = state.phi / state.sigma;
  next.sigma = state.sigma + cfg.beta * state.sigma / (ratio + (1.0 - cfg.beta));
  return next;
}

std::vector<double> prior_density_at_grid(const BeliefState& state,
                                          const InferenceConfig& cfg) {
  std::vector<double> out(cfg.grid_size(), 0.0);
  if (std::isinf(state.phi)) return out;
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * state.phi);
  const double inv_two_phi = 1.0 / (2.0 * state.phi);
  for (int i = 0; i <= cfg.grid_n; ++i) {
    const double dx = cfg.grid_point(i) - state.theta;
    out[static_cast<std::size_t>(i)] = norm * std::exp(-dx * dx * inv_two_phi);
  }
  return out;
}

double predictive_density(const BeliefState& state, double d) {
  check_state(state);
  const double var = state.sigma + state.phi;
  if (std::isinf(var)) return 0.0;
  const double dx = d - state.theta;
  return std::exp(-dx * dx / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
}

int argmax_hypothesis(std::span<const double> densities, Rng& rng) {
  if (densities.empty()) {
    throw Error(Errc::kInvalidArgument, "argmax over an empty density vector");
  }
  std::size_t best = densities.size();
  bool all_equal = true;
  bool all_vanished = true;
  for (std::size_t i = 0; i < densities.size(); ++i) {
    const double v = densities[i];
    if (std::isnan(v)) {
      all_equal = false;
      continue;
    }
    if (v != 0.0) all_vanished = false;
    if (v != densities[0]) all_equal = false;
    if (best == densities.size() || v > densities[best]) best = i;
  }
  if (all_vanished || all_equal) {
    return static_cast<int>(rng.below(densities.size()));
  }
  return static_cast<int>(best);
}

BeliefState initial_state(const InferenceConfig& cfg, Rng& rng) {
  cfg.validate();
  BeliefState s;
  s.theta = cfg.theta0;
  s.phi = cfg.phi0;
  s.sigma = cfg.sigma0;
  s.alpha = learning_rate(cfg.phi0, cfg.sigma0, cfg.beta);
  s.mu_max_index = argmax_hypothesis(prior_density_at_grid(s, cfg), rng);
  return s;
}

std::pair<BeliefState, StepRecord> step(const BeliefState& state, double d,
                                        const InferenceConfig& cfg, Rng& rng) {
  BeliefState next = bayes_update(state, d, cfg);
  next.sigma = cfg.mode == Mode::kBib ? inverse_bayes_update(state, cfg).sigma
                                      : cfg.sigma0;

  const std::vector<double> densities = prior_density_at_grid(next, cfg);
  const int index = argmax_hypothesis(densities, rng);
  const bool reset = index != state.mu_max_index;
  next.mu_max_index = index;
  if (reset) next.sigma = cfg.sigma0;

  StepRecord rec;
  rec.d = d;
  rec.theta = next.theta;
  rec.phi = next.phi;
  rec.sigma = next.sigma;
  rec.alpha = next.alpha;
  rec.reset = reset;
  rec.active = next.alpha > cfg.beta;
  return {next, rec};
}

}  // namespace bib
