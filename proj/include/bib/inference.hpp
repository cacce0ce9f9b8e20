#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "bib/rng.hpp"

namespace bib {

// BAYES: discounted Bayesian updating with a fixed likelihood variance.
// BIB: the same update plus the inverse (variance-expanding) likelihood update.
enum class Mode { kBayes, kBib };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);

struct InferenceConfig {
  double beta = 0.05;     // discount rate / symmetry-bias strength, [0, 1)
  double sigma0 = 0.09;   // initial and reset likelihood variance
  Mode mode = Mode::kBib;
  int grid_n = 50;        // grid points are indexed 0..grid_n inclusive
  double grid_origin = -2.5;
  double grid_delta = 0.1;
  double theta0 = 0.0;
  double phi0 = 0.09;

  // Throws Error(kInvalidConfig) on violated invariants.
  void validate() const;

  double grid_point(int i) const { return grid_origin + i * grid_delta; }
  std::size_t grid_size() const { return static_cast<std::size_t>(grid_n) + 1; }
};

// Stored argmax when every grid density vanished and no random draw has been
// made yet (only possible for an initial state built without an RNG).
inline constexpr int kRandomPending = -1;

struct BeliefState {
  double theta = 0.0;
  double phi = 0.09;    // may be +inf
  double sigma = 0.09;  // may be +inf
  double alpha = 1.0;
  int mu_max_index = kRandomPending;
};

struct StepRecord {
  std::int64_t t = 0;
  double d = 0.0;
  double eta = 0.0;
  double theta = 0.0;
  double phi = 0.0;
  double sigma = 0.0;
  double alpha = 0.0;
  bool reset = false;
  bool active = false;

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

// alpha = phi / (phi + (1 - beta) sigma). An infinite phi gives 1, an
// infinite sigma (with finite phi) gives 0.
double learning_rate(double phi, double sigma, double beta);

// Discounted Bayesian update of the prior; sigma is left untouched.
BeliefState bayes_update(const BeliefState& state, double d,
                         const InferenceConfig& cfg);

// sigma' = sigma (phi + sigma) / (phi + (1 - beta) sigma), read from the
// pre-step state. Overflow saturates to +inf. Rejected in BAYES mode.
BeliefState inverse_bayes_update(const BeliefState& state,
                                 const InferenceConfig& cfg);

// Gaussian prior N(theta, phi) evaluated at each grid point. All zeros when
// phi is infinite.
std::vector<double> prior_density_at_grid(const BeliefState& state,
                                          const InferenceConfig& cfg);

// Predictive density of the next observation, N(d; theta, sigma + phi).
double predictive_density(const BeliefState& state, double d);

// Index of the largest density, lowest index on ties. When every entry is
// equal, or every entry is zero or NaN, the index is drawn uniformly.
int argmax_hypothesis(std::span<const double> densities, Rng& rng);

// Starting belief. The argmax index is computed from (theta0, phi0); if the
// grid densities collapse it is drawn from rng.
BeliefState initial_state(const InferenceConfig& cfg, Rng& rng);

// One full cycle: Bayes update, inverse update (BIB), argmax check, reset.
std::pair<BeliefState, StepRecord> step(const BeliefState& state, double d,
                                        const InferenceConfig& cfg, Rng& rng);

}  // namespace bib
