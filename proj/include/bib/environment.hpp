#pragma once

#include <cstdint>

#include "bib/rng.hpp"

namespace bib {

// Gaussian observations around a mean that jumps, with probability
// change_prob per step, to a fresh uniform draw from [mean_low, mean_high].
struct EnvConfig {
  double omega = 0.09;
  double change_prob = 0.001;
  double mean_low = -2.5;
  double mean_high = 2.5;
  double eta0 = 0.0;

  void validate() const;
};

struct EnvState {
  double eta = 0.0;
  std::int64_t t = 0;
};

struct EnvSample {
  EnvState state;
  double d = 0.0;
  bool changed = false;
};

EnvState initial_env(const EnvConfig& cfg);

// Jump check first, then one observation from N(eta_new, omega).
EnvSample advance(const EnvState& env, const EnvConfig& cfg, Rng& rng);

}  // namespace bib
