#include "bib/environment.hpp"

#include <cmath>

#include "bib/error.hpp"

namespace bib {

void EnvConfig::validate() const {
  auto fail = [](const char* msg) { throw Error(Errc::kInvalidConfig, msg); };
  if (!(omega > 0.0) || !std::isfinite(omega)) fail("omega must be positive and finite");
  if (!(change_prob >= 0.0 && change_prob <= 1.0)) fail("change_prob must lie in [0, 1]");
  if (!std::isfinite(mean_low) || !std::isfinite(mean_high) || !(mean_low < mean_high)) {
    fail("mean_low must be below mean_high");
  }
  if (!std::isfinite(eta0)) fail("eta0 must be finite");
}

EnvState initial_env(const EnvConfig& cfg) {
  cfg.validate();
  return EnvState{cfg.eta0, 0};
}

EnvSample advance(const EnvState& env, const EnvConfig& cfg, Rng& rng) {
  EnvSample out;
  out.state = env;
  out.state.t = env.t + 1;
  if (rng.uniform() < cfg.change_prob) {
    out.state.eta = rng.uniform(cfg.mean_low, cfg.mean_high);
    out.changed = true;
  }
  out.d = out.state.eta + std::sqrt(cfg.omega) * rng.normal();
  return out;
}

}  // namespace bib
