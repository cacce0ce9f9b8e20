#include "bib/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "bib/error.hpp"

namespace bib {

void RunConfig::validate() const {
  inference.validate();
  env.validate();
  if (steps < 1) throw Error(Errc::kInvalidConfig, "steps must be positive");
  if (burnin < 0 || burnin >= steps) {
    throw Error(Errc::kInvalidConfig, "burnin must lie in [0, steps)");
  }
  if (replicas < 1) throw Error(Errc::kInvalidConfig, "replicas must be at least 1");
}

Trace simulate(const RunConfig& cfg, int replica) {
  cfg.validate();
  const auto rep = static_cast<std::uint64_t>(replica);
  Rng env_rng(derive_seed(cfg.seed, rep, Stream::kEnvironment));
  Rng inf_rng(derive_seed(cfg.seed, rep, Stream::kInference));

  EnvState env = initial_env(cfg.env);
  BeliefState belief = initial_state(cfg.inference, inf_rng);

  std::vector<StepRecord> records;
  records.reserve(static_cast<std::size_t>(cfg.steps - cfg.burnin));
  for (std::int64_t t = 1; t <= cfg.steps; ++t) {
    const EnvSample sample = advance(env, cfg.env, env_rng);
    env = sample.state;
    auto [next, rec] = step(belief, sample.d, cfg.inference, inf_rng);
    belief = next;
    if (t > cfg.burnin) {
      rec.t = t;
      rec.eta = env.eta;
      records.push_back(rec);
    }
  }
  return Trace::from_records(std::move(records));
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace bib
