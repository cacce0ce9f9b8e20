#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "bib/analysis.hpp"
#include "bib/environment.hpp"
#include "bib/inference.hpp"

namespace bib {

struct RunConfig {
  InferenceConfig inference;
  EnvConfig env;
  std::int64_t steps = 20000;   // total, burn-in included
  std::int64_t burnin = 10000;  // discarded prefix
  std::uint64_t seed = 1;
  int replicas = 1;

  void validate() const;
};

// Runs one replica and keeps rows t = burnin+1 .. steps (t counts from 1).
// Environment and inference use the replica's two derived streams.
Trace simulate(const RunConfig& cfg, int replica);

// Calls fn(i) for i in [0, count) on a small thread pool. Results land in
// slot i, so the output order never depends on scheduling.
template <typename T>
std::vector<T> parallel_map(std::size_t count, const std::function<T(std::size_t)>& fn);

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

template <typename T>
std::vector<T> parallel_map(std::size_t count, const std::function<T(std::size_t)>& fn) {
  std::vector<T> out(count);
  parallel_for(count, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace bib
