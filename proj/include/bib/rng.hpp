#pragma once

#include <cstdint>
#include <random>

namespace bib {

// Stream identifiers used when splitting a master seed. Environment and
// inference draw from disjoint streams so that BAYES and BIB runs with the
// same seed see the same observation sequence.
enum class Stream : std::uint64_t {
  kEnvironment = 0,
  kInference = 1,
  kSynthetic = 2,
};

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Deterministic (seed, replica, stream) -> 64-bit seed. Replica k's seed does
// not depend on how many replicas are requested.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replica,
                          Stream stream) noexcept;

// Thin wrapper around std::mt19937_64, whose output sequence is fixed by the
// C++ standard. Uniform and Gaussian transforms are implemented here rather
// than through <random> distributions, whose algorithms are left to the
// library vendor.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n), unbiased (rejection on the top bits).
  std::uint64_t below(std::uint64_t n);

  // Standard normal by the Marsaglia polar method. The second variate of each
  // accepted pair is cached.
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace bib
