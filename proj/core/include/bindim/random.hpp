#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace bindim {

/// Derives an independent stream seed from a master seed, a purpose tag and
/// an index (row, column, replicate...). The same triple always yields the
/// same seed, so results do not depend on evaluation order.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag, std::uint64_t index = 0);

/// Thin wrapper over std::mt19937_64. The engine is fully specified by the
/// standard; the distributions below are written out so that the produced
/// numbers are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, std::string_view tag, std::uint64_t index = 0)
      : engine_(derive_seed(seed, tag, index)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bindim
