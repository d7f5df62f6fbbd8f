#pragma once

#include <cstdint>

#include "frrn/config.hpp"

namespace frrn {
inline namespace FRRN_ABI_NAMESPACE {

/// Counter-based generator: the i-th draw is splitmix64(seed + i * golden),
/// so a (seed, counter) pair fully determines the stream on every platform.
/// Distributions are implemented here rather than with <random> because the
/// standard distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : key_(seed) {}

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi);
  /// Standard normal (Box-Muller, one value per call).
  double normal();

  /// Independent generator derived from this seed and a stream id. Does not
  /// advance this generator.
  Rng fork(std::uint64_t stream) const;

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace FRRN_ABI_NAMESPACE
}  // namespace frrn
