#pragma once

#include <cstdint>

namespace netsemi {

/// Counter-based generator (SplitMix64): output k of stream s under seed x is
/// mix(key(x, s) + k * gamma). Pure 64-bit integer arithmetic, so sequences
/// are identical across platforms and independent of any library RNG state.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : state_(mix(seed ^ mix(stream * kGamma + 0x1F123BB5ULL))) {}

  std::uint64_t next_u64() {
    state_ += kGamma;
    return mix(state_);
  }

  /// Uniform draw strictly inside (0, 1); safe as a quantile-function input.
  double uniform01() {
    return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1p-52;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z += kGamma;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

/// Fixed stream ids so independent uses of the same replication seed never
/// overlap: fixed-effect draws, pair draws, solver restarts.
namespace rng_stream {
inline constexpr std::uint64_t kFixedEffects = 0;
inline constexpr std::uint64_t kNetwork = 1;
inline constexpr std::uint64_t kSolverRestartBase = 2;  // + restart index
}  // namespace rng_stream

}  // namespace netsemi
