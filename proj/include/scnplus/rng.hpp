#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace scnplus {

/// Splittable counter-style random stream. Every stream is a pure function
/// of (seed, stream_id); distinct stream ids walk distinct Weyl orbits, so
/// substreams can be consumed in any order (or in parallel) and still
/// reproduce a sequential run bit for bit.
class SplitStream {
 public:
  SplitStream(std::uint64_t seed, std::uint64_t stream_id)
      : state_(mix(seed ^ mix(stream_id + kGoldenGamma))),
        gamma_(mix_gamma(mix(stream_id) ^ (seed * 0x9E3779B97F4A7C15ULL))) {}

  std::uint64_t next_u64() {
    state_ += gamma_;
    return mix(state_);
  }

  /// Uniform double in [0, 1), 53-bit resolution.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) {
    return lo + next_unit() * (hi - lo);
  }

  /// Unbiased uniform integer in [0, bound). Rejection sampling.
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("SplitStream::below: bound must be > 0");
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  /// Fisher-Yates shuffle. Portable: does not depend on std::shuffle's
  /// implementation-defined draw sequence.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[static_cast<std::size_t>(below(i))]);
    }
  }

 private:
  static constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

  // Stafford variant 13 of the splitmix64 finalizer.
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  // Per-stream Weyl increment; forced odd so every stream has full period.
  static std::uint64_t mix_gamma(std::uint64_t z) {
    z ^= z >> 33;
    z *= 0xFF51AFD7ED558CCDULL;
    z ^= z >> 33;
    z *= 0xC4CEB9FE1A85EC53ULL;
    z ^= z >> 33;
    return z | 1ULL;
  }

  std::uint64_t state_;
  std::uint64_t gamma_;
};

/// Stream-id allocation. Candidate substreams occupy the low range
/// (node * 1e6 + sweep * 1e3 + candidate); control streams are tagged with a
/// high bit so the two ranges can never collide.
namespace stream_id {

inline constexpr std::uint64_t kControlTag = 1ULL << 40;

inline constexpr std::uint64_t row_shuffle = kControlTag + 1;  // train/test shuffle
inline constexpr std::uint64_t attr_split = kControlTag + 2;   // privileged halving
inline constexpr std::uint64_t r_renewal = kControlTag + 3;    // tau draws
inline constexpr std::uint64_t synthetic = kControlTag + 4;    // synthetic data

/// Substream of one candidate draw. `sweep` counts lambda sweeps within a
/// node, continuing across r-renewals, so renewed pools see fresh draws.
inline constexpr std::uint64_t candidate(int node_index, int sweep_index,
                                         int candidate_index) {
  return static_cast<std::uint64_t>(node_index) * 1'000'000ULL +
         static_cast<std::uint64_t>(sweep_index) * 1'000ULL +
         static_cast<std::uint64_t>(candidate_index);
}

}  // namespace stream_id

}  // namespace scnplus
