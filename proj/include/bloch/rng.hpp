// Deterministic random streams for Monte Carlo runs.
//
// Stream-derivation rule (the replay contract): worker w of a run seeded with
// master seed s draws from an mt19937_64 engine seeded with
//
//     child(s, w) = splitmix64_mix(s + GOLDEN * (w + 1))
//
// where splitmix64_mix is the SplitMix64 output finalizer and GOLDEN is its
// canonical increment 0x9E3779B97F4A7C15.  SplitMix64 is the standard seeder
// for 64-bit engines; distinct worker indices land in well-separated regions
// of the seed space, so per-worker streams are independent for our purposes
// and a run is reproducible from (master seed, worker count, shot split)
// alone, regardless of thread scheduling.
//
// Doubles are produced from raw engine output (53 high bits), not through
// std::uniform_real_distribution, so the byte stream of results depends only
// on the engine sequence fixed by the standard.
#pragma once

#include <cstdint>
#include <random>

namespace bloch {

inline constexpr std::uint64_t SPLITMIX_GOLDEN = 0x9E3779B97F4A7C15ull;

// SplitMix64 output finalizer (Steele, Lea & Flood's mix function).
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

constexpr std::uint64_t child_seed(std::uint64_t master_seed, std::uint64_t stream_index) {
  return splitmix64_mix(master_seed + SPLITMIX_GOLDEN * (stream_index + 1));
}

class RngStream {
 public:
  explicit RngStream(std::uint64_t master_seed, std::uint64_t stream_index = 0)
      : engine_(child_seed(master_seed, stream_index)) {}

  std::uint64_t raw() { return engine_(); }

  // Uniform in [0, 1): 53-bit mantissa from the top of the engine word.
  double uniform01() { return static_cast<double>(raw() >> 11) * 0x1.0p-53; }

  // Unit-rate exponential; draws u in (0, 1] so log never sees zero.
  double exponential();

  // Uniform integer in [0, n); n must be positive.
  std::uint64_t uniform_below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace bloch
