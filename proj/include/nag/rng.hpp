// Deterministic random streams for reproducible simulations.
//
// std::random distributions are implementation-defined, so everything here is
// hand-rolled on top of xoshiro256** seeded through SplitMix64. Identical
// (seed, run_id) pairs produce identical draw sequences on every platform.
#pragma once

#include <cstdint>
#include <stdexcept>

namespace nag {

// SplitMix64 finalizer. Used to expand seeds and to derive per-run streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) word = splitmix64(s);
  }

  // Stream for run r of a Monte-Carlo batch. Runs are derived independently
  // from (master_seed, run_id), so adding runs never perturbs existing ones.
  static RandomStream for_run(std::uint64_t master_seed, std::uint64_t run_id) {
    std::uint64_t s = master_seed;
    std::uint64_t base = splitmix64(s);
    std::uint64_t r = run_id;
    return RandomStream(base ^ splitmix64(r) ^ (0x9E3779B97F4A7C15ull * (run_id + 1)));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n). Rejection sampling keeps the draw unbiased.
  std::uint64_t uniform_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_below: n must be positive");
    if (n == 1) return 0;
    const std::uint64_t limit = (UINT64_MAX / n) * n;
    std::uint64_t draw;
    do {
      draw = next_u64();
    } while (draw >= limit);
    return draw % n;
  }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

}  // namespace nag
