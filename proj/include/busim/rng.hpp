#pragma once

#include <cstdint>
#include <random>

namespace busim {

// Deterministic RNG wrapper. std::mt19937_64 output is pinned by the
// standard, but the distribution adapters are not, so the mapping from raw
// draws to values lives here and nowhere else.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  // uniform in [0, n), n > 0; modulo mapping (bias irrelevant at our scales,
  // reproducibility is what matters)
  uint64_t uniform_u64(uint64_t n) { return gen_() % n; }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(uniform_u64(static_cast<uint64_t>(hi - lo + 1)));
  }

  // uniform in [0, 1)
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // derive an independent stream; splitmix64 finalizer over (seed, salt)
  static uint64_t derive(uint64_t seed, uint64_t salt) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace busim
