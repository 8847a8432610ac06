#pragma once

#include <cstdint>

namespace subrec {

// splitmix64 step; portable and stable across platforms, unlike the
// standard <random> distributions.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Named seed derivation: all sub-streams (trials, generator phases) are
// reached from the master seed through this function only.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t s = master ^ (0x9e3779b97f4a7c15ULL * (index + 1));
  return splitmix64(s);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  // uniform in [0, 1)
  double next_real01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double next_real(double lo, double hi) { return lo + (hi - lo) * next_real01(); }

  // uniform integer in [lo, hi], inclusive; lo <= hi
  std::uint64_t next_int(std::uint64_t lo, std::uint64_t hi) {
    return lo + next_u64() % (hi - lo + 1);
  }

  // uniform index in [0, n); n > 0
  std::size_t next_index(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

  bool next_bool(double p) { return next_real01() < p; }

 private:
  std::uint64_t state_;
};

}  // namespace subrec
