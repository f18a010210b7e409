#pragma once
// Splittable counter-based pseudo-random generator.
//
// Every sampled artifact gets its own stream derived from (seed, path of
// indices), so ensembles are reproducible independently of evaluation order
// and window extensions reuse the same per-tree randomness.

#include <cmath>
#include <cstdint>

namespace bmaps {

namespace detail {
// SplitMix64 finalizer; bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : key_(detail::mix64(seed ^ 0x5851f42d4c957f2dULL)), ctr_(0) {}

  // Child stream: deterministic function of (parent key, index), independent
  // of how much the parent has been consumed.
  Rng child(std::uint64_t index) const {
    Rng r;
    r.key_ = detail::mix64(key_ ^ detail::mix64(index + 0x9e3779b97f4a7c15ULL));
    r.ctr_ = 0;
    return r;
  }
  Rng child(std::uint64_t a, std::uint64_t b) const { return child(a).child(b); }

  std::uint64_t u64() { return detail::mix64(key_ + 0xd1b54a32d192ed03ULL * ++ctr_); }

  // Uniform in [0,1), 53-bit mantissa.
  double uniform() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), n > 0. Rejection-free Lemire reduction.
  std::uint64_t below(std::uint64_t n) {
    __uint128_t m = static_cast<__uint128_t>(u64()) * n;
    return static_cast<std::uint64_t>(m >> 64);
  }

  int pm1() { return (u64() & 1) ? 1 : -1; }       // uniform in {-1,+1}
  int u3() { return static_cast<int>(below(3)) - 1; }  // uniform in {-1,0,+1}

  bool bern(double p) { return uniform() < p; }

  // Standard normal via Box-Muller (explicit, for cross-run determinism).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 == 0.0) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Geometric on {0,1,2,...} with success probability 1/2: P[k] = 2^-(k+1).
  // Counts trailing coin flips; exact and branch-cheap.
  int geom_half() {
    int k = 0;
    for (;;) {
      std::uint64_t w = u64();
      if (w != ~0ULL) {
        while (w & 1) {
          ++k;
          w >>= 1;
        }
        return k;
      }
      k += 64;
    }
  }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace bmaps
