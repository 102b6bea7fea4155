#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace casvm {

// Deterministic, platform-independent generator. std::mt19937_64 would do,
// but the standard distributions on top of it are not portable, so we keep
// the whole chain (engine + transforms) under our control.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    // splitmix64 seeding of xoshiro256** state
    std::uint64_t z = seed;
    for (auto& s : state_) {
      z += 0x9e3779b97f4a7c15ULL;
      std::uint64_t x = z;
      x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
      x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
      s = x ^ (x >> 31);
    }
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

  // uniform in [0,1)
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform integer in [0, n)
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  // strictly positive exponential variate; building block for Dirichlet points
  double next_exponential() {
    double u;
    do {
      u = next_double();
    } while (u <= 0.0);
    return -std::log(u);
  }

  // uniform point on the probability simplex over k outcomes
  std::vector<double> next_simplex(std::size_t k) {
    std::vector<double> p(k);
    double sum = 0.0;
    for (auto& v : p) {
      v = next_exponential();
      sum += v;
    }
    for (auto& v : p) v /= sum;
    return p;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t state_[4] = {};
};

// Stream-split: derive an independent generator for a work item.
inline Rng rng_for(std::uint64_t seed, std::uint64_t stream) {
  return Rng(seed * 0x9e3779b97f4a7c15ULL + stream * 0xd1b54a32d192ed03ULL + 0x2545F4914F6CDD1DULL);
}

}  // namespace casvm
