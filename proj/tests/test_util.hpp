#ifndef CDMR_TEST_UTIL_HPP
#define CDMR_TEST_UTIL_HPP

#include <cstdint>

namespace cdmr_test {

// Deterministic cross-platform PRNG for property tests (splitmix64).
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform(double lo, double hi) {
    const double u = double(next_u64() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  }

  int uniform_int(int lo, int hi) {  // inclusive
    return lo + int(next_u64() % uint64_t(hi - lo + 1));
  }

 private:
  uint64_t state_;
};

}  // namespace cdmr_test

#endif  // CDMR_TEST_UTIL_HPP
