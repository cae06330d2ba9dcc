#pragma once

#include <cstdint>
#include <random>

namespace tfx {

// mt19937_64 with hand-rolled value mappings. The engine's output files must be
// byte-identical across runs and toolchains, and std::uniform_*_distribution is
// implementation-defined, so the mappings live here instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, n), n >= 1. Rejection sampling keeps it exactly uniform.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = n * ((~std::uint64_t{0} / n));
    std::uint64_t v = gen_();
    while (v >= limit) v = gen_();
    return v % n;
  }

  // Uniform in [0, 1) with 53 random bits.
  double real01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double real(double lo, double hi) { return lo + (hi - lo) * real01(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace tfx
