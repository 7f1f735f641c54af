#pragma once

#include <cstdint>

namespace naqbc {

// PCG32 (Melissa O'Neill, pcg-random.org, Apache-2.0 reference algorithm).
// Chosen because it is seedable from 64 bits, fast, and has a published
// reference sequence: Rng(42, 54) must produce
//   0xa15c02b7 0x7b47f409 0xba1d3330 0x83d2f293 0xbfa4784b 0xcbed606e ...
// which the unit tests pin, guaranteeing identical streams on every
// platform and run.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : Rng(seed, kDefaultStream) {}

  Rng(std::uint64_t seed, std::uint64_t stream) : state_(0), inc_((stream << 1) | 1u) {
    next_u32();
    state_ += seed;
    next_u32();
  }

  std::uint32_t next_u32() {
    const std::uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    const auto xorshifted = static_cast<std::uint32_t>(((old >> 18) ^ old) >> 27);
    const auto rot = static_cast<std::uint32_t>(old >> 59);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
  }

  // High word drawn first.
  std::uint64_t next_u64() {
    const std::uint64_t hi = next_u32();
    const std::uint64_t lo = next_u32();
    return (hi << 32) | lo;
  }

  // 53-bit uniform double in [0, 1); two draws, high 27 bits first.
  double next_double() {
    const std::uint32_t a = next_u32() >> 5;
    const std::uint32_t b = next_u32() >> 6;
    return (a * 67108864.0 + b) * (1.0 / 9007199254740992.0);
  }

  double uniform(double lo, double hi) { return lo + next_double() * (hi - lo); }

  // Uniform integer in [0, n). Lemire multiply-shift; deterministic.
  std::uint32_t next_below(std::uint32_t n) {
    return static_cast<std::uint32_t>((static_cast<std::uint64_t>(next_u32()) * n) >> 32);
  }

  template <typename Vec>
  void shuffle(Vec& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = next_below(static_cast<std::uint32_t>(i));
      using std::swap;
      swap(v[i - 1], v[j]);
    }
  }

 private:
  static constexpr std::uint64_t kDefaultStream = 54;
  std::uint64_t state_;
  std::uint64_t inc_;
};

}  // namespace naqbc
