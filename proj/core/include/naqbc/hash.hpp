#pragma once

#include <cstdint>
#include <string_view>

namespace naqbc {

// splitmix64 finalizer (Vigna). sm64(0) == 0xe220a8397b1dcdaf, the first
// output of a splitmix64 stream seeded with 0.
inline std::uint64_t sm64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic combiner used for every derived seed in the project
// (committee members, per-step streams, test sets). Not cryptographic.
inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  return sm64(a ^ (sm64(b) + 0x9e3779b97f4a7c15ULL));
}

// FNV-1a 64-bit, used for string keys and artifact checksums.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Fixed stream tags so independent random streams derived from one trial
// seed never collide.
namespace seed_tag {
inline constexpr std::uint64_t kInitialSet = 0x01;
inline constexpr std::uint64_t kTrain = 0x02;
inline constexpr std::uint64_t kPool = 0x03;
inline constexpr std::uint64_t kSynthesis = 0x04;
inline constexpr std::uint64_t kBald = 0x05;
inline constexpr std::uint64_t kRandomAcquire = 0x06;
inline constexpr std::uint64_t kTestSet = 0x07;
inline constexpr std::uint64_t kBaldTrain = 0x08;
}  // namespace seed_tag

}  // namespace naqbc
