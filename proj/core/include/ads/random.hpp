#pragma once

#include <cstdint>
#include <random>

namespace ads {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive independent child seeds so that a
// stream for (seed, key) does not depend on the order in which streams are
// created.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key) noexcept {
  return mix_seed(mix_seed(seed) ^ (key * 0xd1b54a32d192ed03ULL));
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key1,
                                    std::uint64_t key2) noexcept {
  return derive_seed(derive_seed(seed, key1), key2);
}

// Stream tags. Keeping them in one place avoids accidental stream reuse.
namespace stream {
inline constexpr std::uint64_t kGenerator = 1;
inline constexpr std::uint64_t kTestSplit = 2;
inline constexpr std::uint64_t kLhs = 3;
inline constexpr std::uint64_t kWta = 4;
inline constexpr std::uint64_t kTriplets = 5;
inline constexpr std::uint64_t kSimilarity = 6;
inline constexpr std::uint64_t kClassifier = 7;
inline constexpr std::uint64_t kRandomPick = 8;
inline constexpr std::uint64_t kAugment = 9;
}  // namespace stream

}  // namespace ads
