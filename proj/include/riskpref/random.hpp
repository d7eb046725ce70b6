#pragma once

#include <cstdint>
#include <random>

namespace riskpref {

using Rng = std::mt19937_64;

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Independent substream seed for (seed, stream, index). Every consumer of
// randomness derives its generator this way so results do not depend on the
// order in which rows, folds or trees are processed.
constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream,
                                       std::uint64_t index = 0) noexcept {
  return mix64(mix64(mix64(seed) ^ stream) ^ index);
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0) {
  return Rng(substream_seed(seed, stream, index));
}

// Stream tags, one per randomness consumer.
namespace streams {
inline constexpr std::uint64_t kGenerateRow = 0x67656e726f77ULL;
inline constexpr std::uint64_t kGenerateNoise = 0x67656e6e6f6973ULL;
inline constexpr std::uint64_t kMissingness = 0x6d69737373ULL;
inline constexpr std::uint64_t kSplit = 0x73706c6974ULL;
inline constexpr std::uint64_t kFolds = 0x666f6c6473ULL;
inline constexpr std::uint64_t kTree = 0x74726565ULL;
inline constexpr std::uint64_t kImpute = 0x696d70757465ULL;
inline constexpr std::uint64_t kSession = 0x73657373ULL;
}  // namespace streams

}  // namespace riskpref
