#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace edrdim {

using Engine = std::mt19937_64;

/// Independent engine for the stream identified by (seed, keys...).
/// Identical keys always give the identical stream, whichever thread asks.
inline Engine substream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  std::seed_seq::result_type words[2 + 2 * 6] = {};
  std::size_t count = 0;
  words[count++] = static_cast<std::uint32_t>(seed);
  words[count++] = static_cast<std::uint32_t>(seed >> 32);
  for (auto k : keys) {
    if (count + 2 > std::size(words)) break;
    words[count++] = static_cast<std::uint32_t>(k);
    words[count++] = static_cast<std::uint32_t>(k >> 32);
  }
  std::seed_seq seq(words, words + count);
  return Engine(seq);
}

}  // namespace edrdim
