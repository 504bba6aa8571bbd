#pragma once

#include <cstdint>
#include <vector>

#include "cfkit/errors.hpp"

namespace cfkit {

// splitmix64 constants (Steele, Lea, Flood 2014). The generator is pinned
// bit-for-bit by docs/prng.md; reruns of a config must reproduce byte-equal
// datasets, so this must never change behind the same generator version.
inline constexpr std::uint64_t kSplitMixGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

// Child stream i of a master seed. Independent enough for dataset use: records
// can be regenerated in any order or in parallel without coordination.
constexpr std::uint64_t record_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(master + (index + 1) * kSplitMixGamma);
}

// Named substream of a seed ("assemble", "gsm", ...). Hash is FNV-1a over the
// salt bytes folded into the seed, then finalized.
constexpr std::uint64_t salted_seed(std::uint64_t seed, const char* salt) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const char* p = salt; *p; ++p) {
    h ^= static_cast<unsigned char>(*p);
    h *= 0x100000001B3ULL;
  }
  return mix64(seed ^ h);
}

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next() {
    state_ += kSplitMixGamma;
    return mix64(state_);
  }

  // Uniform-ish draw in [0, n). Modulo reduction; the bias at n << 2^64 is
  // far below anything observable here and keeps the stream spec one line.
  constexpr std::uint64_t bounded(std::uint64_t n) {
    if (n == 0) throw Error("bounded(0)");
    return next() % n;
  }

  // Inclusive integer range.
  constexpr std::int64_t range(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw Error("range with lo > hi");
    return lo + static_cast<std::int64_t>(bounded(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  // True with probability num/den.
  constexpr bool chance(std::uint64_t num, std::uint64_t den) {
    return bounded(den) < num;
  }

  template <typename T>
  const T& pick(const std::vector<T>& options) {
    if (options.empty()) throw Error("pick from empty list");
    return options[bounded(options.size())];
  }

  // Fisher-Yates, consumes exactly size()-1 draws.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = bounded(i);
      std::swap(items[i - 1], items[j]);
    }
  }

  constexpr std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

}  // namespace cfkit
