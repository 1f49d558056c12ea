#pragma once

#include <cstdint>
#include <string_view>

namespace cnrank::rng {

// Stateless counter-based random streams. Every draw is a pure function of
// a 64-bit key built by folding the master seed with stream components
// (split label, variable tag, row, column, draw index). Draws are
// order-independent, so sampling is deterministic under any parallel
// schedule and identical across platforms.

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

/// splitmix64 finalizer.
constexpr std::uint64_t mix(std::uint64_t z) {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// FNV-1a over the tag bytes; folds string tags into key components.
constexpr std::uint64_t hash_tag(std::string_view tag) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (const char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return h;
}

/// Key of one random stream; extend with `with` to derive sub-streams.
struct Key {
  std::uint64_t state = 0;

  constexpr explicit Key(std::uint64_t seed) : state(mix(seed)) {}

  constexpr Key with(std::uint64_t component) const {
    Key derived = *this;
    derived.state = mix(state ^ mix(component));
    return derived;
  }
  constexpr Key with(std::string_view tag) const { return with(hash_tag(tag)); }
};

/// Uniform draw in [0, 1) with 53 random mantissa bits.
inline double uniform(Key key) {
  return static_cast<double>(mix(key.state) >> 11) * 0x1.0p-53;
}

inline bool bernoulli(Key key, double p) { return uniform(key) < p; }

/// Draw in [0, bound) via multiply-shift; bound must be > 0.
inline std::uint64_t below(Key key, std::uint64_t bound) {
  const auto wide = static_cast<unsigned __int128>(mix(key.state)) * bound;
  return static_cast<std::uint64_t>(wide >> 64);
}

/// Stable per-point seed for sweeps that regenerate datasets.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view label,
                                 std::uint64_t index) {
  return Key(base).with(label).with(index).state;
}

}  // namespace cnrank::rng
