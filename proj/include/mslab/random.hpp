#pragma once

// Seed derivation and random streams.
//
// Every random quantity in the library comes from a RandomStream, which wraps
// std::mt19937_64 (fully specified by the standard, so sequences are portable
// across standard libraries). Uniform and normal variates are produced by
// explicit transforms rather than the implementation-defined
// std::*_distribution classes:
//   uniform01  : top 53 bits of one engine output, scaled by 2^-53 -> [0, 1)
//   index(n)   : unbiased rejection sampling on one engine output
//   normal     : Box-Muller on two uniforms, second variate cached
// Seeds are split with splitmix64 so that independent sub-streams can be
// derived from one master seed.

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string_view>

namespace mslab {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Stable seed-splitting rule: child = splitmix64(parent ^ splitmix64(tag)).
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag) noexcept
{
  return splitmix64(parent ^ splitmix64(tag));
}

/// FNV-1a over a string, used to turn readable tags into seed tags.
constexpr std::uint64_t tag_of(std::string_view name) noexcept
{
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// FNV-1a over the bit patterns of a block of doubles.
inline std::uint64_t checksum(std::span<const double> values) noexcept
{
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (double v : values) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xFFU;
      h *= 0x100000001B3ULL;
    }
  }
  return h;
}

class RandomStream
{
public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo, hi]; returns lo exactly when lo == hi.
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer on [0, n).
  std::size_t index(std::size_t n)
  {
    const std::uint64_t range = n;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t r = engine_();
    while (r >= limit)
      r = engine_();
    return static_cast<std::size_t>(r % range);
  }

  double normal()
  {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

} // namespace mslab
