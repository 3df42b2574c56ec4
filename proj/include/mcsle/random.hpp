#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace mcsle {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Stateless:
/// output is a pure function of (key, counter), so any stream position can be
/// computed independently by any thread.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit constexpr Philox4x32(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  constexpr Counter operator()(Counter ctr) const {
    Key k = key_;
    for (int round = 0; round < 10; ++round) {
      ctr = single_round(ctr, k);
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static constexpr Counter single_round(const Counter& c, const Key& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }

  Key key_;
};

/// Uniform in (0, 1) with 53 random bits; never returns 0.
inline double to_unit_open(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 21) ^ (lo >> 11);
  return (static_cast<double>(bits & ((1ull << 53) - 1)) + 0.5) * 0x1.0p-53;
}

/// Normal deviates addressed by (stream, index). A stream is a path or a block
/// of Monte-Carlo samples; each index yields a fresh vector of standard normals.
class NormalStream {
 public:
  constexpr NormalStream(std::uint64_t seed, std::uint64_t stream)
      : gen_(seed), stream_(stream) {}

  /// Fill `out` with independent standard normals for draw `index`.
  void fill(std::uint64_t index, std::span<double> out) const {
    const std::size_t blocks = (out.size() + 1) / 2;
    for (std::size_t b = 0; b < blocks; ++b) {
      const Philox4x32::Counter ctr{static_cast<std::uint32_t>(b),
                                    static_cast<std::uint32_t>(stream_),
                                    static_cast<std::uint32_t>(index),
                                    static_cast<std::uint32_t>(index >> 32) ^
                                        (static_cast<std::uint32_t>(stream_ >> 32) << 16)};
      const auto r = gen_(ctr);
      const double u1 = to_unit_open(r[0], r[1]);
      const double u2 = to_unit_open(r[2], r[3]);
      const double rad = std::sqrt(-2.0 * std::log(u1));
      const double ang = 2.0 * std::numbers::pi * u2;
      out[2 * b] = rad * std::cos(ang);
      if (2 * b + 1 < out.size()) out[2 * b + 1] = rad * std::sin(ang);
    }
  }

  /// One uniform in (0, 1) for draw `index` (uses block 0xFFFF to stay disjoint from fill()).
  double uniform(std::uint64_t index) const {
    const Philox4x32::Counter ctr{0xFFFFu, static_cast<std::uint32_t>(stream_),
                                  static_cast<std::uint32_t>(index),
                                  static_cast<std::uint32_t>(index >> 32) ^
                                      (static_cast<std::uint32_t>(stream_ >> 32) << 16)};
    const auto r = gen_(ctr);
    return to_unit_open(r[0], r[1]);
  }

 private:
  Philox4x32 gen_;
  std::uint64_t stream_;
};

/// SplitMix64 finalizer; used to derive independent seeds from a base seed and a tag.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (tag + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace mcsle
