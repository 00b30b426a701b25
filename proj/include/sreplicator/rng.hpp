#pragma once

// Counter-based normal variates. Every draw is a pure function of
// (seed, step, coordinate), so a run is reproducible regardless of how
// batches are scheduled across threads.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>

namespace sreplicator::rng {

/// Philox4x32-10 block cipher (Salmon et al., SC'11).
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

/// SplitMix64 finalizer; used to derive per-run seeds from a base seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed_base, std::uint64_t run_index) {
  return splitmix64(seed_base + run_index);
}

// 53-bit uniform in (0, 1].
inline double to_unit_open_closed(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

/// Source of standard normals addressed by (step, coordinate).
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  /// Writes normals for coordinates [0, n) of the given step into out.
  template <typename Out>
  void fill(std::uint64_t step, std::size_t n, Out& out) const {
    for (std::size_t pair = 0; 2 * pair < n; ++pair) {
      const auto z = pair_at(step, static_cast<std::uint32_t>(pair));
      out[2 * pair] = z[0];
      if (2 * pair + 1 < n) out[2 * pair + 1] = z[1];
    }
  }

  double at(std::uint64_t step, std::size_t coordinate) const {
    return pair_at(step, static_cast<std::uint32_t>(coordinate / 2))[coordinate % 2];
  }

 private:
  // Box-Muller on one Philox block keyed by (step, pair index).
  std::array<double, 2> pair_at(std::uint64_t step, std::uint32_t pair) const {
    const auto r = philox4x32({static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32), pair, 0u},
                              key_);
    const std::uint64_t a = (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
    const std::uint64_t b = (static_cast<std::uint64_t>(r[2]) << 32) | r[3];
    const double u1 = to_unit_open_closed(a);
    const double u2 = to_unit_open_closed(b);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
  }

  std::array<std::uint32_t, 2> key_;
};

}  // namespace sreplicator::rng
