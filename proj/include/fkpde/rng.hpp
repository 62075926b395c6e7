#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace fkpde {

/// Identifies one independent random stream. Every Monte-Carlo sample in the
/// library is keyed by such a tuple, so results do not depend on scheduling.
struct StreamId {
  std::uint64_t seed = 0;
  std::uint64_t run = 0;        // driver-level tag (solver run, purpose)
  std::uint64_t iteration = 0;  // outer iteration k
  std::uint64_t point = 0;      // node fingerprint or point index
  std::uint64_t sample = 0;     // sample index m
};

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
      key[0] += kW0;
      key[1] += kW1;
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;
};

inline std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Standard normal variates from a Philox stream (Box-Muller, two per block).
class GaussianStream {
 public:
  explicit GaussianStream(const StreamId& id) noexcept {
    std::uint64_t h = splitmix64(id.seed);
    h = splitmix64(h ^ id.run);
    h = splitmix64(h ^ id.iteration);
    h = splitmix64(h ^ id.point);
    key_ = {static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
    sample_lo_ = static_cast<std::uint32_t>(id.sample);
    sample_hi_ = static_cast<std::uint32_t>(id.sample >> 32);
  }

  double next() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const auto r = Philox4x32::generate({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                                         sample_lo_, sample_hi_},
                                        key_);
    ++block_;
    // 53-bit uniforms; u1 in (0, 1] keeps the logarithm finite.
    const double u1 = 1.0 - to_unit(r[0], r[1]);
    const double u2 = to_unit(r[2], r[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Uniform in [0, 1), consuming a fresh block.
  double uniform() noexcept {
    const auto r = Philox4x32::generate({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                                         sample_lo_, sample_hi_},
                                        key_);
    ++block_;
    return to_unit(r[0], r[1]);
  }

 private:
  static double to_unit(std::uint32_t a, std::uint32_t b) noexcept {
    return (static_cast<double>(a >> 5) * 67108864.0 + static_cast<double>(b >> 6)) * (1.0 / 9007199254740992.0);
  }

  Philox4x32::Key key_{};
  std::uint32_t sample_lo_ = 0;
  std::uint32_t sample_hi_ = 0;
  std::uint64_t block_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace fkpde
