#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace netregime {

/// Philox4x32-10 counter-based block function (Salmon et al., Random123).
/// Maps a 128-bit counter and a 64-bit key to 128 pseudo-random bits.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter apply(Counter ctr, Key key) noexcept;
};

/// Derives a 64-bit key from a seed and a list of tags. Used to give each
/// (experiment, n, trial, purpose) combination its own independent stream.
std::uint64_t mix_seed(std::uint64_t seed,
                       std::initializer_list<std::uint64_t> tags) noexcept;

/// Random-access draw: the first 64 bits of Philox(key, (a, b)).
std::uint64_t bits_at(std::uint64_t key, std::uint64_t a,
                      std::uint64_t b) noexcept;

/// Uniform in [0, 1) with 53 bits of resolution.
inline double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

inline double uniform_at(std::uint64_t key, std::uint64_t a,
                         std::uint64_t b) noexcept {
  return to_unit(bits_at(key, a, b));
}

/// Sequential view over a Philox substream. Satisfies
/// UniformRandomBitGenerator, but all draws used by the library go through
/// uniform()/below() so results do not depend on the standard library's
/// distribution implementations.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t key, std::uint64_t substream = 0) noexcept
      : key_(key), substream_(substream) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept { return next(); }

  std::uint64_t next() noexcept;
  double uniform() noexcept { return to_unit(next()); }

  /// Unbiased integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t substream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

}  // namespace netregime
