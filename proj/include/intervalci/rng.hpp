#pragma once

// Counter-based random number generation (philox4x32-10, Salmon et al.,
// SC 2011). Each Monte Carlo replication gets its own stream keyed by
// (seed, replication index), so results are independent of scheduling
// order and worker count.

#include <array>
#include <cstdint>

#include "intervalci/normal.hpp"

namespace intervalci {

namespace detail {

struct PhiloxState {
  std::array<std::uint32_t, 4> counter;
  std::array<std::uint32_t, 2> key;
};

inline std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> x,
                                                  std::array<std::uint32_t, 2> k) {
  constexpr std::uint32_t kMulA = 0xD2511F53u;
  constexpr std::uint32_t kMulB = 0xCD9E8D57u;
  constexpr std::uint32_t kBumpA = 0x9E3779B9u;
  constexpr std::uint32_t kBumpB = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMulA) * x[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMulB) * x[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
    k[0] += kBumpA;
    k[1] += kBumpB;
  }
  return x;
}

}  // namespace detail

/// One independent stream of a counter-based generator. The 128-bit counter
/// is laid out as (block index, stream id); the key carries the seed.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  std::uint64_t next_u64() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
        static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    const auto out = detail::philox4x32_10(ctr, key_);
    ++block_;
    spare_ = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    have_spare_ = true;
    return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
  }

  /// Uniform double in the open interval (0, 1), 53-bit resolution.
  double next_uniform() {
    const std::uint64_t bits = next_u64() >> 11;
    return static_cast<double>(bits) * 0x1.0p-53 + 0x1.0p-54;
  }

  /// Standard normal draw by inversion; keeps streams aligned one draw per
  /// variate, which the paired-channel comparisons rely on.
  double next_normal() { return norm_quantile(next_uniform()); }

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::uint64_t spare_ = 0;
  bool have_spare_ = false;
};

}  // namespace intervalci
