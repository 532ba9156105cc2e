#pragma once

// Counter-based random streams. A stream is identified by (seed, substream);
// the i-th 128-bit block of a stream is Philox4x32-10 applied to the counter
// (i, substream) under the key derived from seed. Any trial can therefore
// regenerate its draws without touching shared state, which is what makes
// Monte-Carlo results independent of the worker count.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace rascap {

class Philox4x32 {
public:
  using result_type = std::uint32_t;

  Philox4x32(std::uint64_t seed, std::uint64_t substream)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        substream_(substream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    if (index_ == 4) {
      refill();
      index_ = 0;
    }
    return block_[index_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = (*this)();
    return (hi << 32) | (*this)();
  }

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double exponential() { return -std::log(uniform()); }

  /// Standard normal by the Box-Muller transform; the second value of each
  /// pair is cached.
  double normal();

  /// Gamma(shape, 1) for integer shape as a sum of unit exponentials.
  double gamma_integer(int shape);

  std::uint64_t substream() const { return substream_; }

private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t substream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int index_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace rascap
