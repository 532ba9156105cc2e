#include "rascap/random.hpp"

#include <numbers>

namespace rascap {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

void Philox4x32::refill() {
  std::array<std::uint32_t, 4> c = {
      static_cast<std::uint32_t>(counter_),
      static_cast<std::uint32_t>(counter_ >> 32),
      static_cast<std::uint32_t>(substream_),
      static_cast<std::uint32_t>(substream_ >> 32)};
  std::uint32_t k0 = key_[0];
  std::uint32_t k1 = key_[1];
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, c[0], hi0, lo0);
    mulhilo(kM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
    k0 += kW0;
    k1 += kW1;
  }
  block_ = c;
  ++counter_;
}

double Philox4x32::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  const double theta = 2.0 * std::numbers::pi * uniform();
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

double Philox4x32::gamma_integer(int shape) {
  // -log of a product of uniforms, in chunks of 16 so the product never
  // underflows (each factor is at least 2^-54).
  double sum = 0.0;
  while (shape > 0) {
    const int chunk = shape < 16 ? shape : 16;
    double prod = 1.0;
    for (int i = 0; i < chunk; ++i) prod *= uniform();
    sum -= std::log(prod);
    shape -= chunk;
  }
  return sum;
}

}  // namespace rascap
