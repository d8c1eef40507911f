#include "ambit/rng.hpp"

#include <cmath>

namespace ambit::rng {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;  // golden ratio
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;  // sqrt(3)-1

inline void round_once(std::array<std::uint32_t, 4>& x, std::uint32_t k0,
                       std::uint32_t k1) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * x[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * x[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  x = {hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::uint64_t key_lo,
                                        std::uint64_t key_hi,
                                        std::uint64_t ctr_lo,
                                        std::uint64_t ctr_hi) {
  std::array<std::uint32_t, 4> x = {
      static_cast<std::uint32_t>(ctr_lo), static_cast<std::uint32_t>(ctr_lo >> 32),
      static_cast<std::uint32_t>(ctr_hi), static_cast<std::uint32_t>(ctr_hi >> 32)};
  std::uint32_t k0 = static_cast<std::uint32_t>(key_lo);
  std::uint32_t k1 = static_cast<std::uint32_t>(key_lo >> 32);
  // key_hi is folded into the key schedule start so (seed, stream) pairs get
  // distinct keys.
  k0 ^= static_cast<std::uint32_t>(key_hi);
  k1 ^= static_cast<std::uint32_t>(key_hi >> 32);
  for (int r = 0; r < 10; ++r) {
    round_once(x, k0, k1);
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return x;
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  const auto b = philox4x32(root, 0x5EED5EED5EED5EEDULL, index, 0);
  return (static_cast<std::uint64_t>(b[0]) << 32) | b[1];
}

void CounterStream::refill() {
  block_ = philox4x32(seed_, stream_, counter_++, stream_);
  avail_ = 4;
}

std::uint32_t CounterStream::next_u32() {
  if (avail_ == 0) refill();
  return block_[4 - (avail_--)];
}

std::uint64_t CounterStream::next_u64() {
  const std::uint64_t hi = next_u32();
  const std::uint64_t lo = next_u32();
  return (hi << 32) | lo;
}

double CounterStream::uniform() {
  // 53 random bits into (0,1).
  const std::uint64_t bits = next_u64() >> 11;
  double u = (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  return u;
}

double CounterStream::normal() {
  if (have_spare_normal_) {
    have_spare_normal_ = false;
    return spare_normal_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 6.283185307179586476925286766559 * u2;
  spare_normal_ = r * std::sin(a);
  have_spare_normal_ = true;
  return r * std::cos(a);
}

std::uint64_t CounterStream::poisson(double mean) {
  if (mean <= 0.0) return 0;
  const double limit = std::exp(-mean);
  std::uint64_t n = 0;
  double prod = uniform();
  while (prod > limit) {
    ++n;
    prod *= uniform();
  }
  return n;
}

double CounterStream::exponential(double rate) {
  return -std::log(uniform()) / rate;
}

}  // namespace ambit::rng
