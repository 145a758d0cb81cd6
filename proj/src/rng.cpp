#include "multicopy/rng.hpp"

#include <cmath>
#include <numbers>

namespace multicopy::rng {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(p);
  hi = static_cast<std::uint32_t>(p >> 32);
}

// 53 random bits mapped to the open interval (0, 1).
inline double to_open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter c, PhiloxKey k) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    std::uint32_t lo0, hi0, lo1, hi1;
    mulhilo(kMul0, c[0], lo0, hi0);
    mulhilo(kMul1, c[2], lo1, hi1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

NormalStream::NormalStream(PhiloxKey key, std::uint32_t id_hi, std::uint32_t id_lo)
    : key_(key), id_hi_(id_hi), id_lo_(id_lo) {}

void NormalStream::refill() {
  const PhiloxCounter ctr{static_cast<std::uint32_t>(block_),
                          static_cast<std::uint32_t>(block_ >> 32), id_lo_, id_hi_};
  const PhiloxCounter out = philox4x32_10(ctr, key_);
  ++block_;
  uniforms_[0] = to_open_unit((static_cast<std::uint64_t>(out[0]) << 32) | out[1]);
  uniforms_[1] = to_open_unit((static_cast<std::uint64_t>(out[2]) << 32) | out[3]);
  uniform_pos_ = 0;
}

double NormalStream::next_uniform() {
  if (uniform_pos_ >= 2) refill();
  return uniforms_[uniform_pos_++];
}

double NormalStream::next_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_normal_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

void NormalStream::fill_normal(std::span<double> out, double sigma) {
  if (sigma == 0.0) {
    for (double& v : out) v = 0.0;
    return;
  }
  for (double& v : out) v = sigma * next_normal();
}

NormalStream seed_for(std::uint64_t master_seed, std::string_view stream_tag, int n, int rep) {
  const std::uint64_t k = mix64(mix64(master_seed) ^ fnv1a64(stream_tag));
  const PhiloxKey key{static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  return NormalStream(key, static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(rep));
}

}  // namespace multicopy::rng
