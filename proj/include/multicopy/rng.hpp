// Counter-based random streams for reproducible parallel sampling.
//
// Every (stream tag, N, repetition) triple owns an independent Philox4x32-10
// stream, so results never depend on which worker evaluated which shot.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

namespace multicopy::rng {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key);

/// splitmix64 finalizer; used to mix seed material.
std::uint64_t mix64(std::uint64_t x);

/// 64-bit FNV-1a of a string.
std::uint64_t fnv1a64(std::string_view s);

/// A standard-normal stream. Counter words 2 and 3 carry the stream id;
/// words 0 and 1 count 128-bit blocks. Each block yields two uniforms and
/// hence two normals via Box-Muller.
class NormalStream {
 public:
  NormalStream(PhiloxKey key, std::uint32_t id_hi, std::uint32_t id_lo);

  double next_uniform();  // in (0, 1)
  double next_normal();

  /// Fills `out` with N(0, sigma^2) draws; all zeros without consuming the
  /// stream when sigma == 0.
  void fill_normal(std::span<double> out, double sigma);

  bool operator==(const NormalStream&) const = default;

 private:
  void refill();

  PhiloxKey key_;
  std::uint32_t id_hi_;
  std::uint32_t id_lo_;
  std::uint64_t block_ = 0;
  std::array<double, 2> uniforms_{};
  int uniform_pos_ = 2;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// Deterministic stream for (master_seed, tag, n, rep).
NormalStream seed_for(std::uint64_t master_seed, std::string_view stream_tag, int n, int rep);

}  // namespace multicopy::rng
