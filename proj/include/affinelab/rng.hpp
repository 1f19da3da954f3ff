#pragma once

#include <array>
#include <cstdint>
#include <random>

namespace affinelab {

/// Philox4x32-10 block function (Salmon et al., SC'11). Bijective in the
/// counter for a fixed key.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Counter-based random stream keyed by (master_seed, stream_id).
///
/// Block k of the stream is philox4x32_10({k_lo, k_hi, id_lo, id_hi},
/// {seed_lo, seed_hi}); each block yields two 64-bit outputs. The pair
/// (master_seed, stream_id) therefore fully determines the sequence, and
/// distinct stream ids address disjoint counter ranges of the same
/// permutation. Satisfies UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()();

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  double gamma(double shape, double scale);
  std::int64_t poisson(double mean);
  double exponential(double rate);

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  void refill();

  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int used_ = 2;
  std::normal_distribution<double> normal_;
  std::gamma_distribution<double> gamma_;
  std::poisson_distribution<std::int64_t> poisson_;
};

/// Stream for replicate `replicate` of a run seeded with `master_seed`.
/// The mapping is the identity on the stream id, so it is injective and
/// stable across versions; all mixing happens in the Philox bijection.
RngStream derive_stream(std::uint64_t master_seed, std::uint64_t replicate);

/// Stream ids of independent experiment arms live in disjoint ranges:
/// arm k uses ids k * 2^48 + replicate.
constexpr std::uint64_t arm_stream_id(std::uint64_t arm, std::uint64_t replicate) {
  return (arm << 48) | replicate;
}

}  // namespace affinelab
