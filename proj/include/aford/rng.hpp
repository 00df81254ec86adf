#pragma once

#include <cstdint>
#include <random>

namespace aford {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seeded random stream. Stream `r` of seed `s` is a deterministic function
/// of (s, r) alone, so replicate r draws the same numbers no matter which
/// thread runs it or in what order.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform integer in [0, n).
  std::size_t uniform_index(std::size_t n);
  /// Uniform real in [0, 1).
  double uniform01();
  double exponential(double rate);

  /// A child stream, independent of this one.
  Rng split(std::uint64_t stream) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

}  // namespace aford
