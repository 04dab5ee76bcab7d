#pragma once

// Counter-based SplitMix64 streams keyed by (master seed, replica, purpose).
//
// The i-th output of a stream is mix64(key + (i + 1) * golden_gamma), so any
// (seed, replica, purpose) triple yields the same sequence on every run and
// every thread. Uniform and exponential variates are derived by hand rather
// than through <random> distributions, whose algorithms vary between
// standard libraries.

#include <cstdint>
#include <limits>

namespace crystal {

enum class StreamPurpose : std::uint64_t {
  initial_state = 1,
  dynamics = 2,
  test = 3,
};

std::uint64_t mix64(std::uint64_t z);

class Rng {
public:
  using result_type = std::uint64_t;

  Rng(std::uint64_t seed, std::uint64_t replica, StreamPurpose purpose);
  explicit Rng(std::uint64_t key) : state_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Exponential with the given rate (> 0).
  double exponential(double rate);

private:
  std::uint64_t state_;
};

}  // namespace crystal
