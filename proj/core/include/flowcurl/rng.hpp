#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace flowcurl {

/// Advances a splitmix64 state and returns the next output.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Well-known stream ids. Every consumer of randomness owns its own stream.
enum class Stream : std::uint64_t {
  kInit = 1,
  kData = 2,
  kHoldout = 3,
  kTimestep = 4,
  kNoise = 5,
  kBatch = 6,
  kEvalNoise = 7,
  kEvalProjection = 8,
  kProfile = 9,
  kUser = 1000,
};

/// xoshiro256++ generator. Satisfies std::uniform_random_bit_generator.
class Rng {
 public:
  using result_type = std::uint64_t;

  /// State words are successive splitmix64 outputs starting from seed ^ stream.
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;
  Rng(std::uint64_t seed, Stream stream) noexcept
      : Rng(seed, static_cast<std::uint64_t>(stream)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return next(); }
  result_type next() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1].
  double uniform_open_zero() noexcept { return 1.0 - uniform(); }
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept;
  /// Standard normal via Box-Muller (one variate per call, no cached spare).
  double normal() noexcept;
  /// Gamma(shape, 1) by Marsaglia-Tsang, with the u^(1/shape) boost for shape < 1.
  double gamma(double shape) noexcept;

  const std::array<std::uint64_t, 4>& state() const noexcept { return s_; }
  friend bool operator==(const Rng&, const Rng&) = default;

 private:
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace flowcurl
