#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>

namespace transitepi {

/// Philox4x32-10 block function (Salmon et al., Random123). Maps a 128-bit
/// counter and a 64-bit key to 128 pseudo-random bits.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

/// Stream purposes. Every consumer of randomness owns one tag so that
/// streams never alias across subsystems.
enum class stream_tag : std::uint32_t {
  infection = 1,
  attribution = 2,
  seeding = 3,
  calibration_index = 4,
  calibration_infection = 5,
  rider_permutation = 6,
  eligibility = 7,
  synthetic_population = 8,
  synthetic_feed = 9,
  percolation = 10,
  fuzz = 11
};

/// Counter-based random stream addressed by (seed, id, day, tag, aux).
///
/// Two streams with the same address produce the same sequence regardless
/// of when or on which thread they are created. Satisfies
/// std::uniform_random_bit_generator.
class counter_stream {
public:
  using result_type = std::uint64_t;

  counter_stream(std::uint64_t seed, std::uint32_t id, std::uint32_t day,
                 stream_tag tag, std::uint32_t aux = 0);

  result_type operator()();

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  /// Uniform double in [0, 1) with 53 bits of resolution.
  double uniform();

  /// Uniform integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n);

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal deviate (Box-Muller, one value per call).
  double normal();

private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> ctr_;
  std::array<std::uint32_t, 4> block_{};
  int pos_{4};
};

/// SplitMix64 finalizer; used to derive child seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

/// Fisher-Yates shuffle driven by a counter stream (portable across standard
/// libraries, unlike std::shuffle).
template <typename T>
void shuffle(std::span<T> values, counter_stream& rng) {
  for (auto i = values.size(); i > 1; --i) {
    auto const j = static_cast<std::size_t>(rng.below(i));
    using std::swap;
    swap(values[i - 1], values[j]);
  }
}

}  // namespace transitepi
