#include "transitepi/rng.h"

#include <cmath>
#include <numbers>

namespace transitepi {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53U;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57U;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9U;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85U;

inline std::pair<std::uint32_t, std::uint32_t> mulhilo(std::uint32_t a,
                                                       std::uint32_t b) {
  auto const p = static_cast<std::uint64_t>(a) * b;
  return {static_cast<std::uint32_t>(p >> 32U), static_cast<std::uint32_t>(p)};
}

inline std::array<std::uint32_t, 4> philox_round(
    std::array<std::uint32_t, 4> const& c,
    std::array<std::uint32_t, 2> const& k) {
  auto const [hi0, lo0] = mulhilo(kPhiloxM0, c[0]);
  auto const [hi1, lo1] = mulhilo(kPhiloxM1, c[2]);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  ctr = philox_round(ctr, key);
  for (int r = 1; r < 10; ++r) {
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
    ctr = philox_round(ctr, key);
  }
  return ctr;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  auto z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1U);
  z = (z ^ (z >> 30U)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27U)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31U);
}

counter_stream::counter_stream(std::uint64_t seed, std::uint32_t id,
                               std::uint32_t day, stream_tag tag,
                               std::uint32_t aux)
    : key_{static_cast<std::uint32_t>(seed),
           static_cast<std::uint32_t>(seed >> 32U)},
      ctr_{id, day,
           (static_cast<std::uint32_t>(tag) << 24U) | (aux & 0x00FFFFFFU),
           aux >> 24U << 24U} {}

void counter_stream::refill() {
  block_ = philox4x32(ctr_, key_);
  ++ctr_[3];
  pos_ = 0;
}

counter_stream::result_type counter_stream::operator()() {
  if (pos_ > 2) {
    refill();
  }
  auto const hi = static_cast<std::uint64_t>(block_[pos_]);
  auto const lo = static_cast<std::uint64_t>(block_[pos_ + 1]);
  pos_ += 2;
  return (hi << 32U) | lo;
}

double counter_stream::uniform() {
  return static_cast<double>((*this)() >> 11U) * 0x1.0p-53;
}

std::uint64_t counter_stream::below(std::uint64_t n) {
  // Lemire's nearly divisionless bounded draw.
  auto x = (*this)();
  auto m = static_cast<unsigned __int128>(x) * n;
  auto l = static_cast<std::uint64_t>(m);
  if (l < n) {
    auto const t = (0 - n) % n;
    while (l < t) {
      x = (*this)();
      m = static_cast<unsigned __int128>(x) * n;
      l = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64U);
}

double counter_stream::normal() {
  auto u1 = uniform();
  while (u1 <= 0.0) {
    u1 = uniform();
  }
  auto const u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace transitepi
