#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

#include "starisac/types.hpp"

namespace starisac {

namespace detail {

// splitmix64 finalizer; full-avalanche 64-bit mix.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

// Counter-based generator: every variate is a pure function of
// (seed, stream, counter). Draw i of one stream never depends on how many
// draws other streams made, so adding users/links does not perturb
// earlier draws and replays are bitwise identical.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(detail::mix64(detail::mix64(seed) ^ detail::mix64(stream * 0xda942042e4dd58b5ULL + 1))) {}

  // Derive a child stream id; use to key per-user / per-link substreams.
  static std::uint64_t substream(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0) {
    return detail::mix64(detail::mix64(a) ^ detail::mix64(b + 0x632be59bd9b4e019ULL) ^
                         detail::mix64(c + 0x8ebc6af09c88c6e3ULL));
  }

  std::uint64_t bits(std::uint64_t i) const { return detail::mix64(key_ ^ (i + 0x2545f4914f6cdd1dULL)); }

  // Uniform on [0,1) with 53-bit resolution.
  double uniform(std::uint64_t i) const {
    return static_cast<double>(bits(i) >> 11) * 0x1.0p-53;
  }

  // Uniform on (0,1]; safe as a log() argument.
  double uniform_pos(std::uint64_t i) const {
    return (static_cast<double>(bits(i) >> 11) + 1.0) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; draw i consumes counters (2i, 2i+1).
  double normal(std::uint64_t i) const {
    double u1 = uniform_pos(2 * i);
    double u2 = uniform(2 * i + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  // Circularly symmetric complex normal, total variance 1
  // (real and imaginary parts each N(0, 1/2)).
  cxd cnormal(std::uint64_t i) const {
    double u1 = uniform_pos(2 * i);
    double u2 = uniform(2 * i + 1);
    double r = std::sqrt(-std::log(u1));
    return cxd(r * std::cos(2.0 * kPi * u2), r * std::sin(2.0 * kPi * u2));
  }

 private:
  std::uint64_t key_;
};

// Stream ids for the independent random sources of one experiment.
namespace stream {
inline constexpr std::uint64_t kH1Nlos = 1;
inline constexpr std::uint64_t kH2InNlos = 2;
inline constexpr std::uint64_t kH2OutNlos = 3;
inline constexpr std::uint64_t kPlacement = 4;
inline constexpr std::uint64_t kEstimate = 5;
inline constexpr std::uint64_t kExpectation = 6;
inline constexpr std::uint64_t kRandomization = 7;
inline constexpr std::uint64_t kEvaluation = 8;
}  // namespace stream

}  // namespace starisac
