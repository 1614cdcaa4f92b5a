#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace raddich {

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based stream: the i-th draw of sample `index` in stream `stream`
/// is a pure function of (seed, stream, index, i). Samples can therefore be
/// evaluated in any order, on any thread, and a run with more samples extends
/// a run with fewer.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index)
      : key_(mix64(mix64(mix64(seed) ^ stream) ^ index)) {}

  std::uint64_t next_u64() noexcept { return mix64(key_ ^ mix64(counter_++)); }

  /// Uniform in [0, 1).
  double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform();
  }
  double log_uniform(double lo, double hi) noexcept {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
  std::size_t index_below(std::size_t n) noexcept {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
  }
  double normal() noexcept {
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }
  std::complex<double> complex_normal() noexcept {
    return {normal() * std::numbers::sqrt2 / 2, normal() * std::numbers::sqrt2 / 2};
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace raddich
