#pragma once

#include "cpv/rational.hpp"

#include <cmath>
#include <cstdint>

namespace cpv {

// Counter-based generator: output i of stream (seed, stream) is a pure
// function of (seed, stream, i). Parallel workers drawing distinct streams
// therefore reproduce a serial run exactly, whatever the scheduling.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix(mix(seed + 0x9e3779b97f4a7c15ull) ^ mix(stream * 0xbf58476d1ce4e5b9ull))) {}

  std::uint64_t next_u64() {
    return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ull);
  }

  // Uniform in [0, n), n >= 1.
  std::uint64_t next_below(std::uint64_t n) {
    // 128-bit multiply keeps the mapping unbiased enough for n << 2^64.
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on the grid {lo + k*(hi-lo)/grid : k in [0, grid]}.
  Rat uniform_rat(const Rat& lo, const Rat& hi, std::uint64_t grid) {
    std::uint64_t k = next_below(grid + 1);
    return lo + (hi - lo) * Rat(k, grid);
  }

  // Box-Muller, quantized to a 1e-6 grid so downstream arithmetic keeps
  // small denominators.
  Rat gaussian_rat(double sigma) {
    double u1 = next_unit();
    double u2 = next_unit();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    double g = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2) * sigma;
    long long q = std::llround(g * 1e6);
    return Rat(q, 1000000);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace cpv
