#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "schurlab/complex_matrix.hpp"

namespace schurlab {

// Deterministic random source.  Distributions are derived from raw engine
// words by hand so that a given seed yields the same stream on every
// platform; std::normal_distribution makes no such promise.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in (0, 1]; never returns exactly 0 so logs are safe.
  double uniform01() {
    const std::uint64_t bits = engine_() >> 11;  // 53 significant bits
    return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
  }

  // Standard real normal via Box-Muller.
  double gauss() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Standard complex normal: E|z|^2 = 1.
  cplx complex_gauss() {
    const double re = gauss();
    const double im = gauss();
    return cplx(re * 0.7071067811865476, im * 0.7071067811865476);
  }

  // Stable mixing of a base seed with stream coordinates (splitmix64 rounds),
  // used to give every trial of an experiment an independent substream.
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (a + 1) + 0xbf58476d1ce4e5b9ULL * (b + 1);
    for (int i = 0; i < 2; ++i) {
      x += 0x9e3779b97f4a7c15ULL;
      x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
      x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
      x = x ^ (x >> 31);
    }
    return x;
  }

private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Square matrix of independent standard complex normals.
inline ComplexMatrix ginibre(std::size_t n, Rng& rng) {
  ComplexMatrix g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) = rng.complex_gauss();
  return g;
}

}  // namespace schurlab
