#pragma once

// Reproducible random instances.  The stream is SplitMix64; uniform reals use
// the top 53 bits, a + (b - a) * (x >> 11) * 2^-53.

#include <cstdint>

#include "ntan/connection.hpp"
#include "ntan/covariant.hpp"
#include "ntan/polynomial.hpp"

namespace ntan {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  double uniform(double a, double b);
  // Independent stream for sample `index`, so that the order in which workers
  // pick up samples cannot change the draws.
  static SplitMix64 stream(std::uint64_t seed, std::uint64_t index);

 private:
  std::uint64_t state_;
};

// Coefficients uniform in [-amplitude, amplitude].
Polynomial random_polynomial(SplitMix64& rng, int degree, double amplitude = 1.0);

// Polynomial curve of the given degree in every component on [-1, 1].
CurveSpec random_curve(SplitMix64& rng, int m, int degree);

// Christoffel symbols are polynomials of total degree <= `degree` in x1..xm
// with coefficients in [-amplitude, amplitude].  Torsion-free draws fill
// mu <= nu and mirror.
Connection random_connection(SplitMix64& rng, int m, bool torsion_free, int degree = 2,
                             double amplitude = 0.5);

}  // namespace ntan
