#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "labs/types.hpp"

namespace lbs {

typedef std::mt19937_64 Rng;

/// Independent engine for stream `stream` of `seed`; stream 0 is the data
/// generator, stream 1 the chain.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

/// Uniform on the open interval (0, 1).
inline Scalar uniform_open(Rng& rng) {
  for (;;) {
    const Scalar u = std::generate_canonical<Scalar, 53>(rng);
    if (u > 0.0) return u;
  }
}

/// Uniform strictly inside (lo, hi); returns lo when the interval is empty.
inline Scalar uniform(Rng& rng, Scalar lo, Scalar hi) {
  for (;;) {
    const Scalar v = lo + (hi - lo) * uniform_open(rng);
    if (v > lo && v < hi) return v;
    if (!(hi > lo)) return lo;
  }
}

inline Scalar normal(Rng& rng, Scalar mean, Scalar sd) {
  return std::normal_distribution<Scalar>(mean, sd)(rng);
}

/// Gamma with shape `a` and rate `b` (mean a/b).
inline Scalar gamma_rate(Rng& rng, Scalar shape, Scalar rate) {
  return std::gamma_distribution<Scalar>(shape, 1.0 / rate)(rng);
}

/// Inverse gamma IG(shape, scale): density ∝ x^{-shape-1} exp(-scale/x).
/// Small shapes can underflow the underlying gamma draw to zero, so the
/// draw is repeated until the result is a finite positive number.
inline Scalar inverse_gamma(Rng& rng, Scalar shape, Scalar scale) {
  for (;;) {
    const Scalar g = gamma_rate(rng, shape, scale);
    if (g > 0.0) {
      const Scalar v = 1.0 / g;
      if (std::isfinite(v)) return v;
    }
  }
}

inline int poisson(Rng& rng, Scalar mean) { return std::poisson_distribution<int>(mean)(rng); }

}  // namespace lbs
