#pragma once

#include <cmath>
#include <cstdint>

namespace vp {

/// splitmix64. Used everywhere randomness is needed: the stream is stable
/// across platforms and standard library versions, which the determinism
/// guarantees (bitwise-identical vectors, byte-identical reports) rely on.
/// std::<random> distributions are implementation-defined and unusable here.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1]; safe as a log() argument.
  double uniform_positive() {
    return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next() % n; }

 private:
  std::uint64_t state_;
};

/// Order-sensitive key mixer for deriving independent substreams from
/// (seed, request, worker, ...) tuples.
inline std::uint64_t mix_key(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a ^ (b + 0x9E3779B97F4A7C15ull + (a << 6) + (a >> 2));
  x ^= x >> 33;
  x *= 0xFF51AFD7ED558CCDull;
  x ^= x >> 33;
  return x;
}

template <typename... Rest>
std::uint64_t mix_key(std::uint64_t a, std::uint64_t b, Rest... rest) {
  return mix_key(mix_key(a, b), static_cast<std::uint64_t>(rest)...);
}

/// Standard normal via Box-Muller (one value per call).
inline double sample_normal(SplitMix64& rng) {
  const double u1 = rng.uniform_positive();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

/// Exponential with the given mean; mean == 0 yields exactly 0.
inline double sample_exponential(SplitMix64& rng, double mean) {
  if (mean <= 0.0) return 0.0;
  return -mean * std::log(rng.uniform_positive());
}

/// Gamma(shape, 1) via Marsaglia-Tsang; shape < 1 boosted through the
/// Gamma(shape + 1) identity.
inline double sample_gamma(SplitMix64& rng, double shape) {
  if (shape < 1.0) {
    const double u = rng.uniform_positive();
    return sample_gamma(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = sample_normal(rng);
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = rng.uniform_positive();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace vp
