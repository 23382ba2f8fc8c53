#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace qxval {

/// SplitMix64 mixer; the basis of the documented seed-derivation hash.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Stable per-stream seed derivation:
///   h = splitmix64(base); for each part p: h = splitmix64(h ^ p)
/// Streams are keyed on (experiment, model, config_index, replica[, substream])
/// so no two replicas ever share a sequence.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = splitmix64(base);
  for (std::uint64_t p : parts) h = splitmix64(h ^ p);
  return h;
}

/// Explicitly-seeded PRNG with hand-rolled samplers so that traces are
/// bit-reproducible across standard libraries. Every sampler consumes exactly
/// one engine draw.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double u01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return u01() < p; }

  /// Uniform index in [0, n).
  std::size_t uniform_index(std::size_t n) {
    const auto i = static_cast<std::size_t>(u01() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

  /// Index sampled proportionally to `weights` (assumed normalized) by CDF walk.
  std::size_t pick_weighted(std::span<const double> weights) {
    const double u = u01();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return weights.size() - 1;
  }

 private:
  std::mt19937_64 engine_;  // sequence fully specified by the standard
};

}  // namespace qxval
