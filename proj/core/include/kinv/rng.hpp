#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>

namespace kinv {

/// Seedable 64-bit generator (std::mt19937_64) with hand-written variate
/// transforms. The standard library's distributions are implementation
/// defined, so uniform, Gaussian (Box-Muller) and Gamma (Marsaglia-Tsang)
/// draws are produced here from raw engine output.
///
/// An Rng is single-owner. Code that fans out work derives child generators
/// with split(), keyed by a stable index rather than by scheduling order.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64";

  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1].
  double uniform_pos();
  /// Uniform integer on [0, n). n must be > 0.
  std::uint64_t index(std::uint64_t n);
  double normal();
  /// Gamma(shape, 1). shape must be > 0.
  double gamma(double shape);
  /// Random sign, ±1 with equal probability.
  double sign();

  /// Independent child generator for stream `stream`. Does not advance *this.
  Rng split(std::uint64_t stream) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::optional<double> cached_normal_;
};

/// SplitMix64 finalizer; used to derive well-mixed child seeds.
std::uint64_t mix64(std::uint64_t x);
/// Child seed for (seed, stream). Deterministic and order independent.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace kinv
