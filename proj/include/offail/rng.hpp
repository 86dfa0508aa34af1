#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace offail {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seeded generator with deterministic child streams. Output depends only on
/// the seed and the sequence of calls, never on the standard library's
/// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

  /// Child generator for stream `id`; independent of how much this one was used.
  Rng split(std::uint64_t id) const { return Rng(splitmix64(seed_ ^ splitmix64(id + 1))); }

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). Rejection sampling, so unbiased.
  std::uint64_t below(std::uint64_t n);

  /// Draw an index from a probability vector by inverse CDF.
  std::size_t categorical(std::span<const double> probs);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace offail
