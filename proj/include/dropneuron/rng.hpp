#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace dropneuron {

/// Seeded xoshiro256** generator.
///
/// The 256-bit state is expanded from the 64-bit seed with SplitMix64, so the
/// sequence depends only on the seed and is identical on every platform.
/// `stream(i)` derives an independent generator for sub-task i (a trial, the
/// data draw, the weight init, ...) without consuming from the parent.
///
/// Uniform doubles use the top 53 bits; Gaussians use the Box-Muller
/// transform with the second variate cached. No std:: distribution is used
/// because their output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }
  Rng stream(std::uint64_t index) const;

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1).
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept;
  double normal(double mean = 0.0, double stddev = 1.0) noexcept;
  /// Uniform integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept;
  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Fisher-Yates permutation of 0..n-1.
  std::vector<std::size_t> permutation(std::size_t n);
  /// k distinct indices from [0, n), in draw order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_{};
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// SplitMix64 finalizer; also used to derive stream seeds.
std::uint64_t splitmix64(std::uint64_t& x) noexcept;

}  // namespace dropneuron
