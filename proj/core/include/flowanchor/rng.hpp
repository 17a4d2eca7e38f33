#pragma once

#include <cstdint>

#include "flowanchor/latent.hpp"

namespace flowanchor {

/// Counter-based random stream.
///
/// Draw k of a stream with seed s is splitmix64 evaluated at state
/// s + (k + 1) * 0x9E3779B97F4A7C15, i.e. the k-th output of the reference
/// SplitMix64 sequence:
///
///   z = state
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   z = z ^ (z >> 31)
///
/// Uniforms use the top 53 bits: u = ((z >> 11) + 0.5) * 2^-53, so u lies in
/// (0, 1) strictly. A standard normal consumes two consecutive uniforms u1, u2
/// via the cosine branch of Box-Muller: sqrt(-2 ln u1) * cos(2 pi u2).
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t counter = 0) noexcept
      : seed_(seed), counter_(counter) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }

  std::uint64_t next_u64() noexcept;
  double next_uniform() noexcept;
  double next_normal() noexcept;

 private:
  std::uint64_t seed_;
  std::uint64_t counter_;
};

std::uint64_t splitmix64(std::uint64_t state) noexcept;

/// Deterministically derives an independent stream seed from (seed, a, b).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                          std::uint64_t b = 0) noexcept;

/// Fills a tensor of the given dims with i.i.d. N(0, 1) draws in memory order.
VideoLatent sample_gaussian(RngStream& rng, const Shape5& dims);

}  // namespace flowanchor
