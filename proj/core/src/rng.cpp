#include "flowanchor/rng.hpp"

#include <cmath>
#include <numbers>

namespace flowanchor {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kStepSalt = 0xD1B54A32D192ED03ULL;
constexpr std::uint64_t kDrawSalt = 0x8CB92BA72F3D8DD7ULL;
}  // namespace

std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                          std::uint64_t b) noexcept {
  std::uint64_t s = splitmix64(seed + kGolden);
  s = splitmix64(s ^ (a * kStepSalt + kGolden));
  return splitmix64(s ^ (b * kDrawSalt + kGolden));
}

std::uint64_t RngStream::next_u64() noexcept {
  ++counter_;
  return splitmix64(seed_ + counter_ * kGolden);
}

double RngStream::next_uniform() noexcept {
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  return (static_cast<double>(next_u64() >> 11) + 0.5) * kScale;
}

double RngStream::next_normal() noexcept {
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

VideoLatent sample_gaussian(RngStream& rng, const Shape5& dims) {
  VideoLatent out = VideoLatent::zeros(dims);
  for (float& v : out.mutable_data()) v = static_cast<float>(rng.next_normal());
  return out;
}

}  // namespace flowanchor
