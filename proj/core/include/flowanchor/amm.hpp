#pragma once

#include <cstddef>
#include <vector>

#include "flowanchor/latent.hpp"

namespace flowanchor {

struct AmmConfig {
  bool enabled = true;
  double gamma = 1.0;
  /// Reference latent length; 21 = (81 - 1) / 4 + 1 latent frames.
  std::size_t f0 = 21;
  double epsilon = 1e-7;

  void validate() const;
  bool operator==(const AmmConfig&) const = default;
};

/// Per-sample normalized map of shape (B, 1, F, H, W), entries in [0, 1].
struct ContrastMap {
  Shape5 dims;  // channels == 1
  std::vector<double> data;

  double at(std::size_t b, std::size_t voxel) const noexcept {
    return data[b * dims.voxels() + voxel];
  }
};

/// gamma * log(f) / log(f0). Zero at f = 1, gamma at f = f0.
double gamma_f(const AmmConfig& cfg, std::size_t frames);

/// Channel average of dv (or of |dv| when `absolute`), accumulated
/// sequentially over c = 0..C-1 in double. Shape (B, 1, F, H, W).
ContrastMap channel_average(const VideoLatent& dv, bool absolute);

/// (x - min) / (max - min + eps) per batch sample over all F*H*W positions.
ContrastMap normalize_per_sample(ContrastMap map, double eps);

/// normalize_per_sample(channel_average(dv, false), eps).
ContrastMap contrast_map(const VideoLatent& dv, double eps);

/// (1 + gamma_f * C) * dv with C broadcast over channels.
VideoLatent modulate(const VideoLatent& dv, const ContrastMap& contrast,
                     double gamma_f);

/// Contrast map plus modulation; returns dv unchanged when gamma_f == 0 or
/// AMM is disabled.
VideoLatent apply_amm(const VideoLatent& dv, const AmmConfig& cfg,
                      std::size_t frames);

}  // namespace flowanchor
