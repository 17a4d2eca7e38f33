#include "flowanchor/amm.hpp"

#include <algorithm>
#include <cmath>

#include "flowanchor/error.hpp"

namespace flowanchor {

void AmmConfig::validate() const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw ValueError("amm.gamma must be a finite value >= 0");
  }
  if (f0 < 2) throw ValueError("amm.f0 must be >= 2");
  if (!(epsilon > 0.0)) throw ValueError("amm.epsilon must be positive");
}

double gamma_f(const AmmConfig& cfg, std::size_t frames) {
  if (frames < 1) throw ValueError("gamma_f: frame count must be >= 1");
  cfg.validate();
  const double ratio = std::log(static_cast<double>(frames)) /
                       std::log(static_cast<double>(cfg.f0));
  return cfg.gamma * ratio;
}

ContrastMap channel_average(const VideoLatent& dv, bool absolute) {
  const Shape5& d = dv.dims();
  const std::size_t plane = d.voxels();
  ContrastMap out{Shape5{d.batch, 1, d.frames, d.height, d.width},
                  std::vector<double>(d.batch * plane, 0.0)};
  const auto src = dv.data();
  const double inv_c = 1.0 / static_cast<double>(d.channels);
  for (std::size_t b = 0; b < d.batch; ++b) {
    double* dst = out.data.data() + b * plane;
    for (std::size_t c = 0; c < d.channels; ++c) {
      const float* ch = src.data() + (b * d.channels + c) * plane;
      for (std::size_t k = 0; k < plane; ++k) {
        const double v = ch[k];
        dst[k] += absolute ? std::abs(v) : v;
      }
    }
    for (std::size_t k = 0; k < plane; ++k) dst[k] *= inv_c;
  }
  return out;
}

ContrastMap normalize_per_sample(ContrastMap map, double eps) {
  if (!(eps > 0.0)) throw ValueError("contrast normalization needs eps > 0");
  const std::size_t plane = map.dims.voxels();
  for (std::size_t b = 0; b < map.dims.batch; ++b) {
    double* x = map.data.data() + b * plane;
    const auto [lo, hi] = std::minmax_element(x, x + plane);
    const double min = *lo;
    const double denom = (*hi - min) + eps;
    for (std::size_t k = 0; k < plane; ++k) x[k] = (x[k] - min) / denom;
  }
  return map;
}

ContrastMap contrast_map(const VideoLatent& dv, double eps) {
  return normalize_per_sample(channel_average(dv, false), eps);
}

VideoLatent modulate(const VideoLatent& dv, const ContrastMap& contrast,
                     double gamma_f) {
  const Shape5& d = dv.dims();
  if (contrast.dims.batch != d.batch || contrast.dims.voxels() != d.voxels()) {
    throw ShapeError("AMM: contrast map does not match the editing signal");
  }
  const std::size_t plane = d.voxels();
  VideoLatent out = dv;
  auto v = out.mutable_data();
  for (std::size_t b = 0; b < d.batch; ++b) {
    for (std::size_t c = 0; c < d.channels; ++c) {
      float* ch = v.data() + (b * d.channels + c) * plane;
      for (std::size_t k = 0; k < plane; ++k) {
        const double factor = 1.0 + gamma_f * contrast.at(b, k);
        ch[k] = static_cast<float>(factor * static_cast<double>(ch[k]));
      }
    }
  }
  return out;
}

VideoLatent apply_amm(const VideoLatent& dv, const AmmConfig& cfg,
                      std::size_t frames) {
  if (!cfg.enabled) return dv;
  const double g = gamma_f(cfg, frames);
  if (g == 0.0) return dv;
  return modulate(dv, contrast_map(dv, cfg.epsilon), g);
}

}  // namespace flowanchor
