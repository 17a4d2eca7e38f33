#include "flowanchor/diagnostics.hpp"

#include <cmath>

#include "flowanchor/amm.hpp"
#include "flowanchor/error.hpp"

namespace flowanchor {

std::vector<EditMask> binarize_signal(const VideoLatent& dv, double threshold,
                                      double eps) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw ValueError("binarize threshold must lie in [0, 1]");
  }
  const ContrastMap norm = normalize_per_sample(channel_average(dv, true), eps);
  const Shape5& d = dv.dims();
  const MaskDims grid{d.frames, d.height, d.width};
  std::vector<EditMask> out;
  out.reserve(d.batch);
  for (std::size_t b = 0; b < d.batch; ++b) {
    std::vector<std::uint8_t> bits(grid.voxels());
    for (std::size_t k = 0; k < bits.size(); ++k) {
      bits[k] = norm.at(b, k) > threshold ? 1 : 0;
    }
    out.emplace_back(grid, std::move(bits));
  }
  return out;
}

double iou(const EditMask& a, const EditMask& b) {
  if (!(a.dims() == b.dims())) throw ShapeError("iou: mask dims differ");
  std::size_t inter = 0;
  std::size_t uni = 0;
  const auto x = a.data();
  const auto y = b.data();
  for (std::size_t k = 0; k < x.size(); ++k) {
    inter += (x[k] & y[k]);
    uni += (x[k] | y[k]);
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double signal_iou(const VideoLatent& dv, const EditMask& mask, double threshold,
                  double eps) {
  const auto bins = binarize_signal(dv, threshold, eps);
  double total = 0.0;
  for (const auto& m : bins) total += iou(m, mask);
  return total / static_cast<double>(bins.size());
}

MagnitudeStats magnitude_stats(const VideoLatent& dv) {
  const Shape5& d = dv.dims();
  const std::size_t frame_size = d.height * d.width;
  std::vector<double> per_frame(d.frames, 0.0);
  const auto v = dv.data();
  std::size_t idx = 0;
  for (std::size_t bc = 0; bc < d.batch * d.channels; ++bc) {
    for (std::size_t f = 0; f < d.frames; ++f) {
      double acc = 0.0;
      for (std::size_t k = 0; k < frame_size; ++k) acc += std::abs(static_cast<double>(v[idx++]));
      per_frame[f] += acc;
    }
  }
  MagnitudeStats out;
  double total = 0.0;
  for (double s : per_frame) total += s;
  out.mean_abs = total / static_cast<double>(dv.numel());
  const double per_frame_count = static_cast<double>(d.batch * d.channels * frame_size);
  for (double& s : per_frame) s /= per_frame_count;
  out.per_frame_mean_abs = std::move(per_frame);
  return out;
}

}  // namespace flowanchor
