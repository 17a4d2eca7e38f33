#pragma once

#include <cstddef>
#include <vector>

#include "flowanchor/latent.hpp"
#include "flowanchor/mask.hpp"

namespace flowanchor {

struct MagnitudeStats {
  double mean_abs = 0.0;
  std::vector<double> per_frame_mean_abs;
};

struct SignalStats {
  std::size_t step = 0;
  double mean_abs = 0.0;
  std::vector<double> per_frame_mean_abs;
  double iou = 0.0;
};

/// Channel-mean |dv|, min-max normalized per sample (eps-guarded), then
/// cells with normalized value > threshold are set. One mask per sample.
std::vector<EditMask> binarize_signal(const VideoLatent& dv, double threshold,
                                      double eps = 1e-7);

/// |a and b| / |a or b|; 1 when both are empty.
double iou(const EditMask& a, const EditMask& b);

/// Mean of iou(binarize_signal(dv)[b], mask) over samples.
double signal_iou(const VideoLatent& dv, const EditMask& mask, double threshold,
                  double eps = 1e-7);

/// Mean |dv| over all entries, and per latent frame.
MagnitudeStats magnitude_stats(const VideoLatent& dv);

}  // namespace flowanchor
