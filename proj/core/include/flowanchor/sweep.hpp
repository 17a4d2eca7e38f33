#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "flowanchor/engine.hpp"

namespace flowanchor {

/// One (F, step) row of a frame-count sweep. Statistics describe the raw
/// editing signal before AMM.
struct SweepRow {
  std::size_t frames = 0;
  std::size_t step = 0;
  double mean_abs = 0.0;
  double iou = 0.0;
  double gamma_f = 0.0;
};

/// Per-F averages over the active steps.
struct SweepSummary {
  std::size_t frames = 0;
  double mean_abs = 0.0;
  double iou = 0.0;
  double gamma_f = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SweepSummary> summary;
};

using LatentFamily = std::function<VideoLatent(std::size_t frames)>;
using MaskFamily = std::function<EditMask(const MaskDims& dims)>;

/// Runs run_edit once per frame count with identical seeds and history on.
SweepResult frame_sweep(const LatentFamily& sources, const MaskFamily& masks,
                        const EditConfig& base, const VelocityRegistry& velocity,
                        std::span<const std::size_t> frame_counts);

/// CSV with header `F,step,mean_abs,iou,gamma_f` and `\n` line endings.
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

/// Shortest round-trip decimal rendering of a double.
std::string format_double(double value);

}  // namespace flowanchor
