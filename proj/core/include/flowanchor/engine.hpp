#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flowanchor/amm.hpp"
#include "flowanchor/latent.hpp"
#include "flowanchor/mask.hpp"
#include "flowanchor/rng.hpp"
#include "flowanchor/sar.hpp"
#include "flowanchor/time_grid.hpp"
#include "flowanchor/velocity.hpp"

namespace flowanchor {

struct EditConfig {
  TimeGrid grid = TimeGrid::uniform(25, 2);
  std::size_t n_avg = 1;
  SarConfig sar;
  AmmConfig amm;
  ConditionId source_condition{"source"};
  ConditionId target_condition{"target"};
  EditMask mask;
  TargetTokenSet target_tokens{{0}};
  std::uint64_t seed = 0;
  bool baseline_blend = false;

  /// Per-step statistics in the report. Off by default to bound memory.
  bool record_history = false;
  /// Also keep the contrast map of every step (requires record_history).
  bool record_contrast_maps = false;
  double binarize_threshold = 0.5;
};

/// One evaluation of the coupled source/target pair, passed to observers.
struct DrawTrace {
  std::size_t step;
  std::size_t draw;
  const VideoLatent& x_src;
  const VideoLatent& z_edit;
  const VideoLatent& z_src;
  const VideoLatent& z_tar;
};
using DrawObserver = std::function<void(const DrawTrace&)>;

struct EditingSignal {
  /// Mean over draws of v_tar - v_src.
  VideoLatent dv;
  bool sar_applied = false;
  /// Target-branch post-softmax maps per draw, flattened in draw order.
  std::vector<AttentionMaps> target_attention;
};

struct StepRecord {
  std::size_t index = 0;  // grid index i of t_i
  double t = 0.0;
  double t_next = 0.0;
  bool sar_active = false;
  /// Statistics of the raw editing signal (before AMM).
  double mean_abs_raw = 0.0;
  std::vector<double> per_frame_mean_abs_raw;
  /// Mean |dv| after AMM.
  double mean_abs_amm = 0.0;
  /// IoU between the binarized raw signal and the mask.
  double iou = 0.0;
  std::optional<ContrastMap> contrast;
};

struct EditReport {
  double gamma_f = 0.0;
  std::size_t active_steps = 0;
  double binarize_threshold = 0.5;
  std::vector<std::string> warnings;
  std::vector<StepRecord> steps;
};

struct EditResult {
  VideoLatent result;
  EditReport report;
};

/// z_edit + z_src - x_src, evaluated in double and rounded once.
VideoLatent couple_target(const VideoLatent& z_edit, const VideoLatent& z_src,
                          const VideoLatent& x_src);

/// M * z_edit + (1 - M) * reference with M broadcast over batch and channels.
VideoLatent blend_baseline(const VideoLatent& z_edit, const VideoLatent& reference,
                           const EditMask& mask);

/// Editing signal at time t using caller-supplied noise draws (one per
/// averaging sample). The target branch receives the SAR hook when SAR is
/// enabled and the target condition differs from the source condition.
EditingSignal editing_signal(const VideoLatent& z_edit, const VideoLatent& x_src,
                             double t, const EditConfig& cfg,
                             const VelocityRegistry& velocity,
                             std::span<const VideoLatent> noises,
                             const DrawObserver& observer = {},
                             std::size_t step = 0);

/// Same, drawing cfg.n_avg noises sequentially from `rng`.
EditingSignal editing_signal(const VideoLatent& z_edit, const VideoLatent& x_src,
                             double t, const EditConfig& cfg,
                             const VelocityRegistry& velocity, RngStream& rng,
                             const DrawObserver& observer = {},
                             std::size_t step = 0);

/// Noise stream for grid step i: seed derive_seed(cfg.seed, i), counter 0.
RngStream step_stream(std::uint64_t seed, std::size_t step);

/// The anchored editing loop. Throws NonFiniteError if the state stops being
/// finite, naming the grid step.
EditResult run_edit(const VideoLatent& x_src, const EditConfig& cfg,
                    const VelocityRegistry& velocity,
                    const DrawObserver& observer = {});

}  // namespace flowanchor
