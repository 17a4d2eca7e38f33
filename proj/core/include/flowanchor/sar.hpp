#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <vector>

#include "flowanchor/attention_maps.hpp"
#include "flowanchor/mask.hpp"
#include "flowanchor/time_grid.hpp"

namespace flowanchor {

/// Target token indices J_tar (0-based, nonempty, sorted, unique).
class TargetTokenSet {
 public:
  TargetTokenSet() = default;
  explicit TargetTokenSet(std::vector<std::size_t> indices);

  bool contains(std::size_t token) const noexcept;
  bool empty() const noexcept { return indices_.empty(); }
  const std::vector<std::size_t>& indices() const noexcept { return indices_; }

  /// Throws ValueError when empty or when an index is >= tokens.
  void validate(std::size_t tokens) const;

  bool operator==(const TargetTokenSet&) const = default;

 private:
  std::vector<std::size_t> indices_;
};

struct SarConfig {
  bool enabled = true;
  double beta1 = 0.3;
  double beta2 = 0.3;
  /// SAR is active while t >= tau_fraction * t_max.
  double tau_fraction = 0.6;
  /// Layers receiving SAR; nullopt means every layer.
  std::optional<std::set<std::size_t>> layers;

  void validate() const;
  bool operator==(const SarConfig&) const = default;
};

struct Extrema {
  float max;
  float min;
};

/// Max and min of row `voxel` over all tokens.
Extrema token_bounds(const AttentionMaps& maps, std::size_t voxel);

/// Max and min of column `token` over all voxels.
Extrema st_bounds(const AttentionMaps& maps, std::size_t token);

/// Step 1. Inside the mask, target logits move to (1 - b1) A + b1 A_max(row)
/// and non-target logits to (1 - b1) A + b1 A_min(row). Rows outside the mask
/// are copied.
AttentionMaps text_token_modulation(const AttentionMaps& maps, const EditMask& mask,
                                    const TargetTokenSet& targets, double beta1);

/// Step 2. Target columns move toward their column max at masked voxels and
/// toward their column min elsewhere, with strength b2. Non-target columns
/// are copied.
AttentionMaps spatiotemporal_modulation(const AttentionMaps& maps,
                                        const EditMask& mask,
                                        const TargetTokenSet& targets,
                                        double beta2);

/// True when SAR should modulate layer `layer` at time t.
bool sar_active(const SarConfig& cfg, double t, const TimeGrid& grid,
                std::size_t layer);

/// Both steps on pre-softmax logits, gated by the time window and layer set.
AttentionMaps apply_sar(const AttentionMaps& logits, const EditMask& mask,
                        const TargetTokenSet& targets, const SarConfig& cfg,
                        double t, const TimeGrid& grid, std::size_t layer = 0);

}  // namespace flowanchor
