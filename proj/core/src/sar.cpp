#include "flowanchor/sar.hpp"

#include <algorithm>

#include "flowanchor/error.hpp"

namespace flowanchor {

TargetTokenSet::TargetTokenSet(std::vector<std::size_t> indices)
    : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
  if (indices_.empty()) throw ValueError("target token set must not be empty");
}

bool TargetTokenSet::contains(std::size_t token) const noexcept {
  return std::binary_search(indices_.begin(), indices_.end(), token);
}

void TargetTokenSet::validate(std::size_t tokens) const {
  if (indices_.empty()) throw ValueError("target token set must not be empty");
  if (indices_.back() >= tokens) {
    throw ValueError("target token " + std::to_string(indices_.back()) +
                     " out of range for " + std::to_string(tokens) + " tokens");
  }
}

void SarConfig::validate() const {
  if (!(beta1 >= 0.0 && beta1 <= 1.0)) throw ValueError("sar.beta1 must lie in [0, 1]");
  if (!(beta2 >= 0.0 && beta2 <= 1.0)) throw ValueError("sar.beta2 must lie in [0, 1]");
  if (!(tau_fraction > 0.0 && tau_fraction <= 1.0)) {
    throw ValueError("sar.tau_fraction must lie in (0, 1]");
  }
}

namespace {

void check_inputs(const AttentionMaps& maps, const EditMask& mask,
                  const TargetTokenSet& targets, double beta, const char* name) {
  if (!(maps.grid() == mask.dims())) {
    throw ShapeError("SAR: mask dims do not match the attention voxel grid");
  }
  targets.validate(maps.tokens());
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw ValueError(std::string("SAR: ") + name + " must lie in [0, 1]");
  }
}

// Convex pull toward `anchor`, evaluated in double and rounded once so that
// beta = 0 and beta = 1 reproduce the endpoints exactly.
float pull(float value, float anchor, double beta) {
  return static_cast<float>((1.0 - beta) * static_cast<double>(value) +
                            beta * static_cast<double>(anchor));
}

}  // namespace

Extrema token_bounds(const AttentionMaps& maps, std::size_t voxel) {
  if (voxel >= maps.rows()) throw ValueError("token_bounds: voxel out of range");
  const auto row = maps.row(voxel);
  const auto [lo, hi] = std::minmax_element(row.begin(), row.end());
  return {*hi, *lo};
}

Extrema st_bounds(const AttentionMaps& maps, std::size_t token) {
  if (token >= maps.tokens()) throw ValueError("st_bounds: token out of range");
  float hi = maps(0, token);
  float lo = hi;
  for (std::size_t i = 1; i < maps.rows(); ++i) {
    hi = std::max(hi, maps(i, token));
    lo = std::min(lo, maps(i, token));
  }
  return {hi, lo};
}

AttentionMaps text_token_modulation(const AttentionMaps& maps, const EditMask& mask,
                                    const TargetTokenSet& targets, double beta1) {
  check_inputs(maps, mask, targets, beta1, "beta1");
  AttentionMaps out = maps;
  for (std::size_t i = 0; i < maps.rows(); ++i) {
    if (!mask[i]) continue;
    const Extrema bounds = token_bounds(maps, i);
    for (std::size_t j = 0; j < maps.tokens(); ++j) {
      out(i, j) = pull(maps(i, j), targets.contains(j) ? bounds.max : bounds.min, beta1);
    }
  }
  return out;
}

AttentionMaps spatiotemporal_modulation(const AttentionMaps& maps,
                                        const EditMask& mask,
                                        const TargetTokenSet& targets,
                                        double beta2) {
  check_inputs(maps, mask, targets, beta2, "beta2");
  AttentionMaps out = maps;
  for (std::size_t j : targets.indices()) {
    const Extrema bounds = st_bounds(maps, j);
    for (std::size_t i = 0; i < maps.rows(); ++i) {
      out(i, j) = pull(maps(i, j), mask[i] ? bounds.max : bounds.min, beta2);
    }
  }
  return out;
}

bool sar_active(const SarConfig& cfg, double t, const TimeGrid& grid,
                std::size_t layer) {
  if (!cfg.enabled) return false;
  if (cfg.layers && !cfg.layers->contains(layer)) return false;
  return t >= cfg.tau_fraction * grid.t_max();
}

AttentionMaps apply_sar(const AttentionMaps& logits, const EditMask& mask,
                        const TargetTokenSet& targets, const SarConfig& cfg,
                        double t, const TimeGrid& grid, std::size_t layer) {
  if (!sar_active(cfg, t, grid, layer)) return logits;
  return spatiotemporal_modulation(
      text_token_modulation(logits, mask, targets, cfg.beta1), mask, targets,
      cfg.beta2);
}

}  // namespace flowanchor
