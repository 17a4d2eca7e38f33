#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "flowanchor/mask.hpp"

namespace flowanchor {

/// Cross-attention matrix of shape (F*H*W) x L for one layer and one sample.
///
/// Holds pre-softmax logits when passed to an attention hook, and
/// post-softmax probabilities when returned for diagnostics.
class AttentionMaps {
 public:
  AttentionMaps() = default;
  AttentionMaps(MaskDims grid, std::size_t tokens, std::vector<float> values);

  const MaskDims& grid() const noexcept { return grid_; }
  std::size_t rows() const noexcept { return grid_.voxels(); }
  std::size_t tokens() const noexcept { return tokens_; }

  float operator()(std::size_t voxel, std::size_t token) const noexcept {
    return values_[voxel * tokens_ + token];
  }
  float& operator()(std::size_t voxel, std::size_t token) noexcept {
    return values_[voxel * tokens_ + token];
  }

  std::span<const float> row(std::size_t voxel) const noexcept {
    return std::span<const float>(values_).subspan(voxel * tokens_, tokens_);
  }
  std::span<const float> values() const noexcept { return values_; }

  bool operator==(const AttentionMaps&) const = default;

 private:
  MaskDims grid_{};
  std::size_t tokens_ = 0;
  std::vector<float> values_;
};

/// Row-wise softmax over the token axis, evaluated in double.
AttentionMaps softmax_rows(const AttentionMaps& logits);

}  // namespace flowanchor
