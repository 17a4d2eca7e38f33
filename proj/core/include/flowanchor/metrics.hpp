#pragma once

#include <cstddef>
#include <vector>

#include "flowanchor/latent.hpp"
#include "flowanchor/mask.hpp"
#include "flowanchor/tensor_io.hpp"

namespace flowanchor {

/// One frame, channel-major (C, H, W).
struct Frame {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<float> data;

  float at(std::size_t c, std::size_t h, std::size_t w) const noexcept {
    return data[(c * height + h) * width + w];
  }
};

Frame extract_frame(const VideoLatent& video, std::size_t b, std::size_t f);

/// Rows [h0, h1) and columns [w0, w1) of every channel.
Frame crop(const Frame& frame, std::size_t h0, std::size_t h1, std::size_t w0,
           std::size_t w1);

/// Maps a frame to a unit-norm feature vector.
class FrameEmbedder {
 public:
  virtual ~FrameEmbedder() = default;
  virtual std::vector<double> embed(const Frame& frame) const = 0;
};

/// Average-pools each channel onto at most grid x grid cells, flattens and
/// L2-normalizes. An all-zero frame maps to the first basis vector.
class PooledPixelEmbedder final : public FrameEmbedder {
 public:
  explicit PooledPixelEmbedder(std::size_t grid = 4);
  std::vector<double> embed(const Frame& frame) const override;

 private:
  std::size_t grid_;
};

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

/// Optical flow per adjacent frame pair, dims (F-1, 2, H, W); channel 0 is dx,
/// channel 1 is dy, in pixels, mapping frame f onto frame f+1.
class FlowField {
 public:
  FlowField(std::size_t pairs, std::size_t height, std::size_t width,
            std::vector<float> data);
  static FlowField from_raw(const RawTensor& raw);
  static FlowField zeros(std::size_t pairs, std::size_t height, std::size_t width);

  std::size_t pairs() const noexcept { return pairs_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }

  float dx(std::size_t p, std::size_t y, std::size_t x) const noexcept {
    return data_[((p * 2 + 0) * height_ + y) * width_ + x];
  }
  float dy(std::size_t p, std::size_t y, std::size_t x) const noexcept {
    return data_[((p * 2 + 1) * height_ + y) * width_ + x];
  }

 private:
  std::size_t pairs_, height_, width_;
  std::vector<float> data_;
};

/// PSNR over cells outside the (edited-region) mask, all batch samples and
/// channels. Capped at 99 dB.
double masked_psnr(const VideoLatent& a, const VideoLatent& b, const EditMask& mask,
                   double peak = 1.0);

struct WarpError {
  /// Mean over frame pairs (and batch samples) of the per-pair MSE.
  double value = 0.0;
  std::size_t included = 0;
  /// Cells whose source coordinate fell more than 0.5 px outside the frame.
  std::size_t excluded = 0;
};

/// Backward-warps frame f with flow(f -> f+1): warped(y, x) samples frame f at
/// (x - dx, y - dy) bilinearly with border clamping, and compares against
/// frame f+1.
WarpError warp_error(const VideoLatent& video, const FlowField& flow);

/// Mean cosine similarity between embeddings of consecutive frames.
double frame_consistency(const VideoLatent& video, const FrameEmbedder& embedder);

/// Mean over frames with a nonempty mask of the cosine similarity between the
/// embeddings of the mask bounding-box crops of src and edit.
double local_structure_similarity(const VideoLatent& src, const VideoLatent& edit,
                                  const EditMask& mask, const FrameEmbedder& embedder);

}  // namespace flowanchor
