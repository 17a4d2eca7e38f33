#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace flowanchor {

/// Extents of a video latent, batch-major: (B, C, F, H, W).
struct Shape5 {
  std::size_t batch = 1;
  std::size_t channels = 1;
  std::size_t frames = 1;
  std::size_t height = 1;
  std::size_t width = 1;

  std::size_t numel() const noexcept {
    return batch * channels * frames * height * width;
  }
  /// Number of spatio-temporal positions F*H*W.
  std::size_t voxels() const noexcept { return frames * height * width; }

  bool operator==(const Shape5&) const = default;

  std::string to_string() const;
};

/// Throws ShapeError unless every extent is >= 1 and the product fits in size_t.
void validate_shape(const Shape5& dims);

/// Dense float32 tensor in row-major (b, c, f, h, w) order, W fastest.
///
/// Holds source latents, trajectory states, noise draws, velocities and
/// editing signals. Construction from external data rejects NaN/Inf.
class VideoLatent {
 public:
  VideoLatent() = default;
  VideoLatent(Shape5 dims, std::vector<float> data);

  static VideoLatent zeros(Shape5 dims);
  static VideoLatent filled(Shape5 dims, float value);

  const Shape5& dims() const noexcept { return dims_; }
  std::size_t numel() const noexcept { return data_.size(); }

  std::span<const float> data() const noexcept { return data_; }
  std::span<float> mutable_data() noexcept { return data_; }

  std::size_t offset(std::size_t b, std::size_t c, std::size_t f,
                     std::size_t h, std::size_t w) const noexcept {
    return (((b * dims_.channels + c) * dims_.frames + f) * dims_.height + h) *
               dims_.width +
           w;
  }

  float at(std::size_t b, std::size_t c, std::size_t f, std::size_t h,
           std::size_t w) const noexcept {
    return data_[offset(b, c, f, h, w)];
  }
  float& at(std::size_t b, std::size_t c, std::size_t f, std::size_t h,
            std::size_t w) noexcept {
    return data_[offset(b, c, f, h, w)];
  }

  bool all_finite() const noexcept;

  /// Bitwise equality of dims and payload (distinguishes -0 from +0).
  bool bitwise_equal(const VideoLatent& other) const noexcept;

 private:
  Shape5 dims_{};
  std::vector<float> data_;
};

/// Returns (1 - t) * x_src + t * noise, evaluated in double and rounded once.
///
/// t within 1e-12 outside [0, 1] is clamped; anything further throws ValueError.
VideoLatent interpolate_source(const VideoLatent& x_src, const VideoLatent& noise,
                               double t);

/// Elementwise a - b.
VideoLatent subtract(const VideoLatent& a, const VideoLatent& b);

/// Returns a + scale * b, rounded once per element.
VideoLatent axpy(const VideoLatent& a, double scale, const VideoLatent& b);

/// Clamps a time value to [0, 1] if it lies within 1e-12 of the interval.
double clamp_unit_time(double t);

void require_same_shape(const VideoLatent& a, const VideoLatent& b,
                        const char* what);

}  // namespace flowanchor
