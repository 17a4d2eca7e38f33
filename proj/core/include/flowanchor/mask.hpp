#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace flowanchor {

struct MaskDims {
  std::size_t frames = 0;
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t voxels() const noexcept { return frames * height * width; }
  bool operator==(const MaskDims&) const = default;
};

/// Binary edit region M over (F, H, W) at latent resolution.
class EditMask {
 public:
  EditMask() = default;
  EditMask(MaskDims dims, std::vector<std::uint8_t> data);

  static EditMask zeros(MaskDims dims);
  static EditMask ones(MaskDims dims);
  /// Marks the box [f0,f1) x [h0,h1) x [w0,w1).
  static EditMask box(MaskDims dims, std::size_t f0, std::size_t f1,
                      std::size_t h0, std::size_t h1, std::size_t w0,
                      std::size_t w1);

  const MaskDims& dims() const noexcept { return dims_; }
  std::size_t voxels() const noexcept { return data_.size(); }
  std::span<const std::uint8_t> data() const noexcept { return data_; }

  bool operator[](std::size_t voxel) const noexcept { return data_[voxel] != 0; }
  bool at(std::size_t f, std::size_t h, std::size_t w) const noexcept {
    return data_[(f * dims_.height + h) * dims_.width + w] != 0;
  }

  std::size_t count() const noexcept;
  bool empty_region() const noexcept { return count() == 0; }

  bool operator==(const EditMask&) const = default;

 private:
  MaskDims dims_{};
  std::vector<std::uint8_t> data_;
};

/// An 8-bit grayscale image.
struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;
};

GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const GrayImage& image);

/// Resamples a binary source volume onto latent dims. A latent cell is set
/// when any source cell it covers is set (dilating nearest assignment).
EditMask resample_any_coverage(const EditMask& source, MaskDims latent);

/// Loads a mask from one PGM (P5) per frame, or from a single FATN tensor of
/// dims (F, H, W). PGM pixels are set when > 127 (scaled for other maxvals);
/// FATN values are set when > 0.5. The result is resampled to `latent`.
EditMask load_mask(std::span<const std::filesystem::path> paths, MaskDims latent);
EditMask load_mask(const std::filesystem::path& path, MaskDims latent);

}  // namespace flowanchor
