#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "flowanchor/latent.hpp"

namespace flowanchor {

/// A FATN tensor of arbitrary rank.
///
/// On disk: an ASCII header line `FATN <ndim> <d1> ... <dn>\n` followed by
/// product(dims) little-endian IEEE-754 float32 values.
struct RawTensor {
  std::vector<std::size_t> dims;
  std::vector<float> data;

  std::size_t numel() const noexcept { return data.size(); }
};

RawTensor read_fatn(std::istream& in);
RawTensor read_fatn(const std::filesystem::path& path);
void write_fatn(std::ostream& out, const RawTensor& tensor);
void write_fatn(const std::filesystem::path& path, const RawTensor& tensor);

/// Loads a rank-5 (B, C, F, H, W) tensor.
VideoLatent load_tensor(const std::filesystem::path& path);
void save_tensor(const VideoLatent& tensor, const std::filesystem::path& path);

RawTensor to_raw(const VideoLatent& tensor);
VideoLatent from_raw(const RawTensor& raw);

}  // namespace flowanchor
