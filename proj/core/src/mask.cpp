#include "flowanchor/mask.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <string>

#include "flowanchor/error.hpp"
#include "flowanchor/tensor_io.hpp"

namespace flowanchor {

using Kind = FormatError::Kind;

EditMask::EditMask(MaskDims dims, std::vector<std::uint8_t> data)
    : dims_(dims), data_(std::move(data)) {
  if (dims_.frames == 0 || dims_.height == 0 || dims_.width == 0) {
    throw ShapeError("mask dims must all be >= 1");
  }
  if (data_.size() != dims_.voxels()) {
    throw ShapeError("mask payload size does not match dims");
  }
  for (auto& v : data_) {
    if (v > 1) throw ValueError("mask entries must be 0 or 1");
  }
}

EditMask EditMask::zeros(MaskDims dims) {
  return EditMask(dims, std::vector<std::uint8_t>(dims.voxels(), 0));
}

EditMask EditMask::ones(MaskDims dims) {
  return EditMask(dims, std::vector<std::uint8_t>(dims.voxels(), 1));
}

EditMask EditMask::box(MaskDims dims, std::size_t f0, std::size_t f1,
                       std::size_t h0, std::size_t h1, std::size_t w0,
                       std::size_t w1) {
  std::vector<std::uint8_t> data(dims.voxels(), 0);
  f1 = std::min(f1, dims.frames);
  h1 = std::min(h1, dims.height);
  w1 = std::min(w1, dims.width);
  for (std::size_t f = f0; f < f1; ++f)
    for (std::size_t h = h0; h < h1; ++h)
      for (std::size_t w = w0; w < w1; ++w)
        data[(f * dims.height + h) * dims.width + w] = 1;
  return EditMask(dims, std::move(data));
}

std::size_t EditMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), 1));
}

namespace {

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
  std::string token;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      if (!token.empty()) break;
    } else {
      token.push_back(static_cast<char>(c));
    }
    c = in.get();
  }
  return token;
}

std::size_t pgm_number(std::istream& in, const char* field) {
  const std::string token = pgm_token(in);
  if (token.empty() || !std::all_of(token.begin(), token.end(), ::isdigit) ||
      token.size() > 9) {
    throw FormatError(Kind::kMalformedHeader,
                      std::string("PGM header: bad ") + field);
  }
  return std::stoul(token);
}

// Latent cell d on an axis of n_dst cells covers source cells [lo, hi).
std::pair<std::size_t, std::size_t> coverage(std::size_t d, std::size_t n_src,
                                             std::size_t n_dst) {
  const std::size_t lo = d * n_src / n_dst;
  const std::size_t hi = ((d + 1) * n_src + n_dst - 1) / n_dst;
  return {lo, std::max(hi, lo + 1)};
}

bool starts_with_magic(const std::filesystem::path& path, std::string_view magic) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(Kind::kIo, "cannot open " + path.string());
  std::string head(magic.size(), '\0');
  in.read(head.data(), static_cast<std::streamsize>(head.size()));
  return static_cast<std::size_t>(in.gcount()) == magic.size() && head == magic;
}

}  // namespace

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(Kind::kIo, "cannot open " + path.string());
  const std::string magic = pgm_token(in);
  if (magic != "P5") {
    throw FormatError(Kind::kUnsupportedFormat,
                      path.string() + ": not a binary PGM (P5) image");
  }
  GrayImage img;
  img.width = pgm_number(in, "width");
  img.height = pgm_number(in, "height");
  const std::size_t maxval = pgm_number(in, "maxval");
  if (img.width == 0 || img.height == 0) {
    throw FormatError(Kind::kZeroSize, path.string() + ": zero-size image");
  }
  if (maxval == 0 || maxval > 255) {
    throw FormatError(Kind::kUnsupportedFormat,
                      path.string() + ": only 8-bit PGM is supported");
  }
  img.pixels.resize(img.width * img.height);
  in.read(reinterpret_cast<char*>(img.pixels.data()),
          static_cast<std::streamsize>(img.pixels.size()));
  if (static_cast<std::size_t>(in.gcount()) != img.pixels.size()) {
    throw FormatError(Kind::kTruncatedPayload, path.string() + ": truncated PGM payload");
  }
  if (maxval != 255) {
    for (auto& p : img.pixels) {
      p = static_cast<std::uint8_t>((static_cast<unsigned>(p) * 255U + maxval / 2) / maxval);
    }
  }
  return img;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image) {
  if (image.width == 0 || image.height == 0 ||
      image.pixels.size() != image.width * image.height) {
    throw ShapeError("write_pgm: inconsistent image size");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(Kind::kIo, "cannot open " + path.string() + " for writing");
  const std::string header = "P5\n" + std::to_string(image.width) + " " +
                             std::to_string(image.height) + "\n255\n";
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
  if (!out) throw FormatError(Kind::kIo, "write_pgm: write failed");
}

EditMask resample_any_coverage(const EditMask& source, MaskDims latent) {
  const MaskDims& s = source.dims();
  if (latent.frames == 0 || latent.height == 0 || latent.width == 0) {
    throw ShapeError("resample_any_coverage: latent dims must be >= 1");
  }
  if (s == latent) return source;
  std::vector<std::uint8_t> out(latent.voxels(), 0);
  for (std::size_t f = 0; f < latent.frames; ++f) {
    const auto [f0, f1] = coverage(f, s.frames, latent.frames);
    for (std::size_t h = 0; h < latent.height; ++h) {
      const auto [h0, h1] = coverage(h, s.height, latent.height);
      for (std::size_t w = 0; w < latent.width; ++w) {
        const auto [w0, w1] = coverage(w, s.width, latent.width);
        bool hit = false;
        for (std::size_t sf = f0; sf < f1 && !hit; ++sf)
          for (std::size_t sh = h0; sh < h1 && !hit; ++sh)
            for (std::size_t sw = w0; sw < w1 && !hit; ++sw)
              hit = source.at(sf, sh, sw);
        out[(f * latent.height + h) * latent.width + w] = hit ? 1 : 0;
      }
    }
  }
  return EditMask(latent, std::move(out));
}

EditMask load_mask(std::span<const std::filesystem::path> paths, MaskDims latent) {
  if (paths.empty()) {
    throw FormatError(Kind::kUnsupportedFormat, "load_mask: no input files");
  }
  if (paths.size() == 1 && starts_with_magic(paths[0], "FATN")) {
    const RawTensor raw = read_fatn(paths[0]);
    MaskDims dims;
    if (raw.dims.size() == 3) {
      dims = {raw.dims[0], raw.dims[1], raw.dims[2]};
    } else if (raw.dims.size() == 2) {
      dims = {1, raw.dims[0], raw.dims[1]};
    } else {
      throw FormatError(Kind::kUnsupportedFormat,
                        "mask tensor must have dims (F,H,W) or (H,W)");
    }
    std::vector<std::uint8_t> bits(raw.data.size());
    std::transform(raw.data.begin(), raw.data.end(), bits.begin(),
                   [](float v) -> std::uint8_t { return v > 0.5F ? 1 : 0; });
    return resample_any_coverage(EditMask(dims, std::move(bits)), latent);
  }

  std::vector<std::uint8_t> bits;
  MaskDims dims{paths.size(), 0, 0};
  for (const auto& path : paths) {
    if (!starts_with_magic(path, "P5")) {
      throw FormatError(Kind::kUnsupportedFormat,
                        path.string() + ": unsupported mask format (want P5 PGM or FATN)");
    }
    const GrayImage img = read_pgm(path);
    if (dims.height == 0) {
      dims.height = img.height;
      dims.width = img.width;
      bits.reserve(dims.voxels());
    } else if (img.height != dims.height || img.width != dims.width) {
      throw ShapeError("mask frames have differing sizes");
    }
    for (std::uint8_t p : img.pixels) bits.push_back(p > 127 ? 1 : 0);
  }
  return resample_any_coverage(EditMask(dims, std::move(bits)), latent);
}

EditMask load_mask(const std::filesystem::path& path, MaskDims latent) {
  return load_mask(std::span<const std::filesystem::path>(&path, 1), latent);
}

}  // namespace flowanchor
