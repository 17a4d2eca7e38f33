#include "flowanchor/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "flowanchor/error.hpp"

namespace flowanchor {

namespace {

constexpr double kPsnrCapDb = 99.0;

void require_mask_grid(const EditMask& mask, const Shape5& d, const char* what) {
  if (!(mask.dims() == MaskDims{d.frames, d.height, d.width})) {
    throw ShapeError(std::string(what) + ": mask dims do not match the video");
  }
}

}  // namespace

Frame extract_frame(const VideoLatent& video, std::size_t b, std::size_t f) {
  const Shape5& d = video.dims();
  if (b >= d.batch || f >= d.frames) throw ValueError("extract_frame: index out of range");
  Frame out{d.channels, d.height, d.width, {}};
  out.data.reserve(d.channels * d.height * d.width);
  for (std::size_t c = 0; c < d.channels; ++c)
    for (std::size_t h = 0; h < d.height; ++h)
      for (std::size_t w = 0; w < d.width; ++w) out.data.push_back(video.at(b, c, f, h, w));
  return out;
}

Frame crop(const Frame& frame, std::size_t h0, std::size_t h1, std::size_t w0,
           std::size_t w1) {
  if (h0 >= h1 || w0 >= w1 || h1 > frame.height || w1 > frame.width) {
    throw ValueError("crop: empty or out-of-range box");
  }
  Frame out{frame.channels, h1 - h0, w1 - w0, {}};
  out.data.reserve(out.channels * out.height * out.width);
  for (std::size_t c = 0; c < frame.channels; ++c)
    for (std::size_t h = h0; h < h1; ++h)
      for (std::size_t w = w0; w < w1; ++w) out.data.push_back(frame.at(c, h, w));
  return out;
}

PooledPixelEmbedder::PooledPixelEmbedder(std::size_t grid) : grid_(grid) {
  if (grid_ == 0) throw ValueError("PooledPixelEmbedder: grid must be >= 1");
}

std::vector<double> PooledPixelEmbedder::embed(const Frame& frame) const {
  const std::size_t gh = std::min(grid_, frame.height);
  const std::size_t gw = std::min(grid_, frame.width);
  std::vector<double> out;
  out.reserve(frame.channels * gh * gw);
  for (std::size_t c = 0; c < frame.channels; ++c) {
    for (std::size_t gy = 0; gy < gh; ++gy) {
      const std::size_t y0 = gy * frame.height / gh;
      const std::size_t y1 = (gy + 1) * frame.height / gh;
      for (std::size_t gx = 0; gx < gw; ++gx) {
        const std::size_t x0 = gx * frame.width / gw;
        const std::size_t x1 = (gx + 1) * frame.width / gw;
        double acc = 0.0;
        for (std::size_t y = y0; y < y1; ++y)
          for (std::size_t x = x0; x < x1; ++x) acc += frame.at(c, y, x);
        out.push_back(acc / static_cast<double>((y1 - y0) * (x1 - x0)));
      }
    }
  }
  double norm = 0.0;
  for (double v : out) norm += v * v;
  norm = std::sqrt(norm);
  if (norm == 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    out.front() = 1.0;
    return out;
  }
  for (double& v : out) v /= norm;
  return out;
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) {
    throw ShapeError("cosine_similarity: embedding sizes differ");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw ValueError("cosine_similarity: zero embedding");
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

FlowField::FlowField(std::size_t pairs, std::size_t height, std::size_t width,
                     std::vector<float> data)
    : pairs_(pairs), height_(height), width_(width), data_(std::move(data)) {
  if (pairs_ == 0 || height_ == 0 || width_ == 0) {
    throw ShapeError("flow field dims must be >= 1");
  }
  if (data_.size() != pairs_ * 2 * height_ * width_) {
    throw ShapeError("flow field payload does not match (F-1, 2, H, W)");
  }
  for (float v : data_) {
    if (!std::isfinite(v)) throw ValueError("flow field contains non-finite values");
  }
}

FlowField FlowField::from_raw(const RawTensor& raw) {
  if (raw.dims.size() != 4 || raw.dims[1] != 2) {
    throw FormatError(FormatError::Kind::kMalformedHeader,
                      "flow tensor must have dims (F-1, 2, H, W)");
  }
  return FlowField(raw.dims[0], raw.dims[2], raw.dims[3], raw.data);
}

FlowField FlowField::zeros(std::size_t pairs, std::size_t height, std::size_t width) {
  return FlowField(pairs, height, width, std::vector<float>(pairs * 2 * height * width, 0.0F));
}

double masked_psnr(const VideoLatent& a, const VideoLatent& b, const EditMask& mask,
                   double peak) {
  require_same_shape(a, b, "masked_psnr");
  const Shape5& d = a.dims();
  require_mask_grid(mask, d, "masked_psnr");
  if (!(peak > 0.0)) throw ValueError("masked_psnr: peak must be positive");
  const std::size_t plane = d.voxels();
  const auto x = a.data();
  const auto y = b.data();
  double sq = 0.0;
  std::size_t count = 0;
  for (std::size_t bc = 0; bc < d.batch * d.channels; ++bc) {
    for (std::size_t k = 0; k < plane; ++k) {
      if (mask[k]) continue;
      const double e = static_cast<double>(x[bc * plane + k]) - static_cast<double>(y[bc * plane + k]);
      sq += e * e;
      ++count;
    }
  }
  if (count == 0) throw ValueError("masked_psnr: mask complement is empty");
  const double mse = sq / static_cast<double>(count);
  const double peak_sq = peak * peak;
  if (mse < peak_sq * std::pow(10.0, -kPsnrCapDb / 10.0)) return kPsnrCapDb;
  return 10.0 * std::log10(peak_sq / mse);
}

WarpError warp_error(const VideoLatent& video, const FlowField& flow) {
  const Shape5& d = video.dims();
  if (d.frames < 2) throw ValueError("warp_error: need at least two frames");
  if (flow.pairs() != d.frames - 1 || flow.height() != d.height || flow.width() != d.width) {
    throw ShapeError("warp_error: flow dims do not match the video");
  }
  const double max_x = static_cast<double>(d.width - 1);
  const double max_y = static_cast<double>(d.height - 1);

  WarpError out;
  double pair_total = 0.0;
  std::size_t pair_count = 0;
  for (std::size_t b = 0; b < d.batch; ++b) {
    for (std::size_t p = 0; p + 1 < d.frames; ++p) {
      double sq = 0.0;
      std::size_t cells = 0;
      for (std::size_t y = 0; y < d.height; ++y) {
        for (std::size_t x = 0; x < d.width; ++x) {
          const double sx = static_cast<double>(x) - flow.dx(p, y, x);
          const double sy = static_cast<double>(y) - flow.dy(p, y, x);
          if (sx < -0.5 || sx > max_x + 0.5 || sy < -0.5 || sy > max_y + 0.5) {
            ++out.excluded;
            continue;
          }
          const double cx = std::clamp(sx, 0.0, max_x);
          const double cy = std::clamp(sy, 0.0, max_y);
          const auto x0 = static_cast<std::size_t>(std::floor(cx));
          const auto y0 = static_cast<std::size_t>(std::floor(cy));
          const std::size_t x1 = std::min(x0 + 1, d.width - 1);
          const std::size_t y1 = std::min(y0 + 1, d.height - 1);
          const double fx = cx - static_cast<double>(x0);
          const double fy = cy - static_cast<double>(y0);
          for (std::size_t c = 0; c < d.channels; ++c) {
            const double warped =
                (1.0 - fy) * ((1.0 - fx) * video.at(b, c, p, y0, x0) + fx * video.at(b, c, p, y0, x1)) +
                fy * ((1.0 - fx) * video.at(b, c, p, y1, x0) + fx * video.at(b, c, p, y1, x1));
            const double e = warped - static_cast<double>(video.at(b, c, p + 1, y, x));
            sq += e * e;
          }
          ++cells;
        }
      }
      out.included += cells;
      if (cells > 0) {
        pair_total += sq / static_cast<double>(cells * d.channels);
        ++pair_count;
      }
    }
  }
  out.value = pair_count > 0 ? pair_total / static_cast<double>(pair_count) : 0.0;
  return out;
}

double frame_consistency(const VideoLatent& video, const FrameEmbedder& embedder) {
  const Shape5& d = video.dims();
  if (d.frames < 2) throw ValueError("frame_consistency: need at least two frames");
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t b = 0; b < d.batch; ++b) {
    std::vector<double> prev = embedder.embed(extract_frame(video, b, 0));
    for (std::size_t f = 1; f < d.frames; ++f) {
      std::vector<double> cur = embedder.embed(extract_frame(video, b, f));
      total += cosine_similarity(prev, cur);
      ++count;
      prev = std::move(cur);
    }
  }
  return total / static_cast<double>(count);
}

double local_structure_similarity(const VideoLatent& src, const VideoLatent& edit,
                                  const EditMask& mask, const FrameEmbedder& embedder) {
  require_same_shape(src, edit, "local_structure_similarity");
  const Shape5& d = src.dims();
  require_mask_grid(mask, d, "local_structure_similarity");
  if (mask.empty_region()) throw ValueError("local_structure_similarity: mask is empty");
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t f = 0; f < d.frames; ++f) {
    std::size_t h0 = d.height, h1 = 0, w0 = d.width, w1 = 0;
    for (std::size_t h = 0; h < d.height; ++h) {
      for (std::size_t w = 0; w < d.width; ++w) {
        if (!mask.at(f, h, w)) continue;
        h0 = std::min(h0, h);
        h1 = std::max(h1, h + 1);
        w0 = std::min(w0, w);
        w1 = std::max(w1, w + 1);
      }
    }
    if (h1 == 0) continue;
    for (std::size_t b = 0; b < d.batch; ++b) {
      const auto a = embedder.embed(crop(extract_frame(src, b, f), h0, h1, w0, w1));
      const auto e = embedder.embed(crop(extract_frame(edit, b, f), h0, h1, w0, w1));
      total += cosine_similarity(a, e);
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

}  // namespace flowanchor
