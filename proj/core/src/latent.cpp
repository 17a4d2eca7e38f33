#include "flowanchor/latent.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include "flowanchor/error.hpp"

namespace flowanchor {

std::string Shape5::to_string() const {
  std::ostringstream os;
  os << '(' << batch << ',' << channels << ',' << frames << ',' << height << ','
     << width << ')';
  return os.str();
}

void validate_shape(const Shape5& dims) {
  const std::size_t extents[] = {dims.batch, dims.channels, dims.frames,
                                 dims.height, dims.width};
  std::size_t total = 1;
  for (std::size_t e : extents) {
    if (e == 0) {
      throw ShapeError("latent dims must all be >= 1, got " + dims.to_string());
    }
    if (total > std::numeric_limits<std::size_t>::max() / e) {
      throw ShapeError("latent dims overflow: " + dims.to_string());
    }
    total *= e;
  }
}

VideoLatent::VideoLatent(Shape5 dims, std::vector<float> data)
    : dims_(dims), data_(std::move(data)) {
  validate_shape(dims_);
  if (data_.size() != dims_.numel()) {
    throw ShapeError("latent payload has " + std::to_string(data_.size()) +
                     " values, dims " + dims_.to_string() + " need " +
                     std::to_string(dims_.numel()));
  }
  if (!all_finite()) {
    throw ValueError("latent contains non-finite values");
  }
}

VideoLatent VideoLatent::zeros(Shape5 dims) { return filled(dims, 0.0F); }

VideoLatent VideoLatent::filled(Shape5 dims, float value) {
  validate_shape(dims);
  return VideoLatent(dims, std::vector<float>(dims.numel(), value));
}

bool VideoLatent::all_finite() const noexcept {
  for (float v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

bool VideoLatent::bitwise_equal(const VideoLatent& other) const noexcept {
  return dims_ == other.dims_ && data_.size() == other.data_.size() &&
         (data_.empty() ||
          std::memcmp(data_.data(), other.data_.data(),
                      data_.size() * sizeof(float)) == 0);
}

void require_same_shape(const VideoLatent& a, const VideoLatent& b,
                        const char* what) {
  if (!(a.dims() == b.dims())) {
    throw ShapeError(std::string(what) + ": shape mismatch " +
                     a.dims().to_string() + " vs " + b.dims().to_string());
  }
}

double clamp_unit_time(double t) {
  constexpr double kSlack = 1e-12;
  if (!(t >= -kSlack && t <= 1.0 + kSlack)) {
    throw ValueError("time " + std::to_string(t) + " outside [0, 1]");
  }
  return std::clamp(t, 0.0, 1.0);
}

VideoLatent interpolate_source(const VideoLatent& x_src, const VideoLatent& noise,
                               double t) {
  require_same_shape(x_src, noise, "interpolate_source");
  t = clamp_unit_time(t);
  const double keep = 1.0 - t;
  VideoLatent out = x_src;
  auto dst = out.mutable_data();
  auto n = noise.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = static_cast<float>(keep * static_cast<double>(dst[i]) +
                                t * static_cast<double>(n[i]));
  }
  return out;
}

VideoLatent subtract(const VideoLatent& a, const VideoLatent& b) {
  require_same_shape(a, b, "subtract");
  VideoLatent out = a;
  auto dst = out.mutable_data();
  auto rhs = b.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] -= rhs[i];
  return out;
}

VideoLatent axpy(const VideoLatent& a, double scale, const VideoLatent& b) {
  require_same_shape(a, b, "axpy");
  VideoLatent out = a;
  auto dst = out.mutable_data();
  auto rhs = b.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = static_cast<float>(static_cast<double>(dst[i]) +
                                scale * static_cast<double>(rhs[i]));
  }
  return out;
}

}  // namespace flowanchor
