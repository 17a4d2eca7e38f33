#include "flowanchor/gaussian_backend.hpp"

#include "flowanchor/error.hpp"

namespace flowanchor {

double channel_mean(const GaussianCondition& cond, std::size_t c,
                    std::size_t channels) {
  if (cond.mean.size() == 1) return cond.mean.front();
  if (cond.mean.size() != channels) {
    throw ShapeError("gaussian mean has " + std::to_string(cond.mean.size()) +
                     " entries for " + std::to_string(channels) + " channels");
  }
  return cond.mean[c];
}

VideoLatent gaussian_velocity(const VideoLatent& state, double t,
                              const GaussianCondition& cond) {
  if (!(cond.scale > 0.0)) {
    throw ValueError("gaussian condition needs a positive scale");
  }
  t = clamp_unit_time(t);
  const Shape5& d = state.dims();
  const double keep = 1.0 - t;
  const double var = cond.scale * cond.scale;
  const double denom = keep * keep * var + t * t;
  const double gain = (t - keep * var) / denom;

  VideoLatent out = state;
  auto v = out.mutable_data();
  const std::size_t plane = d.voxels();
  for (std::size_t b = 0; b < d.batch; ++b) {
    for (std::size_t c = 0; c < d.channels; ++c) {
      const double mu = channel_mean(cond, c, d.channels);
      const std::size_t base = (b * d.channels + c) * plane;
      for (std::size_t k = 0; k < plane; ++k) {
        const double z = v[base + k];
        v[base + k] = static_cast<float>(gain * (z - keep * mu) - mu);
      }
    }
  }
  return out;
}

void GaussianBackend::add_condition(ConditionId id, GaussianCondition cond) {
  if (!(cond.scale > 0.0)) {
    throw ValueError("condition '" + id.name + "': scale must be positive");
  }
  if (cond.mean.empty()) {
    throw ValueError("condition '" + id.name + "': mean must not be empty");
  }
  conditions_.insert_or_assign(std::move(id), std::move(cond));
}

const GaussianCondition& GaussianBackend::condition(const ConditionId& id) const {
  auto it = conditions_.find(id);
  if (it == conditions_.end()) {
    throw UnknownConditionError("unknown condition '" + id.name + "'");
  }
  return it->second;
}

bool GaussianBackend::has_condition(const ConditionId& id) const {
  return conditions_.contains(id);
}

VelocityResult GaussianBackend::evaluate(const VelocityQuery& query) const {
  return {gaussian_velocity(query.state, query.time, condition(query.condition)), {}};
}

}  // namespace flowanchor
