#pragma once

#include <map>
#include <vector>

#include "flowanchor/velocity.hpp"

namespace flowanchor {

/// Data distribution X ~ N(mean, scale^2 I). `mean` holds either a single
/// value or one value per channel.
struct GaussianCondition {
  std::vector<double> mean{0.0};
  double scale = 1.0;
};

/// Closed-form velocity for the straight path Z_t = (1 - t) X + t N with
/// X ~ N(mu, s^2 I), N ~ N(0, I):
///
///   V(z, t) = E[N - X | Z_t = z]
///           = (t - (1 - t) s^2) r(z) - mu,
///   r(z)    = (z - (1 - t) mu) / ((1 - t)^2 s^2 + t^2).
///
/// The denominator is positive on [0, 1] whenever s > 0, so t = 1 needs no
/// special case.
VideoLatent gaussian_velocity(const VideoLatent& state, double t,
                              const GaussianCondition& cond);

/// Mean broadcast for channel c; throws ShapeError on a size mismatch.
double channel_mean(const GaussianCondition& cond, std::size_t c,
                    std::size_t channels);

class GaussianBackend final : public VelocityBackend {
 public:
  void add_condition(ConditionId id, GaussianCondition cond);
  const GaussianCondition& condition(const ConditionId& id) const;

  std::string_view kind() const noexcept override { return "gaussian"; }
  bool has_condition(const ConditionId& id) const override;
  VelocityResult evaluate(const VelocityQuery& query) const override;

 private:
  std::map<ConditionId, GaussianCondition> conditions_;
};

}  // namespace flowanchor
