#pragma once

#include <cstddef>
#include <vector>

namespace flowanchor {

/// Descending time grid t_T > t_{T-1} > ... > t_0 with a count of skipped
/// leading steps. values()[k] holds t_{T-k}.
class TimeGrid {
 public:
  TimeGrid(std::vector<double> descending, std::size_t skip);

  /// t_i = i / steps for i = steps..0.
  static TimeGrid uniform(std::size_t steps, std::size_t skip);

  std::size_t steps() const noexcept { return values_.size() - 1; }
  std::size_t skip() const noexcept { return skip_; }
  std::size_t active_steps() const noexcept { return steps() - skip_; }

  /// t_i for grid index i in [0, steps].
  double at(std::size_t i) const noexcept { return values_[steps() - i]; }
  double t_max() const noexcept { return values_.front(); }

  const std::vector<double>& values() const noexcept { return values_; }

  bool operator==(const TimeGrid&) const = default;

 private:
  std::vector<double> values_;
  std::size_t skip_;
};

}  // namespace flowanchor
