#include "flowanchor/time_grid.hpp"

#include <string>

#include "flowanchor/error.hpp"

namespace flowanchor {

TimeGrid::TimeGrid(std::vector<double> descending, std::size_t skip)
    : values_(std::move(descending)), skip_(skip) {
  if (values_.size() < 2) {
    throw ValueError("time grid needs at least one step");
  }
  if (values_.front() > 1.0 || values_.back() < 0.0) {
    throw ValueError("time grid must lie within [0, 1]");
  }
  for (std::size_t k = 1; k < values_.size(); ++k) {
    if (!(values_[k] < values_[k - 1])) {
      throw ValueError("time grid must be strictly decreasing at position " +
                       std::to_string(k));
    }
  }
  if (skip_ >= steps()) {
    throw ValueError("skip (" + std::to_string(skip_) +
                     ") must be smaller than the step count (" +
                     std::to_string(steps()) + ")");
  }
}

TimeGrid TimeGrid::uniform(std::size_t steps, std::size_t skip) {
  if (steps == 0) throw ValueError("time grid needs at least one step");
  std::vector<double> values(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    values[k] = static_cast<double>(steps - k) / static_cast<double>(steps);
  }
  return TimeGrid(std::move(values), skip);
}

}  // namespace flowanchor
