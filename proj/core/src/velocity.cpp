#include "flowanchor/velocity.hpp"

#include <algorithm>
#include <cmath>

#include "flowanchor/error.hpp"

namespace flowanchor {

AttentionMaps::AttentionMaps(MaskDims grid, std::size_t tokens,
                             std::vector<float> values)
    : grid_(grid), tokens_(tokens), values_(std::move(values)) {
  if (tokens_ == 0) throw ShapeError("attention maps need at least one token");
  if (grid_.voxels() == 0) throw ShapeError("attention maps need at least one voxel");
  if (values_.size() != grid_.voxels() * tokens_) {
    throw ShapeError("attention map payload does not match (F*H*W) x L");
  }
}

AttentionMaps softmax_rows(const AttentionMaps& logits) {
  const std::size_t L = logits.tokens();
  std::vector<float> probs(logits.values().size());
  std::vector<double> scratch(L);
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    const auto row = logits.row(i);
    const double peak = *std::max_element(row.begin(), row.end());
    double total = 0.0;
    for (std::size_t j = 0; j < L; ++j) {
      scratch[j] = std::exp(static_cast<double>(row[j]) - peak);
      total += scratch[j];
    }
    for (std::size_t j = 0; j < L; ++j) {
      probs[i * L + j] = static_cast<float>(scratch[j] / total);
    }
  }
  return AttentionMaps(logits.grid(), L, std::move(probs));
}

void VelocityRegistry::add(std::shared_ptr<const VelocityBackend> backend) {
  if (!backend) throw ValueError("VelocityRegistry::add: null backend");
  backends_.push_back(std::move(backend));
}

bool VelocityRegistry::has_condition(const ConditionId& id) const {
  return std::any_of(backends_.begin(), backends_.end(),
                     [&](const auto& b) { return b->has_condition(id); });
}

const VelocityBackend& VelocityRegistry::backend_for(const ConditionId& id) const {
  for (const auto& b : backends_) {
    if (b->has_condition(id)) return *b;
  }
  throw UnknownConditionError("unknown condition '" + id.name + "'");
}

VelocityResult VelocityRegistry::evaluate(const VelocityQuery& query) const {
  VelocityResult result = backend_for(query.condition).evaluate(query);
  if (!(result.velocity.dims() == query.state.dims())) {
    throw ShapeError("backend returned velocity of shape " +
                     result.velocity.dims().to_string() + " for state " +
                     query.state.dims().to_string());
  }
  return result;
}

VideoLatent VelocityRegistry::velocity(const VelocityQuery& query) const {
  return evaluate(query).velocity;
}

}  // namespace flowanchor
