#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "flowanchor/velocity.hpp"

namespace flowanchor {

struct ToyAttentionParams {
  std::size_t channels = 4;
  std::size_t tokens = 6;
  std::size_t key_dim = 8;
  std::size_t layers = 1;
  double temperature = 1.0;
  std::uint64_t seed = 7;
};

/// A single-block cross-attention velocity field with fixed random weights.
///
/// For every layer l and voxel p with latent values z_p (C channels) and
/// normalized coordinates u_p = (f/(F-1), h/(H-1), w/(W-1), 1):
///
///   q_p      = Wc_l u_p + Wz_l z_p
///   A_l[p,j] = <q_p, K_l[j]> / temperature
///   P_l      = softmax_j(hook(A_l))
///   v[c, p]  = (1 / layers) * sum_l sum_j P_l[p, j] * values[j, c]
///
/// Keys and projections are shared by all conditions; a condition supplies
/// only the L x C value matrix.
class ToyAttentionModel {
 public:
  explicit ToyAttentionModel(ToyAttentionParams params);

  const ToyAttentionParams& params() const noexcept { return params_; }

  /// Pre-softmax logits of one layer for sample b.
  AttentionMaps logits(const VideoLatent& state, std::size_t b,
                       std::size_t layer) const;

  /// Value rows drawn from N(0, 1) with the given seed.
  std::vector<double> random_values(std::uint64_t seed) const;

  /// Copy of `base` with rows in `tokens` redrawn from `seed`.
  std::vector<double> replace_rows(const std::vector<double>& base,
                                   const std::vector<std::size_t>& tokens,
                                   std::uint64_t seed) const;

 private:
  struct Layer {
    std::vector<double> keys;        // L x d
    std::vector<double> coord_proj;  // d x 4
    std::vector<double> latent_proj; // d x C
  };

  ToyAttentionParams params_;
  std::vector<Layer> layers_;
};

class ToyAttentionBackend final : public VelocityBackend {
 public:
  explicit ToyAttentionBackend(ToyAttentionModel model);

  /// `values` is row-major L x C; throws ShapeError if its size is not L * C.
  void add_condition(ConditionId id, std::vector<double> values);

  const ToyAttentionModel& model() const noexcept { return model_; }

  std::string_view kind() const noexcept override { return "toy_attention"; }
  bool has_condition(const ConditionId& id) const override;
  VelocityResult evaluate(const VelocityQuery& query) const override;

 private:
  ToyAttentionModel model_;
  std::map<ConditionId, std::vector<double>> values_;
};

/// toy_attention_velocity: velocity plus post-softmax maps.
VelocityResult toy_attention_velocity(const ToyAttentionModel& model,
                                      const std::vector<double>& values,
                                      const VelocityQuery& query);

}  // namespace flowanchor
