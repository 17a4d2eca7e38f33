#include "flowanchor/toy_attention.hpp"

#include <cmath>

#include "flowanchor/error.hpp"
#include "flowanchor/rng.hpp"

namespace flowanchor {

namespace {

enum WeightTag : std::uint64_t { kKeys = 1, kCoord = 2, kLatent = 3 };

std::vector<double> normal_block(std::uint64_t seed, std::size_t n, double scale) {
  RngStream rng(seed);
  std::vector<double> out(n);
  for (double& v : out) v = scale * rng.next_normal();
  return out;
}

double unit_coord(std::size_t i, std::size_t n) {
  return n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
}

}  // namespace

ToyAttentionModel::ToyAttentionModel(ToyAttentionParams params)
    : params_(params) {
  if (params_.channels == 0 || params_.tokens == 0 || params_.key_dim == 0 ||
      params_.layers == 0) {
    throw ValueError("toy attention model: channels, tokens, key_dim and layers must be >= 1");
  }
  if (!(params_.temperature > 0.0)) {
    throw ValueError("toy attention model: temperature must be positive");
  }
  const std::size_t L = params_.tokens;
  const std::size_t d = params_.key_dim;
  const std::size_t C = params_.channels;
  layers_.reserve(params_.layers);
  for (std::size_t l = 0; l < params_.layers; ++l) {
    layers_.push_back(Layer{
        normal_block(derive_seed(params_.seed, l, kKeys), L * d,
                     1.0 / std::sqrt(static_cast<double>(d))),
        normal_block(derive_seed(params_.seed, l, kCoord), d * 4, 1.0),
        normal_block(derive_seed(params_.seed, l, kLatent), d * C,
                     1.0 / std::sqrt(static_cast<double>(C))),
    });
  }
}

AttentionMaps ToyAttentionModel::logits(const VideoLatent& state, std::size_t b,
                                        std::size_t layer) const {
  const Shape5& dims = state.dims();
  if (dims.channels != params_.channels) {
    throw ShapeError("toy attention model expects " +
                     std::to_string(params_.channels) + " channels, state has " +
                     std::to_string(dims.channels));
  }
  const Layer& ly = layers_.at(layer);
  const std::size_t L = params_.tokens;
  const std::size_t d = params_.key_dim;
  const std::size_t C = params_.channels;
  const double inv_temp = 1.0 / params_.temperature;

  const MaskDims grid{dims.frames, dims.height, dims.width};
  std::vector<float> out(grid.voxels() * L);
  std::vector<double> q(d);
  std::vector<double> z(C);
  std::size_t p = 0;
  for (std::size_t f = 0; f < dims.frames; ++f) {
    for (std::size_t h = 0; h < dims.height; ++h) {
      for (std::size_t w = 0; w < dims.width; ++w, ++p) {
        const double u[4] = {unit_coord(f, dims.frames), unit_coord(h, dims.height),
                             unit_coord(w, dims.width), 1.0};
        for (std::size_t c = 0; c < C; ++c) z[c] = state.at(b, c, f, h, w);
        for (std::size_t k = 0; k < d; ++k) {
          double acc = 0.0;
          for (std::size_t m = 0; m < 4; ++m) acc += ly.coord_proj[k * 4 + m] * u[m];
          for (std::size_t c = 0; c < C; ++c) acc += ly.latent_proj[k * C + c] * z[c];
          q[k] = acc;
        }
        for (std::size_t j = 0; j < L; ++j) {
          double dot = 0.0;
          for (std::size_t k = 0; k < d; ++k) dot += q[k] * ly.keys[j * d + k];
          out[p * L + j] = static_cast<float>(dot * inv_temp);
        }
      }
    }
  }
  return AttentionMaps(grid, L, std::move(out));
}

std::vector<double> ToyAttentionModel::random_values(std::uint64_t seed) const {
  return normal_block(seed, params_.tokens * params_.channels, 1.0);
}

std::vector<double> ToyAttentionModel::replace_rows(
    const std::vector<double>& base, const std::vector<std::size_t>& tokens,
    std::uint64_t seed) const {
  const std::size_t C = params_.channels;
  if (base.size() != params_.tokens * C) {
    throw ShapeError("replace_rows: value matrix is not L x C");
  }
  std::vector<double> out = base;
  const std::vector<double> fresh = random_values(seed);
  for (std::size_t j : tokens) {
    if (j >= params_.tokens) throw ValueError("replace_rows: token index out of range");
    for (std::size_t c = 0; c < C; ++c) out[j * C + c] = fresh[j * C + c];
  }
  return out;
}

VelocityResult toy_attention_velocity(const ToyAttentionModel& model,
                                      const std::vector<double>& values,
                                      const VelocityQuery& query) {
  const ToyAttentionParams& prm = model.params();
  const std::size_t L = prm.tokens;
  const std::size_t C = prm.channels;
  if (values.size() != L * C) {
    throw ShapeError("toy attention: value matrix has " + std::to_string(values.size()) +
                     " entries, keys imply " + std::to_string(L) + " x " +
                     std::to_string(C));
  }
  const VideoLatent& state = query.state;
  const Shape5& dims = state.dims();
  const std::size_t plane = dims.voxels();

  std::vector<double> acc(state.numel(), 0.0);
  VelocityResult result;
  result.attention.reserve(prm.layers * dims.batch);
  for (std::size_t layer = 0; layer < prm.layers; ++layer) {
    for (std::size_t b = 0; b < dims.batch; ++b) {
      AttentionMaps logits = model.logits(state, b, layer);
      if (query.attention_hook) {
        logits = query.attention_hook(logits, layer);
        if (logits.rows() != plane || logits.tokens() != L) {
          throw ShapeError("attention hook changed the map shape");
        }
      }
      AttentionMaps probs = softmax_rows(logits);
      for (std::size_t p = 0; p < plane; ++p) {
        const auto row = probs.row(p);
        for (std::size_t c = 0; c < C; ++c) {
          double v = 0.0;
          for (std::size_t j = 0; j < L; ++j) v += row[j] * values[j * C + c];
          acc[(b * C + c) * plane + p] += v;
        }
      }
      result.attention.push_back(std::move(probs));
    }
  }
  const double inv_layers = 1.0 / static_cast<double>(prm.layers);
  std::vector<float> out(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) {
    out[i] = static_cast<float>(acc[i] * inv_layers);
  }
  result.velocity = VideoLatent(dims, std::move(out));
  return result;
}

ToyAttentionBackend::ToyAttentionBackend(ToyAttentionModel model)
    : model_(std::move(model)) {}

void ToyAttentionBackend::add_condition(ConditionId id, std::vector<double> values) {
  if (values.size() != model_.params().tokens * model_.params().channels) {
    throw ShapeError("condition '" + id.name + "': value matrix must be L x C");
  }
  values_.insert_or_assign(std::move(id), std::move(values));
}

bool ToyAttentionBackend::has_condition(const ConditionId& id) const {
  return values_.contains(id);
}

VelocityResult ToyAttentionBackend::evaluate(const VelocityQuery& query) const {
  auto it = values_.find(query.condition);
  if (it == values_.end()) {
    throw UnknownConditionError("unknown condition '" + query.condition.name + "'");
  }
  return toy_attention_velocity(model_, it->second, query);
}

}  // namespace flowanchor
