#include "flowanchor/selftest.hpp"

#include <cmath>
#include <functional>
#include <memory>
#include <sstream>

#include "flowanchor/amm.hpp"
#include "flowanchor/engine.hpp"
#include "flowanchor/gaussian_backend.hpp"
#include "flowanchor/sar.hpp"
#include "flowanchor/tensor_io.hpp"

namespace flowanchor {

namespace {

const Shape5 kShape{1, 3, 3, 4, 4};

VelocityRegistry gaussian_registry(double target_mean) {
  auto backend = std::make_shared<GaussianBackend>();
  backend->add_condition(ConditionId{"source"}, {{0.0}, 1.0});
  backend->add_condition(ConditionId{"target"}, {{target_mean}, 1.0});
  VelocityRegistry reg;
  reg.add(backend);
  return reg;
}

EditConfig small_config() {
  EditConfig cfg;
  cfg.grid = TimeGrid::uniform(8, 1);
  cfg.mask = EditMask::box({kShape.frames, kShape.height, kShape.width}, 0, 3, 1, 3, 1, 3);
  cfg.seed = 3;
  return cfg;
}

VideoLatent random_latent(std::uint64_t seed) {
  RngStream rng(seed);
  return sample_gaussian(rng, kShape);
}

AttentionMaps random_logits(std::uint64_t seed) {
  RngStream rng(seed);
  const MaskDims grid{kShape.frames, kShape.height, kShape.width};
  std::vector<float> v(grid.voxels() * 5);
  for (float& x : v) x = static_cast<float>(rng.next_normal());
  return AttentionMaps(grid, 5, std::move(v));
}

bool null_edit() {
  EditConfig cfg = small_config();
  cfg.target_condition = cfg.source_condition;
  const VideoLatent x = random_latent(1);
  return run_edit(x, cfg, gaussian_registry(1.0)).result.bitwise_equal(x);
}

bool deterministic() {
  const EditConfig cfg = small_config();
  const VideoLatent x = random_latent(2);
  const auto reg = gaussian_registry(1.5);
  return run_edit(x, cfg, reg).result.bitwise_equal(run_edit(x, cfg, reg).result);
}

bool sar_endpoints() {
  const AttentionMaps a = random_logits(4);
  const EditMask mask = small_config().mask;
  const TargetTokenSet targets({1, 3});
  if (!(text_token_modulation(a, mask, targets, 0.0) == a)) return false;
  if (!(spatiotemporal_modulation(a, mask, targets, 0.0) == a)) return false;
  const AttentionMaps s1 = text_token_modulation(a, mask, targets, 1.0);
  for (std::size_t p = 0; p < mask.voxels(); ++p) {
    if (!mask[p]) continue;
    const Extrema e = token_bounds(a, p);
    for (std::size_t j = 0; j < a.tokens(); ++j) {
      if (s1(p, j) != (targets.contains(j) ? e.max : e.min)) return false;
    }
  }
  return true;
}

bool amm_identity() {
  const VideoLatent dv = random_latent(5);
  AmmConfig cfg;
  cfg.gamma = 0.0;
  return apply_amm(dv, cfg, kShape.frames).bitwise_equal(dv) &&
         apply_amm(dv, AmmConfig{}, 1).bitwise_equal(dv);
}

bool fatn_roundtrip() {
  const VideoLatent x = random_latent(6);
  std::stringstream buf;
  write_fatn(buf, to_raw(x));
  return from_raw(read_fatn(buf)).bitwise_equal(x);
}

bool gaussian_endpoint() {
  // At t = 0 the conditional expectation of N is 0, so V = -z.
  const VideoLatent z = random_latent(7);
  const VideoLatent v = gaussian_velocity(z, 0.0, {{0.7}, 1.3});
  for (std::size_t k = 0; k < z.data().size(); ++k) {
    if (std::abs(v.data()[k] + z.data()[k]) > 1e-6) return false;
  }
  return true;
}

}  // namespace

std::vector<SelfTestCheck> run_selftest() {
  const std::pair<const char*, std::function<bool()>> checks[] = {
      {"null edit returns the source", null_edit},
      {"fixed seed is reproducible", deterministic},
      {"SAR identity and saturation", sar_endpoints},
      {"AMM identity at gamma 0 and F 1", amm_identity},
      {"FATN round trip", fatn_roundtrip},
      {"gaussian velocity at t 0", gaussian_endpoint},
  };
  std::vector<SelfTestCheck> out;
  for (const auto& [name, fn] : checks) {
    SelfTestCheck c{name, false, {}};
    try {
      c.ok = fn();
    } catch (const std::exception& e) {
      c.detail = e.what();
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace flowanchor
