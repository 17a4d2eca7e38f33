#include <memory>

#include <benchmark/benchmark.h>

#include "flowanchor/amm.hpp"
#include "flowanchor/engine.hpp"
#include "flowanchor/gaussian_backend.hpp"
#include "flowanchor/sar.hpp"
#include "flowanchor/toy_attention.hpp"

namespace fa = flowanchor;

namespace {

fa::VideoLatent noise(const fa::Shape5& s, std::uint64_t seed) {
  fa::RngStream rng(seed);
  return fa::sample_gaussian(rng, s);
}

void BM_Sar(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const fa::MaskDims grid{5, side, side};
  fa::RngStream rng(1);
  std::vector<float> v(grid.voxels() * 16);
  for (float& x : v) x = static_cast<float>(rng.next_normal());
  const fa::AttentionMaps logits(grid, 16, std::move(v));
  const fa::EditMask mask = fa::EditMask::box(grid, 0, 5, side / 4, 3 * side / 4,
                                              side / 4, 3 * side / 4);
  const fa::TargetTokenSet targets({2, 5});
  const fa::TimeGrid tg = fa::TimeGrid::uniform(25, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fa::apply_sar(logits, mask, targets, fa::SarConfig{}, 0.9, tg));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.voxels()));
}
BENCHMARK(BM_Sar)->Arg(16)->Arg(32);

void BM_Amm(benchmark::State& state) {
  const auto frames = static_cast<std::size_t>(state.range(0));
  const fa::VideoLatent dv = noise({1, 16, frames, 30, 52}, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fa::apply_amm(dv, fa::AmmConfig{}, frames));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(dv.data().size()));
}
BENCHMARK(BM_Amm)->Arg(5)->Arg(21);

void BM_ToyVelocity(benchmark::State& state) {
  const fa::ToyAttentionModel model(fa::ToyAttentionParams{});
  const auto values = model.random_values(3);
  const fa::VideoLatent z = noise({1, 4, 5, 16, 16}, 4);
  const fa::VelocityQuery query{z, 0.8, fa::ConditionId{"source"}, {}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(fa::toy_attention_velocity(model, values, query));
  }
}
BENCHMARK(BM_ToyVelocity);

void BM_RunEditGaussian(benchmark::State& state) {
  auto backend = std::make_shared<fa::GaussianBackend>();
  backend->add_condition(fa::ConditionId{"source"}, {{0.0}, 1.0});
  backend->add_condition(fa::ConditionId{"target"}, {{1.0}, 1.0});
  fa::VelocityRegistry reg;
  reg.add(backend);
  const fa::VideoLatent x = noise({1, 4, 5, 16, 16}, 5);
  fa::EditConfig cfg;
  cfg.mask = fa::EditMask::box({5, 16, 16}, 0, 5, 4, 12, 4, 12);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fa::run_edit(x, cfg, reg));
  }
}
BENCHMARK(BM_RunEditGaussian)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
