#include <cmath>
#include <memory>
#include <sstream>

#include <gtest/gtest.h>

#include "flowanchor/amm.hpp"
#include "flowanchor/diagnostics.hpp"
#include "flowanchor/gaussian_backend.hpp"
#include "flowanchor/sweep.hpp"
#include "generators.hpp"

namespace fa = flowanchor;

namespace {

fa::VideoLatent indicator(const fa::EditMask& m, std::size_t channels) {
  const auto& d = m.dims();
  auto v = fa::VideoLatent::zeros({1, channels, d.frames, d.height, d.width});
  auto out = v.mutable_data();
  for (std::size_t c = 0; c < channels; ++c)
    for (std::size_t p = 0; p < m.voxels(); ++p) out[c * m.voxels() + p] = m[p] ? 1.0f : 0.0f;
  return v;
}

fa::VelocityRegistry gaussian(double mu_tar) {
  auto b = std::make_shared<fa::GaussianBackend>();
  b->add_condition(fa::ConditionId{"source"}, {{0.0}, 1.0});
  b->add_condition(fa::ConditionId{"target"}, {{mu_tar}, 1.0});
  fa::VelocityRegistry reg;
  reg.add(b);
  return reg;
}

}  // namespace

TEST(Binarize, ConstantSignalIsEmpty) {
  const auto maps = fa::binarize_signal(fa::VideoLatent::filled({2, 3, 2, 2, 2}, 0.7f), 0.5);
  ASSERT_EQ(maps.size(), 2u);
  for (const auto& m : maps) EXPECT_TRUE(m.empty_region());
}

TEST(Binarize, ZeroThresholdKeepsPositiveCells) {
  const fa::VideoLatent dv({1, 1, 1, 1, 4}, {0.0f, 0.1f, -2.0f, 0.0f});
  const auto m = fa::binarize_signal(dv, 0.0)[0];
  EXPECT_EQ(m, fa::EditMask({1, 1, 4}, {0, 1, 1, 0}));
}

TEST(Binarize, IndicatorRecoversMask) {
  gen::Gen g(81);
  for (int k = 0; k < 100; ++k) {
    const auto m = g.mask(g.grid(3, 6));
    const auto dv = indicator(m, g.index(1, 4));
    const auto b = fa::binarize_signal(dv, 0.5)[0];
    if (m.empty_region() || m.count() == m.voxels()) {
      // No contrast, nothing passes the threshold.
      EXPECT_TRUE(b.empty_region());
      continue;
    }
    EXPECT_EQ(b, m);
    EXPECT_EQ(fa::signal_iou(dv, m, 0.5), 1.0);
  }
}

TEST(Binarize, ThresholdMonotone) {
  gen::Gen g(82);
  for (int k = 0; k < 200; ++k) {
    const auto dv = g.latent(g.shape());
    const double lo = g.unit(), hi = lo + (1 - lo) * g.unit();
    const auto a = fa::binarize_signal(dv, lo);
    const auto b = fa::binarize_signal(dv, hi);
    for (std::size_t s = 0; s < a.size(); ++s)
      for (std::size_t p = 0; p < a[s].voxels(); ++p)
        if (b[s][p]) {
          EXPECT_TRUE(a[s][p]);
        }
  }
}

TEST(Iou, HandCases) {
  const fa::MaskDims d{1, 2, 4};
  const fa::EditMask a(d, {1, 1, 0, 0, 0, 0, 0, 0});
  const fa::EditMask b(d, {1, 1, 1, 1, 0, 0, 0, 0});
  const fa::EditMask c(d, {0, 0, 0, 0, 1, 1, 0, 0});
  EXPECT_EQ(fa::iou(a, a), 1.0);
  EXPECT_EQ(fa::iou(a, c), 0.0);
  EXPECT_EQ(fa::iou(a, b), 0.5);
  EXPECT_EQ(fa::iou(fa::EditMask::zeros(d), fa::EditMask::zeros(d)), 1.0);
  EXPECT_EQ(fa::iou(fa::EditMask::zeros(d), a), 0.0);
}

TEST(Iou, SymmetricAndBounded) {
  gen::Gen g(83);
  for (int k = 0; k < 500; ++k) {
    const auto d = g.grid();
    const auto a = g.mask(d), b = g.mask(d);
    const double ab = fa::iou(a, b);
    EXPECT_EQ(ab, fa::iou(b, a));
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
  }
}

TEST(MagnitudeStats, HandCases) {
  const auto zero = fa::magnitude_stats(fa::VideoLatent::zeros({1, 2, 3, 1, 1}));
  EXPECT_EQ(zero.mean_abs, 0.0);
  for (double v : zero.per_frame_mean_abs) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(fa::magnitude_stats(fa::VideoLatent::filled({1, 2, 3, 1, 1}, -0.5f)).mean_abs, 0.5);
  EXPECT_EQ(fa::magnitude_stats(fa::VideoLatent({1, 1, 1, 1, 2}, {-1.0f, 2.0f})).mean_abs, 1.5);
  const auto pf = fa::magnitude_stats(fa::VideoLatent({1, 1, 2, 1, 1}, {-1.0f, 3.0f}));
  EXPECT_EQ(pf.per_frame_mean_abs, (std::vector<double>{1.0, 3.0}));
}

TEST(MagnitudeStats, AbsolutelyHomogeneous) {
  gen::Gen g(84);
  for (int k = 0; k < 200; ++k) {
    const auto dv = g.latent(g.shape());
    const float alpha = static_cast<float>(g.uniform(-4, 4));
    std::vector<float> scaled(dv.data().begin(), dv.data().end());
    for (float& v : scaled) v *= alpha;
    const double a = fa::magnitude_stats(fa::VideoLatent(dv.dims(), scaled)).mean_abs;
    const double b = std::abs(alpha) * fa::magnitude_stats(dv).mean_abs;
    EXPECT_NEAR(a, b, 1e-6 * std::max(b, 1e-30));
  }
}

TEST(MagnitudeStats, AmmNeverDecreases) {
  gen::Gen g(85);
  for (int k = 0; k < 200; ++k) {
    const auto dv = g.latent(g.shape());
    EXPECT_GE(fa::magnitude_stats(fa::apply_amm(dv, fa::AmmConfig{}, g.index(1, 50))).mean_abs,
              fa::magnitude_stats(dv).mean_abs);
  }
}

TEST(Sweep, SingleFrameRowHasZeroGamma) {
  fa::EditConfig cfg;
  const auto reg = gaussian(1.0);
  const std::vector<std::size_t> frames{1};
  const auto r = fa::frame_sweep(
      [](std::size_t f) {
        fa::RngStream rng(3);
        return fa::sample_gaussian(rng, {1, 4, f, 4, 4});
      },
      [](const fa::MaskDims& d) { return fa::EditMask::box(d, 0, d.frames, 1, 3, 1, 3); }, cfg,
      reg, frames);
  ASSERT_EQ(r.summary.size(), 1u);
  EXPECT_EQ(r.summary[0].gamma_f, 0.0);
  EXPECT_EQ(r.rows.size(), 23u);
  for (const auto& row : r.rows) EXPECT_EQ(row.gamma_f, 0.0);
}

TEST(Sweep, NullEditRows) {
  fa::EditConfig cfg;
  cfg.target_condition = cfg.source_condition;
  const auto reg = gaussian(1.0);
  const std::vector<std::size_t> frames{1, 5};
  const auto r = fa::frame_sweep(
      [](std::size_t f) { return fa::VideoLatent::filled({1, 2, f, 3, 3}, 0.5f); },
      [](const fa::MaskDims& d) { return fa::EditMask::zeros(d); }, cfg, reg, frames);
  for (const auto& s : r.summary) {
    EXPECT_EQ(s.mean_abs, 0.0);
    EXPECT_EQ(s.iou, 1.0);
  }
}

TEST(Sweep, DeterministicRowsAndCsv) {
  fa::EditConfig cfg;
  cfg.seed = 9;
  const auto reg = gaussian(1.0);
  const std::vector<std::size_t> frames{1, 5, 13, 21};
  auto source = [](std::size_t f) {
    fa::RngStream rng(fa::derive_seed(4, f));
    return fa::sample_gaussian(rng, {1, 2, f, 3, 3});
  };
  auto mask = [](const fa::MaskDims& d) { return fa::EditMask::box(d, 0, d.frames, 1, 2, 1, 2); };
  const auto a = fa::frame_sweep(source, mask, cfg, reg, frames);
  const auto b = fa::frame_sweep(source, mask, cfg, reg, frames);
  std::ostringstream ca, cb;
  fa::write_sweep_csv(ca, a.rows);
  fa::write_sweep_csv(cb, b.rows);
  EXPECT_EQ(ca.str(), cb.str());
  EXPECT_EQ(ca.str().rfind("F,step,mean_abs,iou,gamma_f\n", 0), 0u);
  EXPECT_EQ(a.rows.size(), 4u * 23u);
  for (std::size_t k = 1; k < a.summary.size(); ++k) {
    EXPECT_GT(a.summary[k].gamma_f, a.summary[k - 1].gamma_f);
  }
}

TEST(Sweep, FormatDoubleRoundTrips) {
  gen::Gen g(86);
  for (int k = 0; k < 1000; ++k) {
    const double v = g.normal() * std::exp2(g.uniform(-30, 30));
    EXPECT_EQ(std::stod(fa::format_double(v)), v);
  }
  EXPECT_EQ(fa::format_double(0.5), "0.5");
  EXPECT_EQ(fa::format_double(0.0), "0");
}
