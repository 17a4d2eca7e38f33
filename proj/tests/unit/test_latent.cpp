#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "flowanchor/error.hpp"
#include "flowanchor/latent.hpp"
#include "flowanchor/rng.hpp"
#include "flowanchor/time_grid.hpp"
#include "generators.hpp"

namespace fa = flowanchor;

TEST(Shape, RejectsZeroExtents) {
  EXPECT_THROW(fa::validate_shape({1, 0, 1, 1, 1}), fa::ShapeError);
  EXPECT_NO_THROW(fa::validate_shape({1, 1, 1, 1, 1}));
}

TEST(VideoLatent, RejectsLengthMismatchAndNonFinite) {
  EXPECT_THROW(fa::VideoLatent({1, 1, 1, 2, 2}, std::vector<float>(3)), fa::ShapeError);
  std::vector<float> v(4, 0.0f);
  v[2] = std::numeric_limits<float>::quiet_NaN();
  EXPECT_THROW(fa::VideoLatent({1, 1, 1, 2, 2}, v), fa::ValueError);
  v[2] = std::numeric_limits<float>::infinity();
  EXPECT_THROW(fa::VideoLatent({1, 1, 1, 2, 2}, v), fa::ValueError);
}

TEST(VideoLatent, RowMajorOffsets) {
  const fa::Shape5 s{2, 3, 4, 5, 6};
  const auto z = fa::VideoLatent::zeros(s);
  EXPECT_EQ(z.offset(0, 0, 0, 0, 1), 1u);
  EXPECT_EQ(z.offset(0, 0, 0, 1, 0), 6u);
  EXPECT_EQ(z.offset(0, 0, 1, 0, 0), 30u);
  EXPECT_EQ(z.offset(0, 1, 0, 0, 0), 120u);
  EXPECT_EQ(z.offset(1, 0, 0, 0, 0), 360u);
}

TEST(VideoLatent, BitwiseEqualSeesSignedZero) {
  const fa::Shape5 s{1, 1, 1, 1, 1};
  EXPECT_FALSE(fa::VideoLatent(s, {0.0f}).bitwise_equal(fa::VideoLatent(s, {-0.0f})));
}

TEST(Interpolate, Endpoints) {
  gen::Gen g(1);
  for (int k = 0; k < 50; ++k) {
    const auto s = g.shape();
    const auto x = g.latent(s), n = g.latent(s);
    EXPECT_TRUE(fa::interpolate_source(x, n, 0.0).bitwise_equal(x));
    EXPECT_TRUE(fa::interpolate_source(x, n, 1.0).bitwise_equal(n));
  }
}

TEST(Interpolate, HandValue) {
  const fa::Shape5 s{1, 2, 2, 2, 2};
  const auto x = fa::VideoLatent::filled(s, 2.0f);
  const auto out = fa::interpolate_source(x, fa::VideoLatent::zeros(s), 0.25);
  for (float v : out.data()) EXPECT_EQ(v, 1.5f);
}

TEST(Interpolate, TimeSlack) {
  const fa::Shape5 s{1, 1, 1, 1, 1};
  const auto x = fa::VideoLatent::filled(s, 3.0f), n = fa::VideoLatent::filled(s, 5.0f);
  EXPECT_TRUE(fa::interpolate_source(x, n, 1.0 + 5e-13).bitwise_equal(n));
  EXPECT_TRUE(fa::interpolate_source(x, n, -5e-13).bitwise_equal(x));
  EXPECT_THROW(fa::interpolate_source(x, n, 1.0 + 1e-9), fa::ValueError);
  EXPECT_THROW(fa::interpolate_source(x, n, -1e-9), fa::ValueError);
}

TEST(Interpolate, AffineInScale) {
  gen::Gen g(2);
  for (int k = 0; k < 200; ++k) {
    const auto s = g.shape();
    const auto x = g.latent(s), n = g.latent(s);
    const double t = g.unit();
    const float alpha = static_cast<float>(g.uniform(-3, 3));
    std::vector<float> ax(x.data().begin(), x.data().end());
    std::vector<float> an(n.data().begin(), n.data().end());
    for (float& v : ax) v *= alpha;
    for (float& v : an) v *= alpha;
    const auto lhs = fa::interpolate_source(fa::VideoLatent(s, ax), fa::VideoLatent(s, an), t);
    const auto base = fa::interpolate_source(x, n, t);
    for (std::size_t i = 0; i < lhs.numel(); ++i) {
      const float rhs = alpha * base.data()[i];
      const float tol = 4 * std::numeric_limits<float>::epsilon() *
                        std::max({std::abs(rhs), std::abs(alpha * x.data()[i]),
                                  std::abs(alpha * n.data()[i]), 1e-30f});
      EXPECT_NEAR(lhs.data()[i], rhs, tol);
    }
  }
}

TEST(Axpy, RoundsOnce) {
  const fa::Shape5 s{1, 1, 1, 1, 1};
  // 1 + 2^-24 + 2^-24 in float with per-op rounding would stay at 1.
  const auto a = fa::VideoLatent(s, {1.0f});
  const auto b = fa::VideoLatent(s, {0x1.0p-24f});
  EXPECT_EQ(fa::axpy(a, 2.0, b).data()[0], 1.0f + 0x1.0p-23f);
}

TEST(Rng, MatchesReferenceSplitMix64) {
  fa::RngStream r(0);
  EXPECT_EQ(r.next_u64(), 0xE220A8397B1DCDAFull);
  EXPECT_EQ(r.next_u64(), 0x6E789E6AA1B965F4ull);
  EXPECT_EQ(r.next_u64(), 0x06C45D188009454Full);
  EXPECT_EQ(r.counter(), 3u);
}

TEST(Rng, CounterResumesStream) {
  fa::RngStream a(42);
  for (int i = 0; i < 10; ++i) a.next_u64();
  fa::RngStream b(42, 10);
  EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, UniformOpenInterval) {
  fa::RngStream r(9);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.next_uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, SameSeedSameTensor) {
  fa::RngStream a(0), b(0);
  EXPECT_TRUE(fa::sample_gaussian(a, {1, 2, 3, 4, 5})
                  .bitwise_equal(fa::sample_gaussian(b, {1, 2, 3, 4, 5})));
}

TEST(Rng, DegenerateShape) {
  fa::RngStream r(3);
  const auto z = fa::sample_gaussian(r, {1, 1, 1, 1, 1});
  ASSERT_EQ(z.numel(), 1u);
  EXPECT_TRUE(std::isfinite(z.data()[0]));
}

TEST(Rng, NormalMoments) {
  fa::RngStream r(2024);
  const std::size_t n = 1000000;
  std::vector<double> xs(n);
  for (double& x : xs) x = r.next_normal();
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= n - 1;
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(var, 1.0, 0.02);
}

TEST(Rng, DerivedSeedsDiffer) {
  EXPECT_NE(fa::derive_seed(1, 0), fa::derive_seed(1, 1));
  EXPECT_NE(fa::derive_seed(1, 0), fa::derive_seed(2, 0));
  EXPECT_EQ(fa::derive_seed(5, 6, 7), fa::derive_seed(5, 6, 7));
}

TEST(TimeGrid, Uniform) {
  const auto g = fa::TimeGrid::uniform(25, 2);
  EXPECT_EQ(g.steps(), 25u);
  EXPECT_EQ(g.active_steps(), 23u);
  EXPECT_EQ(g.t_max(), 1.0);
  EXPECT_EQ(g.at(0), 0.0);
  EXPECT_EQ(g.at(25), 1.0);
  EXPECT_EQ(g.at(10), 0.4);
}

TEST(TimeGrid, Validation) {
  EXPECT_THROW(fa::TimeGrid({1.0, 0.5, 0.5, 0.0}, 0), fa::ValueError);
  EXPECT_THROW(fa::TimeGrid({1.1, 0.0}, 0), fa::ValueError);
  EXPECT_THROW(fa::TimeGrid({1.0, -0.1}, 0), fa::ValueError);
  EXPECT_THROW(fa::TimeGrid({1.0, 0.0}, 1), fa::ValueError);
  EXPECT_NO_THROW(fa::TimeGrid({0.9, 0.3, 0.0}, 1));
}
