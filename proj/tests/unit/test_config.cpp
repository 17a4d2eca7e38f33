#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "flowanchor/config.hpp"
#include "generators.hpp"

namespace fa = flowanchor;

namespace {

std::string key_of(const std::string& text) {
  try {
    fa::parse_config_text(text);
  } catch (const fa::ConfigError& e) {
    return e.key_path();
  }
  return "<no error>";
}

std::string random_name(gen::Gen& g) {
  static const char alphabet[] = "abcxyz019_-.";
  std::string s(g.index(1, 8), 'a');
  for (char& c : s) c = alphabet[g.index(0, sizeof(alphabet) - 2)];
  if (s == "." || s == "..") s = "n";
  return s;
}

fa::RunSpec random_spec(gen::Gen& g) {
  fa::RunSpec s;
  s.scenario = random_name(g);
  s.seed = g.u64();
  s.baseline_blend = g.coin();
  auto& b = s.backend;
  b.kind = g.coin() ? "gaussian" : "toy_attention";
  b.source = random_name(g);
  b.target = random_name(g);
  b.batch = g.index(1, 3);
  b.channels = g.index(1, 6);
  b.frames = g.index(1, 30);
  b.height = g.index(1, 20);
  b.width = g.index(1, 20);
  auto means = [&] {
    std::vector<double> m(g.coin() ? 1 : b.channels);
    for (double& v : m) v = g.normal() * std::exp2(g.uniform(-20, 20));
    return m;
  };
  b.source_mean = means();
  b.target_mean = means();
  b.source_scale = g.uniform(1e-3, 10);
  b.target_scale = g.uniform(1e-3, 10);
  b.tokens = g.index(1, 12);
  b.key_dim = g.index(1, 16);
  b.layers = g.index(1, 4);
  b.temperature = g.uniform(0.01, 100);
  b.model_seed = g.u64();
  b.target_value_seed = g.u64();
  s.grid.steps = g.index(1, 1000);
  s.grid.skip = g.index(0, s.grid.steps - 1);
  s.grid.n_avg = g.index(1, 4);
  s.sar.config.enabled = g.coin();
  s.sar.config.beta1 = g.beta();
  s.sar.config.beta2 = g.beta();
  s.sar.config.tau_fraction = g.uniform(1e-6, 1.0);
  if (g.coin()) {
    std::set<std::size_t> layers;
    for (std::size_t l = 0; l < b.layers; ++l)
      if (g.coin()) layers.insert(l);
    s.sar.config.layers = layers;
  }
  s.sar.target_tokens = {g.index(0, b.tokens - 1)};
  s.amm.enabled = g.coin();
  s.amm.gamma = g.uniform(0, 5);
  s.amm.f0 = g.index(2, 100);
  s.amm.epsilon = g.uniform(1e-12, 1e-3);
  const char* masks[] = {"center", "all", "none", "box:0,1,0,2,1,3"};
  s.io.mask_kind = masks[g.index(0, 3)];
  s.io.history = g.coin();
  s.io.contrast_pgm = g.coin();
  std::vector<std::string> metrics;
  for (const char* m : {"psnr", "warp", "consistency", "structure"})
    if (g.coin()) metrics.push_back(m);
  s.metrics.compute = metrics;
  s.metrics.peak = g.uniform(0.1, 255);
  s.metrics.binarize_threshold = g.unit();
  s.metrics.embed_grid = g.index(1, 8);
  return s;
}

}  // namespace

TEST(Config, EmptyGivesDefaults) {
  const auto s = fa::parse_config_text("");
  EXPECT_EQ(s, fa::RunSpec{});
  EXPECT_EQ(s.grid.steps, 25u);
  EXPECT_EQ(s.grid.skip, 2u);
  EXPECT_EQ(s.grid.n_avg, 1u);
  EXPECT_EQ(s.sar.config.beta1, 0.3);
  EXPECT_EQ(s.sar.config.beta2, 0.3);
  EXPECT_EQ(s.sar.config.tau_fraction, 0.6);
  EXPECT_EQ(s.amm.gamma, 1.0);
  EXPECT_EQ(s.amm.f0, 21u);
  EXPECT_EQ(s.amm.epsilon, 1e-7);
}

TEST(Config, GammaOmitted) {
  EXPECT_EQ(fa::parse_config_text("[amm]\nf0 = 9\n").amm.gamma, 1.0);
}

TEST(Config, ErrorsNameKeyPath) {
  EXPECT_EQ(key_of("[sar]\nbeta1 = 1.5\n"), "sar.beta1");
  EXPECT_EQ(key_of("[sar]\nbeta2 = -0.1\n"), "sar.beta2");
  EXPECT_EQ(key_of("[grid]\nsteps = 4\nskip = 4\n"), "grid.skip");
  EXPECT_EQ(key_of("[amm]\nwhat = 1\n"), "amm.what");
  EXPECT_EQ(key_of("[grid]\nsteps = many\n"), "grid.steps");
  EXPECT_EQ(key_of("[sar]\nenabled = yes\n"), "sar.enabled");
  EXPECT_EQ(key_of("[sar]\nbeta1 = 0.1\nbeta1 = 0.2\n"), "sar.beta1");
  EXPECT_EQ(key_of("[io]\nsource = /does/not/exist.fatn\n"), "io.source");
  EXPECT_EQ(key_of("[bogus]\n"), "bogus");
  EXPECT_EQ(key_of("[metrics]\ncompute = psnr,clip\n"), "metrics.compute");
  EXPECT_EQ(key_of("[backend]\nchannels = 3\ntarget_mean = 1,2\n"), "backend.target_mean");
  EXPECT_EQ(key_of("scenario = a/b\n"), "scenario");
  EXPECT_EQ(key_of("[io]\nmask = box:1,2\n"), "io.mask");
}

TEST(Config, CommentsAndWhitespace) {
  const auto s = fa::parse_config_text(
      "# comment\n  seed = 12   ; trailing\n\n[ sar ]\n beta1=0.5\nlayers = 0, 2\n");
  EXPECT_EQ(s.seed, 12u);
  EXPECT_EQ(s.sar.config.beta1, 0.5);
  EXPECT_EQ(s.sar.config.layers, (std::set<std::size_t>{0, 2}));
}

TEST(Config, RelativePathsResolveAgainstFile) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "flowanchor_cfg";
  fs::create_directories(dir);
  std::ofstream(dir / "x.fatn") << "FATN 1 1\n";
  std::ofstream(dir / "run.cfg") << "[io]\nsource = x.fatn\n";
  const auto s = fa::parse_config(dir / "run.cfg");
  EXPECT_EQ(fs::path(s.io.source), (dir / "x.fatn").lexically_normal());
  fs::remove_all(dir);
}

TEST(Config, RoundTrip) {
  gen::Gen g(101);
  for (int k = 0; k < 500; ++k) {
    const auto spec = random_spec(g);
    const auto once = fa::parse_config_text(fa::emit_config(spec));
    EXPECT_EQ(once, spec);
    EXPECT_EQ(fa::parse_config_text(fa::emit_config(once)), once);
  }
}
