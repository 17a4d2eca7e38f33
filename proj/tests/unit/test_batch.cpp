#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "flowanchor/batch.hpp"
#include "flowanchor/scenario.hpp"
#include "flowanchor/tensor_io.hpp"
#include "json.hpp"

namespace fa = flowanchor;
namespace fs = std::filesystem;

namespace {

class Workspace : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("flowanchor_batch_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string slurp(const fs::path& p) const {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
};

fa::RunSpec small(const std::string& name, const std::string& kind = "toy_attention") {
  fa::RunSpec s;
  s.scenario = name;
  s.seed = 5;
  s.backend.kind = kind;
  s.backend.frames = 3;
  s.backend.height = 6;
  s.backend.width = 6;
  s.grid.steps = 10;
  s.grid.skip = 1;
  return s;
}

}  // namespace

TEST(Scenario, UnknownBackend) {
  EXPECT_THROW(fa::build_scenario(small("x", "nonexistent")), fa::UnknownBackendError);
}

TEST(Scenario, SharedConditionRegistersOnce) {
  auto s = small("x");
  s.backend.target = s.backend.source;
  const auto sc = fa::build_scenario(s);
  EXPECT_EQ(sc.config.source_condition, sc.config.target_condition);
  EXPECT_EQ(sc.source.dims(), (fa::Shape5{1, 4, 3, 6, 6}));
}

TEST(Scenario, CenterMask) {
  const auto m = fa::make_mask(small("x"), {3, 8, 8});
  EXPECT_EQ(m, fa::EditMask::box({3, 8, 8}, 0, 3, 2, 6, 2, 6));
}

TEST_F(Workspace, SameSeedSameBytes) {
  const std::vector<fa::RunSpec> specs{small("a"), small("b")};
  fa::BatchOptions opt;
  opt.out_dir = dir_;
  opt.workers = 2;
  ASSERT_EQ(fa::run_batch(specs, opt), 0);
  EXPECT_EQ(slurp(dir_ / "a" / "result.fatn"), slurp(dir_ / "b" / "result.fatn"));
  EXPECT_EQ(slurp(dir_ / "a" / "diagnostics.csv"), slurp(dir_ / "b" / "diagnostics.csv"));
}

TEST_F(Workspace, UnknownBackendFailsTheBatch) {
  const std::vector<fa::RunSpec> specs{small("good"), small("bad", "nonexistent")};
  fa::BatchOptions opt;
  opt.out_dir = dir_;
  std::ostringstream log;
  EXPECT_NE(fa::run_batch(specs, opt, &log), 0);
  const auto report = nlohmann::json::parse(slurp(dir_ / "bad" / "report.json"));
  EXPECT_EQ(report["status"], "failed");
  EXPECT_NE(report["error"].get<std::string>().find("nonexistent"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir_ / "bad" / "result.fatn"));
  EXPECT_TRUE(fs::exists(dir_ / "good" / "result.fatn"));
  EXPECT_NE(log.str().find("bad: FAILED"), std::string::npos);
}

TEST_F(Workspace, NullEditReturnsInputFile) {
  fa::RngStream rng(77);
  const auto x = fa::sample_gaussian(rng, {1, 4, 3, 6, 6});
  fa::save_tensor(x, dir_ / "input.fatn");
  auto s = small("null");
  s.backend.target = s.backend.source;
  s.io.source = (dir_ / "input.fatn").string();
  fa::BatchOptions opt;
  opt.out_dir = dir_ / "out";
  ASSERT_EQ(fa::run_batch(std::vector<fa::RunSpec>{s}, opt), 0);
  EXPECT_EQ(slurp(dir_ / "out" / "null" / "result.fatn"), slurp(dir_ / "input.fatn"));
}

TEST_F(Workspace, DuplicateScenarioNamesGetSuffixes) {
  const std::vector<fa::RunSpec> specs{small("r"), small("r"), small("r")};
  EXPECT_EQ(fa::run_directories(specs), (std::vector<std::string>{"r", "r-2", "r-3"}));
}

TEST_F(Workspace, ZeroStepReportAndReemission) {
  auto s = small("z");
  s.io.history = false;
  const auto outcome = fa::execute_run(s);
  ASSERT_TRUE(outcome.ok) << outcome.error;
  const std::string text = fa::report_json(outcome);
  const auto j = nlohmann::json::parse(text);
  EXPECT_EQ(j["schema_version"], fa::kReportSchemaVersion);
  EXPECT_TRUE(j["steps"].is_array());
  EXPECT_TRUE(j["steps"].empty());

  fa::emit_report(outcome, dir_ / "one");
  fa::emit_report(outcome, dir_ / "two");
  for (const char* f : {"report.json", "diagnostics.csv", "result.fatn"}) {
    EXPECT_EQ(slurp(dir_ / "one" / f), slurp(dir_ / "two" / f)) << f;
  }
  EXPECT_EQ(slurp(dir_ / "one" / "diagnostics.csv"), "F,step,mean_abs,iou,gamma_f\n");
}

TEST_F(Workspace, ReportKeyOrderIsFixed) {
  const auto outcome = fa::execute_run(small("k"));
  const auto j = nlohmann::ordered_json::parse(fa::report_json(outcome));
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"schema_version", "scenario", "status", "error",
                                            "config", "edit", "steps", "metrics",
                                            "metrics_skipped"}));
  EXPECT_EQ(j["steps"].size(), 9u);
  EXPECT_EQ(j["edit"]["binarize_threshold"], 0.5);
  EXPECT_TRUE(j["metrics"].contains("masked_psnr_db"));
}

TEST(Report, ConstantContrastIsBlack) {
  fa::ContrastMap map{{1, 1, 2, 3, 4}, std::vector<double>(24, 0.0)};
  const auto img = fa::contrast_to_pgm(map, 0);
  EXPECT_EQ(img.width, 4u);
  EXPECT_EQ(img.height, 6u);
  for (auto p : img.pixels) EXPECT_EQ(p, 0);
  map.data.assign(24, 1.0);
  map.data[5] = 0.5;
  const auto full = fa::contrast_to_pgm(map, 0);
  EXPECT_EQ(full.pixels[0], 255);
  EXPECT_EQ(full.pixels[5], 128);
}

TEST(Batch, WorkerResolution) {
  ::setenv(fa::kWorkersEnv, "3", 1);
  EXPECT_EQ(fa::resolve_workers(std::nullopt), 3u);
  EXPECT_EQ(fa::resolve_workers(5), 5u);
  ::setenv(fa::kWorkersEnv, "zero", 1);
  EXPECT_EQ(fa::resolve_workers(std::nullopt), 1u);
  ::unsetenv(fa::kWorkersEnv);
  EXPECT_EQ(fa::resolve_workers(std::nullopt), 1u);
}
