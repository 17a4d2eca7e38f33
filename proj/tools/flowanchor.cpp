#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "flowanchor/batch.hpp"
#include "flowanchor/metrics.hpp"
#include "flowanchor/scenario.hpp"
#include "flowanchor/selftest.hpp"
#include "flowanchor/sweep.hpp"
#include "flowanchor/tensor_io.hpp"

namespace fa = flowanchor;

namespace {

constexpr int kUsageError = 2;

int cmd_edit(const std::vector<std::string>& configs, const std::string& out,
             std::optional<std::size_t> workers, std::optional<std::uint64_t> seed) {
  std::vector<fa::RunSpec> specs;
  for (const std::string& path : configs) specs.push_back(fa::parse_config(path));
  fa::BatchOptions options;
  options.out_dir = out;
  options.workers = fa::resolve_workers(workers);
  options.seed_override = seed;
  return fa::run_batch(specs, options, &std::cerr);
}

int cmd_sweep(const std::string& config, const std::vector<std::size_t>& frames,
              const std::string& out, std::optional<std::uint64_t> seed) {
  fa::RunSpec spec = fa::parse_config(config);
  if (seed) spec.seed = *seed;
  const fa::Scenario base = fa::build_scenario(spec);
  const fa::SweepResult result = fa::frame_sweep(
      [&](std::size_t f) { return fa::make_source(spec, f); },
      [&](const fa::MaskDims& d) { return fa::make_mask(spec, d); }, base.config,
      base.velocity, frames);

  if (out.empty()) {
    fa::write_sweep_csv(std::cout, result.rows);
  } else {
    std::ofstream file(out, std::ios::binary | std::ios::trunc);
    if (!file) throw fa::FormatError(fa::FormatError::Kind::kIo, "cannot write " + out);
    fa::write_sweep_csv(file, result.rows);
  }
  for (const fa::SweepSummary& s : result.summary) {
    std::cerr << "F=" << s.frames << " mean_abs=" << fa::format_double(s.mean_abs)
              << " iou=" << fa::format_double(s.iou)
              << " gamma_f=" << fa::format_double(s.gamma_f) << '\n';
  }
  return 0;
}

int cmd_metrics(const std::string& config) {
  const fa::RunSpec spec = fa::parse_config(config);
  if (spec.metrics.video.empty()) {
    throw fa::ConfigError("metrics.video", "required by the metrics command");
  }
  const fa::VideoLatent source = fa::make_source(spec);
  const fa::VideoLatent edited = fa::load_tensor(spec.metrics.video);
  fa::require_same_shape(source, edited, "metrics");
  const fa::Shape5& d = source.dims();
  fa::RunOutcome outcome;
  outcome.spec = spec;
  fa::evaluate_metrics(outcome, source, edited,
                       fa::make_mask(spec, {d.frames, d.height, d.width}));

  nlohmann::ordered_json j;
  j["schema_version"] = fa::kReportSchemaVersion;
  j["metrics"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : outcome.metrics) j["metrics"][k] = v;
  j["metrics_skipped"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : outcome.metrics_skipped) j["metrics_skipped"][k] = v;
  std::cout << j.dump(2) << '\n';
  return 0;
}

int cmd_selftest() {
  int status = 0;
  for (const fa::SelfTestCheck& c : fa::run_selftest()) {
    std::cout << (c.ok ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
    std::cout << '\n';
    if (!c.ok) status = 1;
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inversion-free flow video editing with attention refinement and "
               "magnitude modulation"};
  app.require_subcommand(1);

  std::vector<std::string> edit_configs;
  std::string edit_out = "out";
  std::optional<std::size_t> edit_workers;
  std::optional<std::uint64_t> seed;
  auto* edit = app.add_subcommand("edit", "Run one or more edit configs");
  edit->add_option("config", edit_configs, "Run config file(s)")->required()->check(CLI::ExistingFile);
  edit->add_option("--out", edit_out, "Output directory (one subdirectory per run)");
  edit->add_option("--workers", edit_workers,
                   std::string("Concurrent runs (default: $") + fa::kWorkersEnv + " or 1)")
      ->check(CLI::PositiveNumber);
  edit->add_option("--seed", seed, "Override the seed of every run");

  std::string sweep_config;
  std::vector<std::size_t> sweep_frames;
  std::string sweep_out;
  auto* sweep = app.add_subcommand("sweep", "Editing-signal statistics versus frame count");
  sweep->add_option("config", sweep_config, "Run config file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--frames", sweep_frames, "Frame counts, comma separated")
      ->required()
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  sweep->add_option("--out", sweep_out, "CSV path (default: stdout)");
  sweep->add_option("--seed", seed, "Override the config seed");

  std::string metrics_config;
  auto* metrics = app.add_subcommand("metrics", "Evaluate metrics.video against io.source");
  metrics->add_option("config", metrics_config, "Run config file")->required()->check(CLI::ExistingFile);

  auto* selftest = app.add_subcommand("selftest", "Run the built-in invariant checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*edit) return cmd_edit(edit_configs, edit_out, edit_workers, seed);
    if (*sweep) return cmd_sweep(sweep_config, sweep_frames, sweep_out, seed);
    if (*metrics) return cmd_metrics(metrics_config);
    if (*selftest) return cmd_selftest();
  } catch (const fa::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kUsageError;
}
