#include "flowanchor/batch.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include "flowanchor/metrics.hpp"
#include "flowanchor/scenario.hpp"
#include "flowanchor/tensor_io.hpp"

namespace flowanchor {

std::size_t resolve_workers(std::optional<std::size_t> flag) {
  if (flag) return std::max<std::size_t>(*flag, 1);
  if (const char* env = std::getenv(kWorkersEnv)) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return 1;
}

void evaluate_metrics(RunOutcome& outcome, const VideoLatent& source,
                      const VideoLatent& edited, const EditMask& mask) {
  const MetricsSpec& m = outcome.spec.metrics;
  const PooledPixelEmbedder embedder(m.embed_grid);
  for (const std::string& name : m.compute) {
    try {
      if (name == "psnr") {
        outcome.metrics["masked_psnr_db"] = masked_psnr(source, edited, mask, m.peak);
      } else if (name == "consistency") {
        outcome.metrics["frame_consistency"] = frame_consistency(edited, embedder);
      } else if (name == "structure") {
        outcome.metrics["local_structure_similarity"] =
            local_structure_similarity(source, edited, mask, embedder);
      } else if (name == "warp") {
        if (m.flow.empty()) {
          outcome.metrics_skipped["warp_error"] = "metrics.flow not set";
          continue;
        }
        const WarpError w = warp_error(edited, FlowField::from_raw(read_fatn(m.flow)));
        outcome.metrics["warp_error"] = w.value;
        outcome.metrics["warp_error_excluded_cells"] = static_cast<double>(w.excluded);
      }
    } catch (const Error& e) {
      outcome.metrics_skipped[name] = e.what();
    }
  }
}

RunOutcome execute_run(const RunSpec& spec) {
  RunOutcome outcome;
  outcome.spec = spec;
  try {
    Scenario sc = build_scenario(spec);
    outcome.edit = run_edit(sc.source, sc.config, sc.velocity);
    outcome.ok = outcome.edit->result.all_finite();
    if (!outcome.ok) outcome.error = "final state is not finite";
    if (outcome.ok) evaluate_metrics(outcome, sc.source, outcome.edit->result, sc.config.mask);
  } catch (const std::exception& e) {
    outcome.ok = false;
    outcome.error = e.what();
  }
  return outcome;
}

std::vector<std::string> run_directories(std::span<const RunSpec> specs) {
  std::map<std::string, std::size_t> uses;
  std::vector<std::string> out;
  out.reserve(specs.size());
  for (const RunSpec& s : specs) {
    const std::size_t n = ++uses[s.scenario];
    out.push_back(n == 1 ? s.scenario : s.scenario + "-" + std::to_string(n));
  }
  return out;
}

int run_batch(std::span<const RunSpec> specs, const BatchOptions& options,
              std::ostream* log) {
  std::vector<RunSpec> runs(specs.begin(), specs.end());
  if (options.seed_override) {
    for (RunSpec& r : runs) r.seed = *options.seed_override;
  }
  const std::vector<std::string> dirs = run_directories(runs);
  std::vector<char> ok(runs.size(), 0);
  std::vector<std::string> errors(runs.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < runs.size(); i = next++) {
      RunOutcome outcome = execute_run(runs[i]);
      try {
        emit_report(outcome, options.out_dir / dirs[i]);
      } catch (const std::exception& e) {
        outcome.ok = false;
        outcome.error = std::string("writing artifacts: ") + e.what();
      }
      ok[i] = outcome.ok ? 1 : 0;
      errors[i] = outcome.error;
    }
  };

  const std::size_t n_threads = std::min(std::max<std::size_t>(options.workers, 1), runs.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }

  int status = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (log) {
      *log << dirs[i] << ": " << (ok[i] ? "ok" : "FAILED");
      if (!ok[i]) *log << " (" << errors[i] << ")";
      *log << '\n';
    }
    if (!ok[i]) status = 1;
  }
  return status;
}

}  // namespace flowanchor
