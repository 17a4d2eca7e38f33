#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "flowanchor/report.hpp"

namespace flowanchor {

/// Environment variable that overrides the default worker count.
inline constexpr const char* kWorkersEnv = "FLOWANCHOR_WORKERS";

struct BatchOptions {
  std::filesystem::path out_dir = "out";
  std::size_t workers = 1;
  std::optional<std::uint64_t> seed_override;
};

/// Worker count: explicit flag, else $FLOWANCHOR_WORKERS, else 1.
std::size_t resolve_workers(std::optional<std::size_t> flag);

/// Metrics selected in spec.metrics for an edited result against its source.
/// Metrics whose preconditions fail are recorded in metrics_skipped.
void evaluate_metrics(RunOutcome& outcome, const VideoLatent& source,
                      const VideoLatent& edited, const EditMask& mask);

/// Builds and runs one spec in memory. Never throws; failures land in
/// outcome.error.
RunOutcome execute_run(const RunSpec& spec);

/// Output directory names, one per spec: the scenario name, suffixed with
/// -2, -3, ... on collisions.
std::vector<std::string> run_directories(std::span<const RunSpec> specs);

/// Runs every spec on up to `workers` threads, writes per-run artifacts under
/// out_dir, and returns 0 iff every run finished with a finite state.
int run_batch(std::span<const RunSpec> specs, const BatchOptions& options,
              std::ostream* log = nullptr);

}  // namespace flowanchor
