#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flowanchor/config.hpp"
#include "flowanchor/engine.hpp"
#include "flowanchor/mask.hpp"
#include "flowanchor/sweep.hpp"

namespace flowanchor {

inline constexpr int kReportSchemaVersion = 1;

/// Outcome of one run, as written to its output directory.
struct RunOutcome {
  RunSpec spec;
  bool ok = false;
  std::string error;
  std::optional<EditResult> edit;
  /// Metric name -> value, emitted in key order.
  std::map<std::string, double> metrics;
  std::map<std::string, std::string> metrics_skipped;
};

/// Report JSON: fixed key order, shortest round-trip floats, trailing newline.
std::string report_json(const RunOutcome& outcome);

/// Per-step rows in the sweep CSV layout for a single run.
std::vector<SweepRow> diagnostics_rows(const EditReport& report, std::size_t frames);

/// Quantizes round(255 * c) with frames stacked vertically: (F*H) x W.
GrayImage contrast_to_pgm(const ContrastMap& map, std::size_t sample);

/// Writes report.json, diagnostics.csv, result.fatn (on success) and the
/// contrast PGMs (when recorded) into `dir`, creating it if needed.
void emit_report(const RunOutcome& outcome, const std::filesystem::path& dir);

}  // namespace flowanchor
