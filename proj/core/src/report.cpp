#include "flowanchor/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "flowanchor/error.hpp"
#include "flowanchor/tensor_io.hpp"
#include "json.hpp"

namespace flowanchor {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json config_echo(const RunSpec& spec) {
  ordered_json root = ordered_json::object();
  ordered_json* section = &root;
  std::istringstream in(emit_config(spec));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '[') {
      const std::string name = line.substr(1, line.size() - 2);
      root[name] = ordered_json::object();
      section = &root[name];
      continue;
    }
    const auto eq = line.find(" = ");
    (*section)[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return root;
}

}  // namespace

std::string report_json(const RunOutcome& outcome) {
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["scenario"] = outcome.spec.scenario;
  j["status"] = outcome.ok ? "ok" : "failed";
  j["error"] = outcome.ok ? ordered_json(nullptr) : ordered_json(outcome.error);
  j["config"] = config_echo(outcome.spec);

  ordered_json edit = ordered_json::object();
  ordered_json steps = ordered_json::array();
  if (outcome.edit) {
    const EditReport& r = outcome.edit->report;
    edit["gamma_f"] = r.gamma_f;
    edit["active_steps"] = r.active_steps;
    edit["binarize_rule"] =
        "channel-mean |dv|, per-sample min-max normalized, value > threshold";
    edit["binarize_threshold"] = r.binarize_threshold;
    edit["warnings"] = r.warnings;
    for (const StepRecord& s : r.steps) {
      ordered_json row;
      row["index"] = s.index;
      row["t"] = s.t;
      row["t_next"] = s.t_next;
      row["sar_active"] = s.sar_active;
      row["mean_abs_raw"] = s.mean_abs_raw;
      row["mean_abs_amm"] = s.mean_abs_amm;
      row["iou_raw"] = s.iou;
      row["per_frame_mean_abs_raw"] = s.per_frame_mean_abs_raw;
      steps.push_back(std::move(row));
    }
  }
  j["edit"] = std::move(edit);
  j["steps"] = std::move(steps);

  ordered_json metrics = ordered_json::object();
  for (const auto& [name, value] : outcome.metrics) metrics[name] = value;
  j["metrics"] = std::move(metrics);
  ordered_json skipped = ordered_json::object();
  for (const auto& [name, why] : outcome.metrics_skipped) skipped[name] = why;
  j["metrics_skipped"] = std::move(skipped);
  return j.dump(2) + "\n";
}

std::vector<SweepRow> diagnostics_rows(const EditReport& report, std::size_t frames) {
  std::vector<SweepRow> rows;
  rows.reserve(report.steps.size());
  for (const StepRecord& s : report.steps) {
    rows.push_back({frames, s.index, s.mean_abs_raw, s.iou, report.gamma_f});
  }
  return rows;
}

GrayImage contrast_to_pgm(const ContrastMap& map, std::size_t sample) {
  const Shape5& d = map.dims;
  if (sample >= d.batch) throw ValueError("contrast_to_pgm: sample out of range");
  GrayImage img{d.width, d.frames * d.height, {}};
  img.pixels.resize(img.width * img.height);
  for (std::size_t k = 0; k < d.voxels(); ++k) {
    const double c = std::clamp(map.at(sample, k), 0.0, 1.0);
    img.pixels[k] = static_cast<std::uint8_t>(std::lround(c * 255.0));
  }
  return img;
}

void emit_report(const RunOutcome& outcome, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "report.json", std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError(FormatError::Kind::kIo, "cannot write report.json");
    out << report_json(outcome);
  }
  {
    std::ofstream out(dir / "diagnostics.csv", std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError(FormatError::Kind::kIo, "cannot write diagnostics.csv");
    std::vector<SweepRow> rows;
    if (outcome.edit) {
      rows = diagnostics_rows(outcome.edit->report, outcome.edit->result.dims().frames);
    }
    write_sweep_csv(out, rows);
  }
  if (!outcome.edit) return;
  if (outcome.ok) save_tensor(outcome.edit->result, dir / "result.fatn");
  for (const StepRecord& s : outcome.edit->report.steps) {
    if (!s.contrast) continue;
    for (std::size_t b = 0; b < s.contrast->dims.batch; ++b) {
      char name[64];
      std::snprintf(name, sizeof(name), "contrast_b%zu_step%03zu.pgm", b, s.index);
      write_pgm(dir / name, contrast_to_pgm(*s.contrast, b));
    }
  }
}

}  // namespace flowanchor
