#include "flowanchor/sweep.hpp"

#include <charconv>
#include <ostream>

#include "flowanchor/error.hpp"

namespace flowanchor {

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw Error("format_double: conversion failed");
  return std::string(buf, ptr);
}

SweepResult frame_sweep(const LatentFamily& sources, const MaskFamily& masks,
                        const EditConfig& base, const VelocityRegistry& velocity,
                        std::span<const std::size_t> frame_counts) {
  SweepResult out;
  for (std::size_t frames : frame_counts) {
    if (frames == 0) throw ValueError("frame_sweep: frame counts must be >= 1");
    const VideoLatent x_src = sources(frames);
    if (x_src.dims().frames != frames) {
      throw ShapeError("frame_sweep: family returned " +
                       std::to_string(x_src.dims().frames) + " frames for F=" +
                       std::to_string(frames));
    }
    EditConfig cfg = base;
    cfg.record_history = true;
    cfg.record_contrast_maps = false;
    cfg.mask = masks(MaskDims{frames, x_src.dims().height, x_src.dims().width});
    const EditResult run = run_edit(x_src, cfg, velocity);

    SweepSummary summary{frames, 0.0, 0.0, run.report.gamma_f};
    for (const StepRecord& rec : run.report.steps) {
      out.rows.push_back({frames, rec.index, rec.mean_abs_raw, rec.iou,
                          run.report.gamma_f});
      summary.mean_abs += rec.mean_abs_raw;
      summary.iou += rec.iou;
    }
    if (!run.report.steps.empty()) {
      const double n = static_cast<double>(run.report.steps.size());
      summary.mean_abs /= n;
      summary.iou /= n;
    }
    out.summary.push_back(summary);
  }
  return out;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << "F,step,mean_abs,iou,gamma_f\n";
  for (const SweepRow& r : rows) {
    out << r.frames << ',' << r.step << ',' << format_double(r.mean_abs) << ','
        << format_double(r.iou) << ',' << format_double(r.gamma_f) << '\n';
  }
}

}  // namespace flowanchor
