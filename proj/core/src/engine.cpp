#include "flowanchor/engine.hpp"

#include <cmath>

#include "flowanchor/diagnostics.hpp"
#include "flowanchor/error.hpp"

namespace flowanchor {

namespace {

void require_mask_matches(const EditMask& mask, const Shape5& dims,
                          const char* what) {
  if (!(mask.dims() == MaskDims{dims.frames, dims.height, dims.width})) {
    throw ShapeError(std::string(what) + ": mask dims do not match latent (F,H,W) of " +
                     dims.to_string());
  }
}

}  // namespace

VideoLatent couple_target(const VideoLatent& z_edit, const VideoLatent& z_src,
                          const VideoLatent& x_src) {
  require_same_shape(z_edit, z_src, "couple_target");
  require_same_shape(z_edit, x_src, "couple_target");
  VideoLatent out = z_edit;
  auto dst = out.mutable_data();
  auto s = z_src.data();
  auto x = x_src.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const double offset = static_cast<double>(dst[i]) - static_cast<double>(x[i]);
    dst[i] = static_cast<float>(offset + static_cast<double>(s[i]));
  }
  return out;
}

VideoLatent blend_baseline(const VideoLatent& z_edit, const VideoLatent& reference,
                           const EditMask& mask) {
  require_same_shape(z_edit, reference, "blend_baseline");
  const Shape5& d = z_edit.dims();
  require_mask_matches(mask, d, "blend_baseline");
  const std::size_t plane = d.voxels();
  VideoLatent out = z_edit;
  auto dst = out.mutable_data();
  auto ref = reference.data();
  for (std::size_t bc = 0; bc < d.batch * d.channels; ++bc) {
    for (std::size_t k = 0; k < plane; ++k) {
      if (!mask[k]) dst[bc * plane + k] = ref[bc * plane + k];
    }
  }
  return out;
}

RngStream step_stream(std::uint64_t seed, std::size_t step) {
  return RngStream(derive_seed(seed, step));
}

EditingSignal editing_signal(const VideoLatent& z_edit, const VideoLatent& x_src,
                             double t, const EditConfig& cfg,
                             const VelocityRegistry& velocity,
                             std::span<const VideoLatent> noises,
                             const DrawObserver& observer, std::size_t step) {
  if (noises.empty()) throw ValueError("editing_signal: need at least one noise draw");
  require_same_shape(z_edit, x_src, "editing_signal");

  EditingSignal out;
  const bool use_sar =
      cfg.sar.enabled && cfg.target_condition != cfg.source_condition;
  AttentionHook hook;
  if (use_sar) {
    hook = [&cfg, t](const AttentionMaps& logits, std::size_t layer) {
      return apply_sar(logits, cfg.mask, cfg.target_tokens, cfg.sar, t, cfg.grid, layer);
    };
    out.sar_applied = t >= cfg.sar.tau_fraction * cfg.grid.t_max() &&
                      (!cfg.sar.layers || !cfg.sar.layers->empty());
  }

  std::vector<double> sum(z_edit.numel(), 0.0);
  for (std::size_t k = 0; k < noises.size(); ++k) {
    const VideoLatent z_src = interpolate_source(x_src, noises[k], t);
    const VideoLatent z_tar = couple_target(z_edit, z_src, x_src);
    if (observer) observer(DrawTrace{step, k, x_src, z_edit, z_src, z_tar});

    VelocityResult tar = velocity.evaluate(
        VelocityQuery{z_tar, t, cfg.target_condition, hook});
    const VideoLatent v_src =
        velocity.velocity(VelocityQuery{z_src, t, cfg.source_condition, {}});
    const auto vt = tar.velocity.data();
    const auto vs = v_src.data();
    for (std::size_t i = 0; i < sum.size(); ++i) {
      sum[i] += static_cast<double>(vt[i]) - static_cast<double>(vs[i]);
    }
    for (auto& m : tar.attention) out.target_attention.push_back(std::move(m));
  }

  // Filled in place: a non-finite signal must reach run_edit's step check
  // rather than fail construction.
  const double inv_n = 1.0 / static_cast<double>(noises.size());
  out.dv = VideoLatent::zeros(z_edit.dims());
  auto dv = out.dv.mutable_data();
  for (std::size_t i = 0; i < sum.size(); ++i) {
    dv[i] = static_cast<float>(sum[i] * inv_n);
  }
  return out;
}

EditingSignal editing_signal(const VideoLatent& z_edit, const VideoLatent& x_src,
                             double t, const EditConfig& cfg,
                             const VelocityRegistry& velocity, RngStream& rng,
                             const DrawObserver& observer, std::size_t step) {
  if (cfg.n_avg < 1) throw ValueError("n_avg must be >= 1");
  std::vector<VideoLatent> noises;
  noises.reserve(cfg.n_avg);
  for (std::size_t k = 0; k < cfg.n_avg; ++k) {
    noises.push_back(sample_gaussian(rng, x_src.dims()));
  }
  return editing_signal(z_edit, x_src, t, cfg, velocity, noises, observer, step);
}

EditResult run_edit(const VideoLatent& x_src, const EditConfig& cfg,
                    const VelocityRegistry& velocity, const DrawObserver& observer) {
  const Shape5& dims = x_src.dims();
  if (cfg.n_avg < 1) throw ValueError("n_avg must be >= 1");
  cfg.sar.validate();
  cfg.amm.validate();
  require_mask_matches(cfg.mask, dims, "run_edit");
  velocity.backend_for(cfg.source_condition);
  velocity.backend_for(cfg.target_condition);

  EditResult out;
  EditReport& report = out.report;
  report.gamma_f = cfg.amm.enabled ? gamma_f(cfg.amm, dims.frames) : 0.0;
  report.active_steps = cfg.grid.active_steps();
  report.binarize_threshold = cfg.binarize_threshold;
  if (cfg.sar.enabled && cfg.mask.empty_region()) {
    report.warnings.push_back(
        "edit mask is empty: spatio-temporal modulation suppresses target tokens everywhere");
  }

  VideoLatent z = x_src;
  const std::size_t T = cfg.grid.steps();
  for (std::size_t i = T; i >= 1; --i) {
    if (T - i < cfg.grid.skip()) continue;
    const double t = cfg.grid.at(i);
    const double t_next = cfg.grid.at(i - 1);

    RngStream rng = step_stream(cfg.seed, i);
    std::vector<VideoLatent> noises;
    noises.reserve(cfg.n_avg);
    for (std::size_t k = 0; k < cfg.n_avg; ++k) {
      noises.push_back(sample_gaussian(rng, dims));
    }
    EditingSignal signal =
        editing_signal(z, x_src, t, cfg, velocity, noises, observer, i);

    std::optional<ContrastMap> contrast;
    VideoLatent dv_amm = signal.dv;
    if (report.gamma_f != 0.0) {
      contrast = contrast_map(signal.dv, cfg.amm.epsilon);
      dv_amm = modulate(signal.dv, *contrast, report.gamma_f);
    }

    z = axpy(z, t_next - t, dv_amm);
    if (cfg.baseline_blend) {
      z = blend_baseline(z, interpolate_source(x_src, noises.front(), t_next), cfg.mask);
    }
    if (!z.all_finite()) {
      throw NonFiniteError(i, "editing state became non-finite at grid step " +
                                  std::to_string(i));
    }

    if (cfg.record_history) {
      StepRecord rec;
      rec.index = i;
      rec.t = t;
      rec.t_next = t_next;
      rec.sar_active = signal.sar_applied;
      MagnitudeStats raw = magnitude_stats(signal.dv);
      rec.mean_abs_raw = raw.mean_abs;
      rec.per_frame_mean_abs_raw = std::move(raw.per_frame_mean_abs);
      rec.mean_abs_amm = magnitude_stats(dv_amm).mean_abs;
      rec.iou = signal_iou(signal.dv, cfg.mask, cfg.binarize_threshold, cfg.amm.epsilon);
      if (cfg.record_contrast_maps) {
        rec.contrast = contrast ? std::move(*contrast)
                                : contrast_map(signal.dv, cfg.amm.epsilon);
      }
      report.steps.push_back(std::move(rec));
    }
  }
  out.result = std::move(z);
  return out;
}

}  // namespace flowanchor
