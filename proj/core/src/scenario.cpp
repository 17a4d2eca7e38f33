#include "flowanchor/scenario.hpp"

#include "flowanchor/gaussian_backend.hpp"
#include "flowanchor/rng.hpp"
#include "flowanchor/tensor_io.hpp"
#include "flowanchor/toy_attention.hpp"

namespace flowanchor {

namespace {
constexpr std::uint64_t kSourceStream = 0x535243;  // "SRC"
constexpr std::uint64_t kValueStream = 0x56414C;   // "VAL"
}  // namespace

VelocityRegistry make_registry(const RunSpec& spec, std::size_t channels) {
  const BackendSpec& b = spec.backend;
  const ConditionId source{b.source};
  const ConditionId target{b.target};
  VelocityRegistry registry;
  if (b.kind == "gaussian") {
    auto backend = std::make_shared<GaussianBackend>();
    if (source != target) {
      backend->add_condition(target, GaussianCondition{b.target_mean, b.target_scale});
    }
    backend->add_condition(source, GaussianCondition{b.source_mean, b.source_scale});
    registry.add(std::move(backend));
  } else if (b.kind == "toy_attention") {
    ToyAttentionModel model(ToyAttentionParams{channels, b.tokens, b.key_dim, b.layers,
                                               b.temperature, b.model_seed});
    for (std::size_t j : spec.sar.target_tokens) {
      if (j >= b.tokens) {
        throw ConfigError("sar.target_tokens", "token " + std::to_string(j) +
                                                   " out of range for backend.tokens");
      }
    }
    const auto src_values = model.random_values(derive_seed(b.model_seed, kValueStream));
    auto backend = std::make_shared<ToyAttentionBackend>(model);
    if (source != target) {
      backend->add_condition(target, model.replace_rows(src_values, spec.sar.target_tokens,
                                                        b.target_value_seed));
    }
    backend->add_condition(source, src_values);
    registry.add(std::move(backend));
  } else {
    throw UnknownBackendError("unknown backend kind '" + b.kind + "'");
  }
  return registry;
}

VideoLatent make_source(const RunSpec& spec, std::optional<std::size_t> frames) {
  const BackendSpec& b = spec.backend;
  if (spec.io.source != "synth") {
    VideoLatent loaded = load_tensor(spec.io.source);
    if (!frames || *frames == loaded.dims().frames) return loaded;
    Shape5 d = loaded.dims();
    if (*frames > d.frames) {
      throw ValueError("source tensor has " + std::to_string(d.frames) +
                       " frames, " + std::to_string(*frames) + " requested");
    }
    Shape5 cut = d;
    cut.frames = *frames;
    VideoLatent out = VideoLatent::zeros(cut);
    for (std::size_t bi = 0; bi < d.batch; ++bi)
      for (std::size_t c = 0; c < d.channels; ++c)
        for (std::size_t f = 0; f < cut.frames; ++f)
          for (std::size_t h = 0; h < d.height; ++h)
            for (std::size_t w = 0; w < d.width; ++w)
              out.at(bi, c, f, h, w) = loaded.at(bi, c, f, h, w);
    return out;
  }

  const Shape5 dims{b.batch, b.channels, frames.value_or(b.frames), b.height, b.width};
  RngStream rng(derive_seed(spec.seed, kSourceStream));
  VideoLatent x = sample_gaussian(rng, dims);
  if (b.kind == "gaussian") {
    const GaussianCondition cond{b.source_mean, b.source_scale};
    const std::size_t plane = dims.voxels();
    auto data = x.mutable_data();
    for (std::size_t bi = 0; bi < dims.batch; ++bi) {
      for (std::size_t c = 0; c < dims.channels; ++c) {
        const double mu = channel_mean(cond, c, dims.channels);
        float* ch = data.data() + (bi * dims.channels + c) * plane;
        for (std::size_t k = 0; k < plane; ++k) {
          ch[k] = static_cast<float>(mu + cond.scale * static_cast<double>(ch[k]));
        }
      }
    }
  }
  return x;
}

EditMask make_mask(const RunSpec& spec, const MaskDims& dims) {
  const std::string& kind = spec.io.mask_kind;
  if (kind == "none") return EditMask::zeros(dims);
  if (kind == "all") return EditMask::ones(dims);
  if (kind == "center") {
    return EditMask::box(dims, 0, dims.frames, dims.height / 4, dims.height - dims.height / 4,
                         dims.width / 4, dims.width - dims.width / 4);
  }
  if (kind.rfind("box:", 0) == 0) {
    std::vector<std::size_t> v;
    std::string rest = kind.substr(4);
    std::size_t pos = 0;
    while (pos <= rest.size()) {
      const auto comma = rest.find(',', pos);
      v.push_back(std::stoul(rest.substr(pos, comma - pos)));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    return EditMask::box(dims, v.at(0), v.at(1), v.at(2), v.at(3), v.at(4), v.at(5));
  }
  std::vector<std::filesystem::path> paths(spec.io.mask_paths.begin(),
                                           spec.io.mask_paths.end());
  return load_mask(paths, dims);
}

EditConfig make_edit_config(const RunSpec& spec, EditMask mask) {
  EditConfig cfg;
  cfg.grid = TimeGrid::uniform(spec.grid.steps, spec.grid.skip);
  cfg.n_avg = spec.grid.n_avg;
  cfg.sar = spec.sar.config;
  cfg.amm = spec.amm;
  cfg.source_condition = ConditionId{spec.backend.source};
  cfg.target_condition = ConditionId{spec.backend.target};
  cfg.mask = std::move(mask);
  cfg.target_tokens = TargetTokenSet(spec.sar.target_tokens);
  cfg.seed = spec.seed;
  cfg.baseline_blend = spec.baseline_blend;
  cfg.record_history = spec.io.history;
  cfg.record_contrast_maps = spec.io.history && spec.io.contrast_pgm;
  cfg.binarize_threshold = spec.metrics.binarize_threshold;
  return cfg;
}

Scenario build_scenario(const RunSpec& spec) {
  VideoLatent source = make_source(spec);
  const Shape5& d = source.dims();
  VelocityRegistry registry = make_registry(spec, d.channels);
  EditConfig cfg = make_edit_config(spec, make_mask(spec, MaskDims{d.frames, d.height, d.width}));
  return Scenario{std::move(registry), std::move(cfg), std::move(source)};
}

}  // namespace flowanchor
