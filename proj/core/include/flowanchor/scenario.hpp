#pragma once

#include <optional>

#include "flowanchor/config.hpp"
#include "flowanchor/engine.hpp"
#include "flowanchor/velocity.hpp"

namespace flowanchor {

class UnknownBackendError : public Error {
 public:
  using Error::Error;
};

/// Everything needed to execute one RunSpec.
struct Scenario {
  VelocityRegistry velocity;
  EditConfig config;
  VideoLatent source;
};

/// Registers the source and target conditions of spec.backend for latents
/// with `channels` channels. When source and target share a name only the
/// source parameters are registered. Throws UnknownBackendError.
VelocityRegistry make_registry(const RunSpec& spec, std::size_t channels);

/// The source latent: synthesized (gaussian: mu_src + s_src * N; otherwise
/// N(0, 1)) or loaded from io.source. `frames` overrides the frame count; a
/// loaded tensor is truncated to its first `frames` frames.
VideoLatent make_source(const RunSpec& spec, std::optional<std::size_t> frames = {});

EditMask make_mask(const RunSpec& spec, const MaskDims& dims);

EditConfig make_edit_config(const RunSpec& spec, EditMask mask);

Scenario build_scenario(const RunSpec& spec);

}  // namespace flowanchor
