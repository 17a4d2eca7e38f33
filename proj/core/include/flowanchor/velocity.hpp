#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "flowanchor/attention_maps.hpp"
#include "flowanchor/latent.hpp"

namespace flowanchor {

/// Names a prompt condition (source P or target P*) registered with a backend.
struct ConditionId {
  std::string name;

  bool operator==(const ConditionId&) const = default;
  auto operator<=>(const ConditionId&) const = default;
};

/// Transforms the pre-softmax logits of attention layer `layer`. Must be pure.
using AttentionHook =
    std::function<AttentionMaps(const AttentionMaps& logits, std::size_t layer)>;

struct VelocityQuery {
  const VideoLatent& state;
  double time = 0.0;
  ConditionId condition;
  AttentionHook attention_hook;  // empty: no hook
};

struct VelocityResult {
  VideoLatent velocity;
  /// Post-hook, post-softmax maps indexed [layer * batch + sample]; empty for
  /// backends without attention.
  std::vector<AttentionMaps> attention;
};

class VelocityBackend {
 public:
  virtual ~VelocityBackend() = default;

  virtual std::string_view kind() const noexcept = 0;
  virtual bool has_condition(const ConditionId& id) const = 0;
  virtual VelocityResult evaluate(const VelocityQuery& query) const = 0;
};

/// Dispatches velocity queries to whichever backend owns the condition.
class VelocityRegistry {
 public:
  void add(std::shared_ptr<const VelocityBackend> backend);

  bool has_condition(const ConditionId& id) const;
  /// Throws UnknownConditionError.
  const VelocityBackend& backend_for(const ConditionId& id) const;

  VelocityResult evaluate(const VelocityQuery& query) const;
  VideoLatent velocity(const VelocityQuery& query) const;

 private:
  std::vector<std::shared_ptr<const VelocityBackend>> backends_;
};

}  // namespace flowanchor
