#pragma once

#include <string>
#include <vector>

namespace flowanchor {

struct SelfTestCheck {
  std::string name;
  bool ok = false;
  std::string detail;
};

/// Fast built-in invariant checks on small synthetic inputs.
std::vector<SelfTestCheck> run_selftest();

}  // namespace flowanchor
