#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "irs/channel_model.hpp"

namespace irs {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Quick oracle and invariant checks on small random instances drawn around
/// `scenario`'s geometry. Used by the CLI's validate subcommand.
std::vector<CheckResult> run_self_checks(const Scenario& scenario, std::uint64_t seed);

}  // namespace irs
