#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "vp/experiments.hpp"

namespace vp {

/// Everything a CLI run needs; all fields have working defaults.
struct HarnessConfig {
  SessionSpec session;
  SimNetConfig net;
  FaultPlan faults;
  LatencyModel latency;
  double deadline_ms = 100.0;
  double reserve_ms = 5.0;  // window = deadline - reserve

  double window_ms() const { return deadline_ms - reserve_ms; }
};

/// Parses the documented JSON schema; unknown keys are rejected, missing
/// ones keep their defaults.
HarnessConfig parse_config(const std::string& json_text);
HarnessConfig load_config_file(const std::string& path);

/// VP_SEED environment override; applied to every seed a run uses.
std::optional<std::uint64_t> seed_override_from_env();
void apply_seed_override(HarnessConfig& config);

}  // namespace vp
