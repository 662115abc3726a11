#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vp/rng.hpp"
#include "vp/runtime.hpp"

namespace vp {

/// Star-topology link model. Defaults follow the measured estimate the
/// session targets: RTT 2 ms, 1 Mbit/s.
struct SimNetConfig {
  double rtt_ms = 2.0;
  double bandwidth_bps = 1e6;
  std::uint64_t seed = 0;
};

/// Failure/slowdown/drop schedule for one worker.
struct FaultEntry {
  std::optional<double> fail_stop_at_ms;  // dead from this instant on
  double slowdown_factor = 1.0;           // multiplies compute time, >= 1
  double drop_probability = 0.0;          // per delivery, in [0, 1)
  double extra_latency_mean_ms = 0.0;     // exponential jitter per delivery
};

/// Per-worker schedules, index-aligned with the session's worker list.
/// Missing entries mean a healthy worker.
struct FaultPlan {
  std::vector<FaultEntry> workers;

  const FaultEntry& entry(std::size_t worker_index) const {
    static const FaultEntry healthy{};
    return worker_index < workers.size() ? workers[worker_index] : healthy;
  }
};

struct Delivery {
  bool dropped = false;
  double latency_ms = 0.0;
};

/// One-way delivery: rtt/2 + serialization (payload_bytes * 8 / bandwidth)
/// + sampled extra latency; dropped with the entry's drop probability.
/// Deterministic given the rng state.
Delivery simulate_delivery(const SimNetConfig& config, std::int64_t payload_bytes,
                           const FaultEntry& entry, SplitMix64& rng);

/// A session bound to the in-process network: per-worker compute times
/// (Table-style service model; scaled by the fault plan's slowdown) plus
/// link parameters and fault schedules.
struct SimSession {
  SessionConfig session;
  std::vector<double> worker_compute_ms;  // aligned with session.workers
  double master_compute_ms = 0.0;
  SimNetConfig net;
  FaultPlan faults;
};

/// Virtual-clock master: multicast at t=0, collect response arrivals
/// through the deadline window, aggregate the arrived subset (plus the
/// master's own prediction when it finishes inside the window). Runs the
/// real frame/codec path on every hop. Deterministic given
/// (net.seed, faults, session, request).
MasterReport run_master(const SimSession& sim, const InferenceRequest& request);

}  // namespace vp
