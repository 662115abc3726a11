#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vp/codec.hpp"
#include "vp/ensemble.hpp"
#include "vp/frame.hpp"
#include "vp/predictors.hpp"
#include "vp/variant_catalog.hpp"

namespace vp {

/// One node's share of the session: which variant it runs and with what.
struct WorkerAssignment {
  VariantSpec variant;
  PredictorPtr predictor;  // null on a master that only coordinates
};

/// Session-wide contract shared by master and workers.
struct SessionConfig {
  std::vector<WorkerAssignment> workers;
  std::optional<WorkerAssignment> master_variant;
  int k = 2;
  double alpha = 1.0;
  AbsentClassMode absent_mode = AbsentClassMode::IncludeZeros;

  int num_classes() const;
  /// Traits of every configured variant: workers in order, then the
  /// master's own, when present.
  std::vector<VariantTraits> configured_traits() const;
  std::vector<int> configured_variant_ids() const;
};

struct InferenceRequest {
  std::uint64_t request_id = 0;
  std::vector<std::uint8_t> input_blob;
  double deadline_window_ms = 100.0;
};

enum class SlotStatus {
  Responded,    // arrived within the window
  Late,         // arrived after the window; discarded
  Dropped,      // lost in transit
  FailStopped,  // worker dead before finishing
  NoResponse,   // nothing came back (hang, connection loss, error reply)
};

struct SlotOutcome {
  int worker_index = -1;  // -1 marks the master's own slot
  int variant_id = 0;
  SlotStatus status = SlotStatus::NoResponse;
  std::optional<double> arrival_ms;  // relative to the multicast instant
};

/// What run_master hands back: the aggregate (absent when nothing
/// contributed) plus the per-worker timing report.
struct MasterReport {
  std::uint64_t request_id = 0;
  std::optional<EnsembleResult> result;
  std::vector<SlotOutcome> workers;
  bool master_contributed = false;
  double window_ms = 0.0;
  double completed_at_ms = 0.0;
};

/// Unwraps the aggregate or throws NoResultError (the total-failure case).
const EnsembleResult& require_result(const MasterReport& report);

/// Worker-side request handling: decode the sample blob, predict, compress
/// with the session k, encode. Shared by the simulated and socket workers.
std::vector<std::uint8_t> worker_response_payload(const Predictor& predictor, int k,
                                                  std::span<const std::uint8_t> input_blob);

/// Master-side finalize: scatter the arrived predictions into the
/// configured variant rows and run the combination pipeline. Returns
/// nothing when zero rows are present. Deterministic in row order, so two
/// transports delivering the same arrival set produce identical results.
std::optional<EnsembleResult> aggregate_arrivals(const SessionConfig& session,
                                                 std::span<const CompressedPrediction> arrived);

}  // namespace vp
