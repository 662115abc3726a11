#include "vp/simnet.hpp"

#include <algorithm>

#include "vp/errors.hpp"

namespace vp {

Delivery simulate_delivery(const SimNetConfig& config, std::int64_t payload_bytes,
                           const FaultEntry& entry, SplitMix64& rng) {
  // Fixed draw order keeps streams stable regardless of outcome.
  const double u_drop = rng.uniform();
  const double extra = sample_exponential(rng, entry.extra_latency_mean_ms);
  if (u_drop < entry.drop_probability) return {true, 0.0};
  const double serialization_ms =
      static_cast<double>(payload_bytes) * 8.0 / config.bandwidth_bps * 1e3;
  return {false, config.rtt_ms / 2.0 + serialization_ms + extra};
}

MasterReport run_master(const SimSession& sim, const InferenceRequest& request) {
  const SessionConfig& session = sim.session;
  if (session.workers.empty() && !session.master_variant) {
    throw InvalidArgumentError("session has no configured variants");
  }
  if (sim.worker_compute_ms.size() != session.workers.size()) {
    throw InvalidArgumentError("worker_compute_ms not aligned with session workers");
  }

  const double window = request.deadline_window_ms;
  MasterReport report;
  report.request_id = request.request_id;
  report.window_ms = window;

  const std::vector<std::uint8_t> request_frame =
      encode_frame({MsgType::Request, request.request_id, request.input_blob});

  std::vector<CompressedPrediction> arrived;
  double last_arrival = 0.0;
  bool all_answered = true;

  for (std::size_t w = 0; w < session.workers.size(); ++w) {
    const auto& assignment = session.workers[w];
    const FaultEntry& fault = sim.faults.entry(w);
    SlotOutcome outcome;
    outcome.worker_index = static_cast<int>(w);
    outcome.variant_id = assignment.variant.index;

    SplitMix64 out_rng(mix_key(sim.net.seed, request.request_id, w, 0));
    SplitMix64 back_rng(mix_key(sim.net.seed, request.request_id, w, 1));

    const Delivery to_worker = simulate_delivery(
        sim.net, static_cast<std::int64_t>(request_frame.size()), fault, out_rng);
    if (to_worker.dropped) {
      outcome.status = SlotStatus::Dropped;
      report.workers.push_back(outcome);
      all_answered = false;
      continue;
    }
    const double at_worker = to_worker.latency_ms;
    const double done = at_worker + sim.worker_compute_ms[w] * fault.slowdown_factor;
    if (fault.fail_stop_at_ms && *fault.fail_stop_at_ms <= done) {
      // Dead on arrival or preempted mid-compute: no response ever.
      outcome.status = SlotStatus::FailStopped;
      report.workers.push_back(outcome);
      all_answered = false;
      continue;
    }

    // Full wire path, in memory.
    const std::vector<std::uint8_t> payload =
        worker_response_payload(*assignment.predictor, session.k, request.input_blob);
    const std::vector<std::uint8_t> response_frame =
        encode_frame({MsgType::Response, request.request_id, payload});

    const Delivery to_master = simulate_delivery(
        sim.net, static_cast<std::int64_t>(response_frame.size()), fault, back_rng);
    if (to_master.dropped) {
      outcome.status = SlotStatus::Dropped;
      report.workers.push_back(outcome);
      all_answered = false;
      continue;
    }
    const double arrival = done + to_master.latency_ms;
    outcome.arrival_ms = arrival;
    if (arrival <= window) {
      outcome.status = SlotStatus::Responded;
      const Frame frame = decode_frame(response_frame);
      arrived.push_back(decode(frame.payload));
      last_arrival = std::max(last_arrival, arrival);
    } else {
      outcome.status = SlotStatus::Late;
      all_answered = false;
    }
    report.workers.push_back(outcome);
  }

  if (session.master_variant && session.master_variant->predictor) {
    // Computes concurrently with the collection window.
    if (sim.master_compute_ms <= window) {
      arrived.push_back(decode(worker_response_payload(*session.master_variant->predictor,
                                                       session.k, request.input_blob)));
      report.master_contributed = true;
      last_arrival = std::max(last_arrival, sim.master_compute_ms);
    } else {
      all_answered = false;
    }
  }

  report.result = aggregate_arrivals(session, arrived);
  report.completed_at_ms = all_answered ? last_arrival : window;
  return report;
}

}  // namespace vp
