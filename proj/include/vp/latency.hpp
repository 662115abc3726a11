#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace vp {

/// Measured per-variant service times (ms) and link parameters for speedup
/// estimation. Defaults are the profiled values of the six smallest
/// variants, the width-1.0 baseline, and the measured link estimate.
struct LatencyModel {
  std::map<int, double> variant_compute_ms{{1, 17.0}, {2, 26.5}, {3, 38.0},
                                           {4, 53.0}, {5, 71.0}, {6, 91.0}};
  double baseline_compute_ms = 226.0;
  double aggregate_ms = 0.05;
  double rtt_ms = 2.0;
  double bandwidth_bps = 1e6;
  std::int64_t input_bytes = 150528;  // 3 * 224^2

  /// Tabulated compute time; throws InvalidArgumentError for unknown
  /// variants.
  double compute_ms_for(int variant_index) const;
};

struct SpeedupRow {
  int variant_index = 0;
  double compute_ms = 0.0;
  double compute_only_speedup = 0.0;   // baseline / compute
  double response_ms = 0.0;            // compute + 2 * rtt
  double rtt_adjusted_speedup = 0.0;   // baseline / response
  double output_transfer_ms = 0.0;     // reported separately, not folded in
};

/// Scatter-gather estimate for a variant set: the slowest member bounds the
/// response; input transfer cost is reported separately because the
/// response-time model deliberately excludes it.
struct SpeedupTable {
  std::vector<SpeedupRow> rows;
  double set_slowest_compute_ms = 0.0;
  double set_response_ms = 0.0;  // slowest compute + 2 * rtt
  double set_speedup = 0.0;
  double input_transfer_ms = 0.0;
  double aggregate_ms = 0.0;
};

SpeedupTable estimate_latency(const LatencyModel& model, std::span<const int> variant_set,
                              int k = 2, int num_classes = 101);

struct BandwidthRow {
  int k = 0;
  int num_classes = 0;
  std::int64_t size_law = 0;      // paper accounting (1-byte indices)
  std::int64_t wire_bytes = 0;    // actual entry bytes (u16 indices past 256)
  std::int64_t dense_bytes = 0;   // fp_size * C, the uncompressed transfer
  double ratio_vs_dense = 0.0;
  double ratio_vs_class_split_low = 0.0;   // vs 10 floats per node
  double ratio_vs_class_split_high = 0.0;  // vs 20 floats per node
};

/// Per-variant payload size h(k) against the dense transfer and against a
/// class-split scheme returning 10-20 floats per node.
std::vector<BandwidthRow> bandwidth_report(std::span<const int> k_values,
                                           std::span<const int> class_counts, int fp_size = 4);

}  // namespace vp
