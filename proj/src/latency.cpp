#include "vp/latency.hpp"

#include <algorithm>
#include <string>

#include "vp/codec.hpp"
#include "vp/errors.hpp"
#include "vp/frame.hpp"

namespace vp {

double LatencyModel::compute_ms_for(int variant_index) const {
  const auto it = variant_compute_ms.find(variant_index);
  if (it == variant_compute_ms.end()) {
    throw InvalidArgumentError("no compute time tabulated for variant " +
                               std::to_string(variant_index));
  }
  return it->second;
}

SpeedupTable estimate_latency(const LatencyModel& model, std::span<const int> variant_set,
                              int k, int num_classes) {
  if (variant_set.empty()) throw InvalidArgumentError("variant set must be non-empty");

  SpeedupTable table;
  table.aggregate_ms = model.aggregate_ms;
  table.input_transfer_ms =
      static_cast<double>(model.input_bytes) * 8.0 / model.bandwidth_bps * 1e3;

  const std::int64_t response_frame_bytes =
      static_cast<std::int64_t>(kFrameHeaderBytes + kCodecPrefixBytes) +
      encoded_entry_bytes(k, num_classes);

  for (const int v : variant_set) {
    SpeedupRow row;
    row.variant_index = v;
    row.compute_ms = model.compute_ms_for(v);
    row.compute_only_speedup = model.baseline_compute_ms / row.compute_ms;
    row.response_ms = row.compute_ms + 2.0 * model.rtt_ms;
    row.rtt_adjusted_speedup = model.baseline_compute_ms / row.response_ms;
    row.output_transfer_ms =
        static_cast<double>(response_frame_bytes) * 8.0 / model.bandwidth_bps * 1e3;
    table.set_slowest_compute_ms = std::max(table.set_slowest_compute_ms, row.compute_ms);
    table.rows.push_back(row);
  }
  table.set_response_ms = table.set_slowest_compute_ms + 2.0 * model.rtt_ms;
  table.set_speedup = model.baseline_compute_ms / table.set_response_ms;
  return table;
}

std::vector<BandwidthRow> bandwidth_report(std::span<const int> k_values,
                                           std::span<const int> class_counts, int fp_size) {
  std::vector<BandwidthRow> rows;
  for (const int c : class_counts) {
    for (const int k : k_values) {
      if (k < 1 || k > c) continue;
      BandwidthRow row;
      row.k = k;
      row.num_classes = c;
      row.size_law = size_law_bytes(k, c, fp_size);
      row.wire_bytes = encoded_entry_bytes(k, c, fp_size);
      row.dense_bytes = static_cast<std::int64_t>(fp_size) * c;
      row.ratio_vs_dense = static_cast<double>(row.dense_bytes) / row.wire_bytes;
      row.ratio_vs_class_split_low = static_cast<double>(10 * fp_size) / row.wire_bytes;
      row.ratio_vs_class_split_high = static_cast<double>(20 * fp_size) / row.wire_bytes;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace vp
