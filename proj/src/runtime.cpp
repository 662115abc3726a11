#include "vp/runtime.hpp"

#include "vp/errors.hpp"

namespace vp {

int SessionConfig::num_classes() const {
  if (!workers.empty()) return workers.front().variant.num_classes;
  if (master_variant) return master_variant->variant.num_classes;
  throw InvalidArgumentError("session has no configured variants");
}

std::vector<VariantTraits> SessionConfig::configured_traits() const {
  std::vector<VariantTraits> traits;
  traits.reserve(workers.size() + (master_variant ? 1 : 0));
  for (const auto& w : workers) {
    traits.push_back({w.variant.index, w.variant.input_resolution, w.variant.width_factor});
  }
  if (master_variant) {
    const auto& m = master_variant->variant;
    traits.push_back({m.index, m.input_resolution, m.width_factor});
  }
  return traits;
}

std::vector<int> SessionConfig::configured_variant_ids() const {
  std::vector<int> ids;
  for (const auto& t : configured_traits()) ids.push_back(t.variant_id);
  return ids;
}

const EnsembleResult& require_result(const MasterReport& report) {
  if (!report.result) {
    throw NoResultError("request " + std::to_string(report.request_id) +
                        ": window closed with zero contributions");
  }
  return *report.result;
}

std::vector<std::uint8_t> worker_response_payload(const Predictor& predictor, int k,
                                                  std::span<const std::uint8_t> input_blob) {
  std::int64_t sample_id = 0;
  int true_class = 0;
  decode_sample_blob(input_blob, sample_id, true_class);
  const PredictionVector prediction = predictor.predict({sample_id, true_class});
  return encode(compress_topk(prediction, k));
}

std::optional<EnsembleResult> aggregate_arrivals(const SessionConfig& session,
                                                 std::span<const CompressedPrediction> arrived) {
  if (arrived.empty()) return std::nullopt;
  const std::vector<int> ids = session.configured_variant_ids();
  const std::vector<VariantTraits> traits = session.configured_traits();
  const ScatterTensor tensor = decompress_scatter(arrived, ids, session.num_classes());
  const ScalingContext ctx = make_scaling_context(traits, session.alpha);
  return aggregate(tensor, traits, ctx, session.absent_mode);
}

}  // namespace vp
