#include "vp/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vp/errors.hpp"

namespace vp {

ScalingContext make_scaling_context(std::span<const VariantTraits> traits, double alpha) {
  ScalingContext ctx;
  ctx.alpha = alpha;
  for (const auto& t : traits) {
    ctx.resolutions.push_back(t.resolution);
    ctx.width_factors.push_back(t.width_factor);
  }
  return ctx;
}

double scale_factor(int resolution, double width_factor, const ScalingContext& ctx) {
  if (ctx.resolutions.empty() || ctx.width_factors.empty()) {
    throw InvalidContextError("scaling context has empty resolution or width sets");
  }
  if (std::find(ctx.resolutions.begin(), ctx.resolutions.end(), resolution) ==
      ctx.resolutions.end()) {
    throw InvalidArgumentError("resolution " + std::to_string(resolution) +
                               " not in the session's resolution set");
  }
  if (std::find(ctx.width_factors.begin(), ctx.width_factors.end(), width_factor) ==
      ctx.width_factors.end()) {
    throw InvalidArgumentError("width factor not in the session's width set");
  }
  const int max_resolution = *std::max_element(ctx.resolutions.begin(), ctx.resolutions.end());
  const double min_width = *std::min_element(ctx.width_factors.begin(), ctx.width_factors.end());
  return (static_cast<double>(resolution) / max_resolution) *
         std::pow(width_factor / min_width, ctx.alpha);
}

EnsembleResult aggregate(const ScatterTensor& tensor, std::span<const VariantTraits> traits,
                         const ScalingContext& ctx, AbsentClassMode mode) {
  if (static_cast<Eigen::Index>(traits.size()) != tensor.rows()) {
    throw InvalidArgumentError("traits not row-aligned with the scatter tensor");
  }

  EnsembleResult result;
  VectorD acc = VectorD::Zero(tensor.cols());
  // Row order, not arrival order: keeps the float sum identical between
  // transports and under input permutation.
  for (Eigen::Index row = 0; row < tensor.rows(); ++row) {
    if (!tensor.row_present[row]) continue;
    const VectorD scores = tensor.scores.row(row).transpose().cast<double>();
    VectorD probs;
    if (mode == AbsentClassMode::MaskToNegInf) {
      probs = masked_softmax(scores, tensor.received.row(row).transpose());
    } else {
      probs = softmax(scores);
    }
    const auto& t = traits[static_cast<std::size_t>(row)];
    acc += scale_factor(t.resolution, t.width_factor, ctx) * probs;
    result.contributing_variant_ids.push_back(t.variant_id);
  }
  if (result.contributing_variant_ids.empty()) {
    throw NoResultError("no rows present: nothing to aggregate");
  }
  result.combined = softmax(acc);
  result.top1 = argmax(result.combined);
  return result;
}

}  // namespace vp
