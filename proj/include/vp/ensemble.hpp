#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "vp/codec.hpp"
#include "vp/types.hpp"

namespace vp {

/// Numerically stabilized softmax (max-subtraction); strictly
/// order-preserving, output sums to 1.
template <typename Derived>
Vector<typename Derived::Scalar> softmax(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  Vector<Scalar> out = (v.array() - v.maxCoeff()).exp();
  out /= out.sum();
  return out;
}

/// Softmax over the masked-in entries only; masked-out classes get exactly 0.
template <typename Derived>
Vector<typename Derived::Scalar> masked_softmax(const Eigen::MatrixBase<Derived>& v,
                                                const ArrayXb& mask) {
  using Scalar = typename Derived::Scalar;
  Scalar hi = std::numeric_limits<Scalar>::lowest();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (mask[i] && v[i] > hi) hi = v[i];
  }
  Vector<Scalar> out = Vector<Scalar>::Zero(v.size());
  Scalar total = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!mask[i]) continue;
    out[i] = std::exp(v[i] - hi);
    total += out[i];
  }
  out /= total;
  return out;
}

/// Index of the largest entry; ties resolve to the lowest index.
template <typename Derived>
int argmax(const Eigen::MatrixBase<Derived>& v) {
  int best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = static_cast<int>(i);
  }
  return best;
}

/// True iff `true_class` is among the m highest-scoring classes, with ties
/// broken toward the lower index.
template <typename Derived>
bool top_m_hit(const Eigen::MatrixBase<Derived>& scores, int true_class, int m) {
  const auto target = scores[true_class];
  int better = 0;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    if (scores[i] > target || (scores[i] == target && i < true_class)) ++better;
  }
  return better < m;
}

/// Capacity proxy inputs of one participating variant.
struct VariantTraits {
  int variant_id = 0;
  int resolution = 0;
  double width_factor = 1.0;
};

/// The resolution set P and width-factor set D of a session's configured
/// variants, plus the exponent balancing their influence.
struct ScalingContext {
  std::vector<int> resolutions;
  std::vector<double> width_factors;
  double alpha = 1.0;
};

ScalingContext make_scaling_context(std::span<const VariantTraits> traits, double alpha);

/// Row weight (rho_i / max P) * (d_i / min D)^alpha. Requires rho_i in P and
/// d_i in D; throws InvalidContextError on empty sets.
double scale_factor(int resolution, double width_factor, const ScalingContext& ctx);

enum class AbsentClassMode {
  IncludeZeros,   // softmax over the whole scattered row, zeros included
  MaskToNegInf,   // softmax only over the classes a row actually carried
};

struct EnsembleResult {
  VectorD combined;  // valid probability distribution
  std::vector<int> contributing_variant_ids;
  int top1 = 0;
};

/// Combination pipeline: per present row softmax -> scale -> elementwise sum
/// -> final softmax -> argmax. Absent rows contribute nothing; zero present
/// rows throw NoResultError. `traits` is row-aligned with the tensor.
EnsembleResult aggregate(const ScatterTensor& tensor, std::span<const VariantTraits> traits,
                         const ScalingContext& ctx,
                         AbsentClassMode mode = AbsentClassMode::IncludeZeros);

}  // namespace vp
