#pragma once

#include <Eigen/Core>

#include <cstdint>

namespace vp {

template <typename Scalar>
using Vector = Eigen::Vector<Scalar, Eigen::Dynamic>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using VectorF = Vector<float>;
using VectorD = Vector<double>;
using MatrixF = Matrix<float>;
using MatrixD = Matrix<double>;
using ArrayXb = Eigen::Array<bool, Eigen::Dynamic, 1>;
using MaskMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Dense confidence scores from one variant for one input. Workers emit
/// these normalized: entries >= 0, sum == 1 within 1e-6.
struct PredictionVector {
  int variant_id = 0;
  VectorF scores;
};

/// Ground-truth carrier for synthetic experiments.
struct LabeledSample {
  std::int64_t sample_id = 0;
  int true_class = 0;
};

}  // namespace vp
