#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "vp/types.hpp"

namespace vp {

/// Stand-in for a trained variant: maps a sample to a normalized confidence
/// vector. Implementations are immutable after construction; concurrent
/// predict calls are fine.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual int num_classes() const = 0;
  virtual int variant_id() const = 0;
  virtual PredictionVector predict(const LabeledSample& sample) const = 0;
};

using PredictorPtr = std::shared_ptr<const Predictor>;

/// Accuracy target and noise shape for one synthetic variant. Distinct
/// variant_ids give independent error streams under the same seed.
struct CalibrationProfile {
  int variant_id = 0;
  double target_top1 = 0.9;
  double concentration = 0.3;        // sharpness of the simplex draw
  double runnerup_truth_prob = 0.5;  // on a miss, chance the true class ranks second
  std::uint64_t seed = 0;
};

/// Synthetic predictor whose long-run top-1 accuracy converges to
/// target_top1. Deterministic: identical (seed, sample_id, variant_id) give
/// bitwise-identical vectors. Throws InvalidCalibrationError when
/// target_top1 is not in (1/C, 1].
PredictorPtr calibrate(const CalibrationProfile& profile, int num_classes);

/// File-backed predictor. Format: one header line "C=<int>", then one line
/// per sample of C whitespace-separated scores; sample_id is the line index.
/// Rows are normalized on load. Throws FixtureFormatError (with the row
/// number) on malformed input; predict throws MissingFixtureError for
/// unknown sample ids.
PredictorPtr load_fixture(const std::string& path, int num_classes, int variant_id = 0);

}  // namespace vp
