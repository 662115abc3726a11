#include "vp/predictors.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include "vp/errors.hpp"
#include "vp/rng.hpp"

namespace vp {

namespace {

class SyntheticPredictor final : public Predictor {
 public:
  SyntheticPredictor(const CalibrationProfile& profile, int num_classes)
      : profile_(profile), num_classes_(num_classes) {}

  int num_classes() const override { return num_classes_; }
  int variant_id() const override { return profile_.variant_id; }

  PredictionVector predict(const LabeledSample& sample) const override {
    if (sample.true_class < 0 || sample.true_class >= num_classes_) {
      throw InvalidArgumentError("true_class out of range");
    }
    SplitMix64 rng(mix_key(profile_.seed, static_cast<std::uint64_t>(profile_.variant_id),
                           static_cast<std::uint64_t>(sample.sample_id)));

    VectorD scores(num_classes_);
    for (int c = 0; c < num_classes_; ++c) scores[c] = sample_gamma(rng, profile_.concentration);
    const bool correct = rng.uniform() < profile_.target_top1;
    const double u_wrong = rng.uniform();
    const double u_runnerup = rng.uniform();

    int winner = sample.true_class;
    if (!correct) {
      winner = static_cast<int>(u_wrong * (num_classes_ - 1));
      if (winner >= sample.true_class) ++winner;
    }
    swap_rank(scores, 0, winner);
    if (!correct && u_runnerup < profile_.runnerup_truth_prob) {
      swap_rank(scores, 1, sample.true_class);
    }

    scores /= scores.sum();
    PredictionVector out;
    out.variant_id = profile_.variant_id;
    out.scores = scores.cast<float>();
    return out;
  }

 private:
  // Moves the element of the given rank (0 = largest) to `target` by value
  // swap. Rank 1 lookups skip the current maximum.
  static void swap_rank(VectorD& scores, int rank, int target) {
    int skip = -1;
    if (rank == 1) {
      skip = 0;
      for (int c = 1; c < scores.size(); ++c) {
        if (scores[c] > scores[skip]) skip = c;
      }
    }
    int at = -1;
    for (int c = 0; c < scores.size(); ++c) {
      if (c == skip) continue;
      if (at < 0 || scores[c] > scores[at]) at = c;
    }
    if (at != target) std::swap(scores[at], scores[target]);
  }

  CalibrationProfile profile_;
  int num_classes_;
};

class FixturePredictor final : public Predictor {
 public:
  FixturePredictor(MatrixF rows, int variant_id)
      : rows_(std::move(rows)), variant_id_(variant_id) {}

  int num_classes() const override { return static_cast<int>(rows_.cols()); }
  int variant_id() const override { return variant_id_; }

  PredictionVector predict(const LabeledSample& sample) const override {
    if (sample.sample_id < 0 || sample.sample_id >= rows_.rows()) {
      throw MissingFixtureError("fixture has no sample " + std::to_string(sample.sample_id) +
                                " (holds " + std::to_string(rows_.rows()) + " rows)");
    }
    PredictionVector out;
    out.variant_id = variant_id_;
    out.scores = rows_.row(sample.sample_id).transpose();
    return out;
  }

 private:
  MatrixF rows_;
  int variant_id_;
};

}  // namespace

PredictorPtr calibrate(const CalibrationProfile& profile, int num_classes) {
  if (num_classes < 2) throw InvalidCalibrationError("num_classes must be at least 2");
  if (profile.target_top1 <= 1.0 / num_classes || profile.target_top1 > 1.0) {
    throw InvalidCalibrationError("target_top1 must be in (1/C, 1]: chance level or worse "
                                  "is unsupported");
  }
  if (profile.concentration <= 0.0) throw InvalidCalibrationError("concentration must be positive");
  if (profile.runnerup_truth_prob < 0.0 || profile.runnerup_truth_prob > 1.0) {
    throw InvalidCalibrationError("runnerup_truth_prob must be in [0, 1]");
  }
  return std::make_shared<SyntheticPredictor>(profile, num_classes);
}

PredictorPtr load_fixture(const std::string& path, int num_classes, int variant_id) {
  std::ifstream in(path);
  if (!in) throw FixtureFormatError("cannot open fixture file: " + path);

  std::string line;
  if (!std::getline(in, line) || line.rfind("C=", 0) != 0) {
    throw FixtureFormatError("fixture header must be \"C=<int>\"");
  }
  int file_classes = 0;
  try {
    file_classes = std::stoi(line.substr(2));
  } catch (const std::exception&) {
    throw FixtureFormatError("fixture header must be \"C=<int>\"");
  }
  if (file_classes != num_classes) {
    throw FixtureFormatError("fixture declares C=" + std::to_string(file_classes) +
                             " but the session expects C=" + std::to_string(num_classes));
  }

  std::vector<VectorF> rows;
  int row_number = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    VectorD row(num_classes);
    int got = 0;
    double value;
    while (fields >> value) {
      if (got < num_classes) row[got] = value;
      ++got;
    }
    if (got != num_classes) {
      throw FixtureFormatError("row " + std::to_string(row_number) + ": expected " +
                               std::to_string(num_classes) + " values, got " +
                               std::to_string(got));
    }
    if (row.minCoeff() < 0.0) {
      throw FixtureFormatError("row " + std::to_string(row_number) + ": negative score");
    }
    const double total = row.sum();
    if (total <= 0.0) {
      throw FixtureFormatError("row " + std::to_string(row_number) + ": all-zero row");
    }
    row /= total;
    rows.push_back(row.cast<float>());
    ++row_number;
  }

  MatrixF data(static_cast<Eigen::Index>(rows.size()), num_classes);
  for (std::size_t r = 0; r < rows.size(); ++r) data.row(static_cast<Eigen::Index>(r)) = rows[r];
  return std::make_shared<FixturePredictor>(std::move(data), variant_id);
}

}  // namespace vp
