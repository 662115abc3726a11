#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "vp/ensemble.hpp"
#include "vp/errors.hpp"
#include "vp/predictors.hpp"

using namespace vp;

namespace {

CalibrationProfile profile_of(int variant_id, double target, std::uint64_t seed = 42) {
  CalibrationProfile p;
  p.variant_id = variant_id;
  p.target_top1 = target;
  p.seed = seed;
  return p;
}

struct TempFixture {
  std::filesystem::path path;
  explicit TempFixture(const std::string& contents) {
    path = std::filesystem::temp_directory_path() /
           ("vp_fixture_" + std::to_string(::getpid()) + "_" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)) + ".txt");
    std::ofstream out(path);
    out << contents;
  }
  ~TempFixture() { std::filesystem::remove(path); }
};

}  // namespace

TEST_CASE("predictions are normalized probability vectors") {
  const PredictorPtr predictor = calibrate(profile_of(1, 0.9), 10);
  for (int s = 0; s < 200; ++s) {
    const PredictionVector v = predictor->predict({s, s % 10});
    REQUIRE(v.scores.size() == 10);
    CHECK(v.scores.minCoeff() >= 0.0f);
    CHECK(std::abs(v.scores.cast<double>().sum() - 1.0) <= 1e-6);
  }
}

TEST_CASE("identical keys give bitwise-identical vectors") {
  const PredictorPtr a = calibrate(profile_of(3, 0.93, 7), 10);
  const PredictorPtr b = calibrate(profile_of(3, 0.93, 7), 10);
  for (int s = 0; s < 100; ++s) {
    const PredictionVector va = a->predict({s, s % 10});
    const PredictionVector vb = b->predict({s, s % 10});
    for (int c = 0; c < 10; ++c) CHECK(va.scores[c] == vb.scores[c]);
  }
  // Different variant id or seed changes the stream.
  const PredictorPtr other = calibrate(profile_of(4, 0.93, 7), 10);
  bool any_difference = false;
  for (int s = 0; s < 100; ++s) {
    const PredictionVector va = a->predict({s, s % 10});
    const PredictionVector vo = other->predict({s, s % 10});
    for (int c = 0; c < 10; ++c) any_difference |= va.scores[c] != vo.scores[c];
  }
  CHECK(any_difference);
}

TEST_CASE("a perfect target always ranks the true class first") {
  const PredictorPtr predictor = calibrate(profile_of(1, 1.0), 10);
  for (int s = 0; s < 500; ++s) {
    const PredictionVector v = predictor->predict({s, s % 10});
    CHECK(argmax(v.scores) == s % 10);
  }
}

TEST_CASE("measured accuracy converges to the calibration target") {
  // 99% binomial interval at n=10000, p=0.9176: about +-0.72pp. The
  // acceptance band is the looser documented +-1.5pp.
  const double target = 0.9176;
  const PredictorPtr predictor = calibrate(profile_of(1, target), 10);
  int hits = 0;
  const int n = 10000;
  for (int s = 0; s < n; ++s) {
    const LabeledSample sample{s, s % 10};
    hits += argmax(predictor->predict(sample).scores) == sample.true_class ? 1 : 0;
  }
  const double measured = static_cast<double>(hits) / n;
  CHECK(std::abs(measured - target) <= 0.015);
}

TEST_CASE("high targets also calibrate") {
  const double target = 0.9946;
  const PredictorPtr predictor = calibrate(profile_of(5, target), 10);
  int hits = 0;
  const int n = 10000;
  for (int s = 0; s < n; ++s) {
    hits += argmax(predictor->predict({s, s % 10}).scores) == s % 10 ? 1 : 0;
  }
  CHECK(std::abs(static_cast<double>(hits) / n - target) <= 0.005);
}

TEST_CASE("winning scores sit in a plausible confidence band") {
  const PredictorPtr predictor = calibrate(profile_of(1, 0.92), 10);
  double total = 0.0;
  const int n = 2000;
  for (int s = 0; s < n; ++s) {
    const PredictionVector v = predictor->predict({s, s % 10});
    total += v.scores.maxCoeff();
  }
  const double mean_winner = total / n;
  CHECK(mean_winner > 0.4);
  CHECK(mean_winner < 0.8);
}

TEST_CASE("chance-level targets are rejected") {
  CHECK_THROWS_AS(calibrate(profile_of(1, 0.5), 2), InvalidCalibrationError);
  CHECK_THROWS_AS(calibrate(profile_of(1, 0.05), 10), InvalidCalibrationError);
  CHECK_THROWS_AS(calibrate(profile_of(1, 1.2), 10), InvalidCalibrationError);
  CHECK_NOTHROW(calibrate(profile_of(1, 0.9946), 10));
  CalibrationProfile bad = profile_of(1, 0.9);
  bad.concentration = 0.0;
  CHECK_THROWS_AS(calibrate(bad, 10), InvalidCalibrationError);
}

TEST_CASE("error events across variant ids are independent beyond chance") {
  // Chi-square independence test on the 2x2 hit/miss table of two variants
  // sharing a profile. 99.9% critical value at 1 dof: 10.83.
  const PredictorPtr a = calibrate(profile_of(1, 0.9), 10);
  const PredictorPtr b = calibrate(profile_of(2, 0.9), 10);
  const int n = 10000;
  int table[2][2] = {{0, 0}, {0, 0}};
  for (int s = 0; s < n; ++s) {
    const LabeledSample sample{s, s % 10};
    const int hit_a = argmax(a->predict(sample).scores) == sample.true_class ? 1 : 0;
    const int hit_b = argmax(b->predict(sample).scores) == sample.true_class ? 1 : 0;
    ++table[hit_a][hit_b];
  }
  double chi2 = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double row = table[i][0] + table[i][1];
      const double col = table[0][j] + table[1][j];
      const double expected = row * col / n;
      const double diff = table[i][j] - expected;
      chi2 += diff * diff / expected;
    }
  }
  CHECK(chi2 < 10.83);
}

TEST_CASE("fixture predictor serves stored rows read-through") {
  const TempFixture fixture(
      "C=6\n"
      "0.04 0.51 0.03 0.40 0.01 0.01\n"
      "0.9 0.02 0.02 0.02 0.02 0.02\n"
      "0.1 0.1 0.1 0.1 0.1 0.5\n");
  const PredictorPtr predictor = load_fixture(fixture.path.string(), 6, 2);
  CHECK(predictor->num_classes() == 6);
  CHECK(predictor->variant_id() == 2);

  const PredictionVector v = predictor->predict({0, 3});
  CHECK(v.scores[1] == doctest::Approx(0.51).epsilon(1e-6));
  CHECK(v.scores[3] == doctest::Approx(0.40).epsilon(1e-6));
  // Already normalized on file: values read through unchanged.
  CHECK(std::abs(v.scores.cast<double>().sum() - 1.0) <= 1e-6);

  // Top-2 of the stored row.
  const CompressedPrediction pred = compress_topk(v, 2);
  CHECK(pred.indices == std::vector<std::uint16_t>{1, 3});

  CHECK_NOTHROW(predictor->predict({2, 0}));
  CHECK_THROWS_AS(predictor->predict({99, 0}), MissingFixtureError);
  CHECK_THROWS_WITH_AS(predictor->predict({99, 0}), doctest::Contains("99"),
                       MissingFixtureError);
}

TEST_CASE("unnormalized fixture rows are normalized on load") {
  const TempFixture fixture(
      "C=3\n"
      "2 1 1\n");
  const PredictorPtr predictor = load_fixture(fixture.path.string(), 3);
  const PredictionVector v = predictor->predict({0, 0});
  CHECK(v.scores[0] == doctest::Approx(0.5));
  CHECK(v.scores[1] == doctest::Approx(0.25));
}

TEST_CASE("fixture format violations name the offending row") {
  const TempFixture short_row(
      "C=6\n"
      "0.04 0.51 0.03 0.40 0.01 0.01\n"
      "0.9 0.02 0.02 0.02 0.02\n");
  CHECK_THROWS_WITH_AS(load_fixture(short_row.path.string(), 6), doctest::Contains("row 1"),
                       FixtureFormatError);

  const TempFixture bad_header("K=6\n0.5 0.5\n");
  CHECK_THROWS_AS(load_fixture(bad_header.path.string(), 6), FixtureFormatError);

  const TempFixture wrong_c("C=4\n0.25 0.25 0.25 0.25\n");
  CHECK_THROWS_AS(load_fixture(wrong_c.path.string(), 6), FixtureFormatError);

  CHECK_THROWS_AS(load_fixture("/nonexistent/vp_fixture.txt", 6), FixtureFormatError);
}
