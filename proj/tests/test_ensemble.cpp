#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <bit>
#include <cmath>
#include <vector>

#include "vp/codec.hpp"
#include "vp/ensemble.hpp"
#include "vp/errors.hpp"
#include "vp/rng.hpp"

using namespace vp;

namespace {

VectorD random_scores(SplitMix64& rng, int n) {
  VectorD v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.uniform() * 10.0 - 5.0;
  return v;
}

ScatterTensor dense_tensor(const std::vector<VectorF>& rows) {
  ScatterTensor t;
  const Eigen::Index v = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index c = rows.empty() ? 0 : rows.front().size();
  t.scores = MatrixF::Zero(v, c);
  t.received = MaskMatrix::Constant(v, c, true);
  t.row_present = ArrayXb::Constant(v, true);
  for (Eigen::Index r = 0; r < v; ++r) t.scores.row(r) = rows[static_cast<std::size_t>(r)];
  return t;
}

}  // namespace

TEST_CASE("softmax of a constant vector is uniform") {
  VectorD v = VectorD::Zero(3);
  const VectorD p = softmax(v);
  for (int i = 0; i < 3; ++i) CHECK(p[i] == doctest::Approx(1.0 / 3.0));
  CHECK(p.sum() == doctest::Approx(1.0));
}

TEST_CASE("softmax preserves the argmax and ordering of random vectors") {
  SplitMix64 rng(7);
  for (int t = 0; t < 200; ++t) {
    const VectorD v = random_scores(rng, 2 + static_cast<int>(rng.below(30)));
    const VectorD p = softmax(v);
    CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(p.minCoeff() >= 0.0);
    CHECK(argmax(p) == argmax(v));
    for (int i = 0; i + 1 < v.size(); ++i) {
      CHECK((v[i] < v[i + 1]) == (p[i] < p[i + 1]));
    }
  }
}

TEST_CASE("softmax stays finite under extreme logits") {
  VectorD v(2);
  v << 1000.0, 0.0;
  const VectorD p = softmax(v);
  CHECK(std::isfinite(p[0]));
  CHECK(std::isfinite(p[1]));
  // High-precision reference: 1 / (1 + e^-1000) is 1 to double precision,
  // the complement exactly 0 after underflow.
  CHECK(p[0] == doctest::Approx(1.0));
  CHECK(p[1] == doctest::Approx(0.0).epsilon(1e-300));
}

TEST_CASE("scale factor follows the capacity formula") {
  ScalingContext ctx;
  ctx.resolutions = {96, 128, 160, 192, 224};
  ctx.width_factors = {0.35};
  ctx.alpha = 1.0;

  SUBCASE("uniform sessions scale by one") {
    ScalingContext uniform;
    uniform.resolutions = {224};
    uniform.width_factors = {0.35};
    CHECK(scale_factor(224, 0.35, uniform) == doctest::Approx(1.0));
  }
  SUBCASE("resolution ratio") {
    // 96/224 with d at the set minimum: hand-computed 0.428571...
    CHECK(scale_factor(96, 0.35, ctx) == doctest::Approx(96.0 / 224.0).epsilon(1e-12));
  }
  SUBCASE("width ratio") {
    ScalingContext mixed;
    mixed.resolutions = {96, 224};
    mixed.width_factors = {0.35, 0.5};
    mixed.alpha = 1.0;
    // 0.5/0.35 at max resolution: hand-computed 1.428571...
    CHECK(scale_factor(224, 0.5, mixed) == doctest::Approx(0.5 / 0.35).epsilon(1e-12));
  }
  SUBCASE("alpha exponent") {
    ScalingContext mixed;
    mixed.resolutions = {224};
    mixed.width_factors = {0.35, 0.7};
    mixed.alpha = 2.0;
    CHECK(scale_factor(224, 0.7, mixed) == doctest::Approx(4.0));
  }
  SUBCASE("membership is enforced") {
    CHECK_THROWS_AS(scale_factor(100, 0.35, ctx), InvalidArgumentError);
    CHECK_THROWS_AS(scale_factor(96, 0.4, ctx), InvalidArgumentError);
  }
  SUBCASE("empty context") {
    ScalingContext empty;
    CHECK_THROWS_AS(scale_factor(96, 0.35, empty), InvalidContextError);
  }
}

TEST_CASE("scaling never changes a row's ranking") {
  SplitMix64 rng(11);
  ScalingContext ctx;
  ctx.resolutions = {96, 224};
  ctx.width_factors = {0.35, 0.5};
  for (int t = 0; t < 100; ++t) {
    const VectorD v = random_scores(rng, 10);
    const double s = scale_factor(96, 0.5, ctx);
    CHECK(s > 0.0);
    const VectorD scaled = s * v;
    CHECK(argmax(scaled) == argmax(v));
  }
}

TEST_CASE("single present row keeps that variant's decision") {
  const PredictionVector v{1, (VectorF(4) << 0.1f, 0.6f, 0.2f, 0.1f).finished()};
  const CompressedPrediction pred = compress_topk(v, 2);
  const std::vector<CompressedPrediction> preds{pred};
  const std::vector<int> ids{1};
  const ScatterTensor tensor = decompress_scatter(preds, ids, 4);
  const std::vector<VariantTraits> traits{{1, 96, 0.35}};
  const ScalingContext ctx = make_scaling_context(traits, 1.0);

  const EnsembleResult result = aggregate(tensor, traits, ctx);
  CHECK(result.top1 == 1);
  CHECK(result.contributing_variant_ids == std::vector<int>{1});
  CHECK(result.combined.sum() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("unanimous one-hot rows elect the shared class") {
  std::vector<VectorF> rows(2, VectorF::Zero(5));
  rows[0][3] = 1.0f;
  rows[1][3] = 1.0f;
  const ScatterTensor tensor = dense_tensor(rows);
  const std::vector<VariantTraits> traits{{1, 96, 0.35}, {2, 128, 0.35}};
  const ScalingContext ctx = make_scaling_context(traits, 1.0);
  CHECK(aggregate(tensor, traits, ctx).top1 == 3);
}

TEST_CASE("aggregate is invariant to arrival order") {
  SplitMix64 rng(23);
  for (int t = 0; t < 50; ++t) {
    std::vector<CompressedPrediction> preds;
    std::vector<int> ids;
    std::vector<VariantTraits> traits;
    const int resolutions[] = {96, 128, 160, 192, 224};
    for (int i = 0; i < 5; ++i) {
      PredictionVector v;
      v.variant_id = i + 1;
      v.scores = VectorF(10);
      for (int c = 0; c < 10; ++c) v.scores[c] = static_cast<float>(rng.uniform());
      v.scores /= v.scores.sum();
      preds.push_back(compress_topk(v, 2));
      ids.push_back(i + 1);
      traits.push_back({i + 1, resolutions[i], 0.35});
    }
    const ScalingContext ctx = make_scaling_context(traits, 1.0);
    const EnsembleResult forward =
        aggregate(decompress_scatter(preds, ids, 10), traits, ctx);
    std::vector<CompressedPrediction> reversed(preds.rbegin(), preds.rend());
    const EnsembleResult backward =
        aggregate(decompress_scatter(reversed, ids, 10), traits, ctx);
    CHECK(forward.top1 == backward.top1);
    for (int c = 0; c < 10; ++c) CHECK(forward.combined[c] == backward.combined[c]);
  }
}

TEST_CASE("any non-empty subset of rows aggregates cleanly") {
  SplitMix64 rng(31);
  const int resolutions[] = {96, 128, 160, 192, 224};
  std::vector<VariantTraits> traits;
  for (int i = 0; i < 5; ++i) traits.push_back({i + 1, resolutions[i], 0.35});
  const ScalingContext ctx = make_scaling_context(traits, 1.0);

  for (int mask = 1; mask < 32; ++mask) {
    std::vector<CompressedPrediction> preds;
    for (int i = 0; i < 5; ++i) {
      if (!(mask & (1 << i))) continue;
      PredictionVector v;
      v.variant_id = i + 1;
      v.scores = VectorF(10);
      for (int c = 0; c < 10; ++c) v.scores[c] = static_cast<float>(rng.uniform());
      v.scores /= v.scores.sum();
      preds.push_back(compress_topk(v, 2));
    }
    const std::vector<int> ids{1, 2, 3, 4, 5};
    const EnsembleResult result =
        aggregate(decompress_scatter(preds, ids, 10), traits, ctx);
    CHECK(static_cast<int>(result.contributing_variant_ids.size()) == std::popcount(
              static_cast<unsigned>(mask)));
    CHECK(result.combined.sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(result.combined.minCoeff() >= 0.0);
  }
}

TEST_CASE("zero present rows is the no-result condition") {
  const std::vector<VariantTraits> traits{{1, 96, 0.35}};
  const ScalingContext ctx = make_scaling_context(traits, 1.0);
  const ScatterTensor tensor = decompress_scatter({}, 1, 10);
  CHECK_THROWS_AS(aggregate(tensor, traits, ctx), NoResultError);
}

TEST_CASE("duplicating an agreeing row never flips the decision") {
  std::vector<VectorF> rows;
  VectorF a(4);
  a << 0.1f, 0.2f, 0.6f, 0.1f;
  VectorF b(4);
  b << 0.05f, 0.25f, 0.65f, 0.05f;
  rows = {a, b, a};  // duplicate of the first
  const ScatterTensor tensor = dense_tensor(rows);
  const std::vector<VariantTraits> traits{{1, 96, 0.35}, {2, 128, 0.35}, {3, 160, 0.35}};
  const ScalingContext ctx = make_scaling_context(traits, 1.0);
  CHECK(aggregate(tensor, traits, ctx).top1 == 2);
}

TEST_CASE("masked aggregation ignores classes a row never carried") {
  CompressedPrediction pred;
  pred.variant_id = 1;
  pred.k = 2;
  pred.num_classes = 6;
  pred.indices = {1, 3};
  pred.values = {0.51f, 0.40f};
  const std::vector<CompressedPrediction> preds{pred};
  const std::vector<int> ids{1};
  const ScatterTensor tensor = decompress_scatter(preds, ids, 6);
  const std::vector<VariantTraits> traits{{1, 96, 0.35}};
  const ScalingContext ctx = make_scaling_context(traits, 1.0);

  const EnsembleResult masked = aggregate(tensor, traits, ctx, AbsentClassMode::MaskToNegInf);
  CHECK(masked.top1 == 1);
  // Classes outside {1, 3} received no mass before the final softmax, so
  // they end up exactly uniform under it; the kept pair stays ordered.
  CHECK(masked.combined[1] > masked.combined[3]);
  CHECK(masked.combined[3] > masked.combined[0]);
  CHECK(masked.combined[0] == doctest::Approx(masked.combined[2]));
}

TEST_CASE("top-m membership with tie handling") {
  VectorF one_hot = VectorF::Zero(5);
  one_hot[2] = 1.0f;
  for (int m = 1; m <= 5; ++m) CHECK(top_m_hit(one_hot, 2, m));

  VectorF fig(6);
  fig << 0.0f, 0.51f, 0.0f, 0.40f, 0.0f, 0.0f;
  CHECK(top_m_hit(fig, 3, 2));
  CHECK_FALSE(top_m_hit(fig, 3, 1));
  CHECK(top_m_hit(fig, 1, 1));

  SplitMix64 rng(5);
  for (int t = 0; t < 50; ++t) {
    const VectorD v = random_scores(rng, 8);
    CHECK(top_m_hit(v, static_cast<int>(rng.below(8)), 8));  // m = C always hits
  }

  // Ties resolve toward the lower index.
  VectorF tied(4);
  tied << 0.4f, 0.4f, 0.1f, 0.1f;
  CHECK(top_m_hit(tied, 0, 1));
  CHECK_FALSE(top_m_hit(tied, 1, 1));
  CHECK(top_m_hit(tied, 1, 2));
}
