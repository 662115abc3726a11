#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "vp/codec.hpp"
#include "vp/errors.hpp"
#include "vp/rng.hpp"

using namespace vp;

namespace {

PredictionVector make_vector(int variant_id, std::initializer_list<float> scores) {
  PredictionVector v;
  v.variant_id = variant_id;
  v.scores = VectorF(static_cast<Eigen::Index>(scores.size()));
  Eigen::Index i = 0;
  for (const float s : scores) v.scores[i++] = s;
  return v;
}

PredictionVector random_vector(SplitMix64& rng, int variant_id, int num_classes) {
  PredictionVector v;
  v.variant_id = variant_id;
  v.scores = VectorF(num_classes);
  double total = 0.0;
  for (int c = 0; c < num_classes; ++c) {
    v.scores[c] = static_cast<float>(rng.uniform());
    total += v.scores[c];
  }
  v.scores /= static_cast<float>(total);
  return v;
}

}  // namespace

TEST_CASE("compress keeps the k best pairs in score order") {
  const PredictionVector v = make_vector(3, {0.04f, 0.51f, 0.03f, 0.40f, 0.01f, 0.01f});
  const CompressedPrediction pred = compress_topk(v, 2);
  CHECK(pred.variant_id == 3);
  CHECK(pred.k == 2);
  CHECK(pred.num_classes == 6);
  CHECK(pred.indices == std::vector<std::uint16_t>{1, 3});
  CHECK(pred.values == std::vector<float>{0.51f, 0.40f});
}

TEST_CASE("compress with k equal to C keeps everything sorted") {
  const PredictionVector v = make_vector(0, {0.1f, 0.4f, 0.2f, 0.3f});
  const CompressedPrediction pred = compress_topk(v, 4);
  CHECK(pred.indices == std::vector<std::uint16_t>{1, 3, 2, 0});
  CHECK(pred.values == std::vector<float>{0.4f, 0.3f, 0.2f, 0.1f});
}

TEST_CASE("score ties break toward the lower class index") {
  const PredictionVector v = make_vector(0, {0.2f, 0.2f, 0.6f});
  const CompressedPrediction pred = compress_topk(v, 2);
  CHECK(pred.indices == std::vector<std::uint16_t>{2, 0});
}

TEST_CASE("k of 1 keeps only the argmax index") {
  const PredictionVector v = make_vector(0, {0.04f, 0.51f, 0.03f, 0.40f, 0.01f, 0.01f});
  const CompressedPrediction pred = compress_topk(v, 1);
  CHECK(pred.indices == std::vector<std::uint16_t>{1});
  CHECK(pred.values.empty());
}

TEST_CASE("k outside [1, C] is rejected") {
  const PredictionVector v = make_vector(0, {0.5f, 0.5f});
  CHECK_THROWS_AS(compress_topk(v, 0), InvalidArgumentError);
  CHECK_THROWS_AS(compress_topk(v, 3), InvalidArgumentError);
}

TEST_CASE("size law: ten bytes at k=2, one byte at k=1, capped at the dense size") {
  CHECK(size_law_bytes(2, 101, 4) == 10);
  CHECK(size_law_bytes(2, 1000, 4) == 10);
  CHECK(size_law_bytes(1, 6, 4) == 1);
  CHECK(size_law_bytes(1, 100000, 4) == 1);
  CHECK(size_law_bytes(6, 10, 4) == 30);  // min(30, 40)
  CHECK(size_law_bytes(9, 10, 4) == 40);  // dense wins
  CHECK(size_law_bytes(10, 10, 4) == 40);
  CHECK(size_law_bytes(2, 101, 2) == 6);
  CHECK(size_law_bytes(2, 101, 8) == 18);
}

TEST_CASE("size law is non-decreasing in k and capped") {
  for (const int c : {2, 10, 101, 256}) {
    std::int64_t prev = 0;
    for (int k = 1; k <= c; ++k) {
      const std::int64_t h = size_law_bytes(k, c, 4);
      CHECK(h >= prev);
      CHECK(h <= 4 * c);
      prev = h;
    }
  }
}

TEST_CASE("wide-index extension: two-byte indices past 256 classes") {
  CHECK(encoded_entry_bytes(2, 101, 4) == 10);
  CHECK(encoded_entry_bytes(2, 256, 4) == 10);
  CHECK(encoded_entry_bytes(2, 1000, 4) == 12);  // k * (fp + 2)
  CHECK(encoded_entry_bytes(1, 1000, 4) == 2);
  CHECK(encoded_entry_bytes(1, 256, 4) == 1);
}

TEST_CASE("golden wire bytes for the six-class k=2 example") {
  CompressedPrediction pred;
  pred.variant_id = 1;
  pred.k = 2;
  pred.num_classes = 6;
  pred.indices = {1, 3};
  pred.values = {0.51f, 0.40f};

  const std::vector<std::uint8_t> bytes = encode(pred);
  REQUIRE(bytes.size() == kCodecPrefixBytes + 10);

  // Prefix: variant 1, k 2, C 6 (u16 little-endian).
  CHECK(bytes[0] == 0x01);
  CHECK(bytes[1] == 0x02);
  CHECK(bytes[2] == 0x06);
  CHECK(bytes[3] == 0x00);
  // Entries: [idx 1][f32 0.51][idx 3][f32 0.40], little-endian IEEE-754.
  const std::uint8_t golden[10] = {0x01, 0x5C, 0x8F, 0x02, 0x3F,
                                   0x03, 0xCD, 0xCC, 0xCC, 0x3E};
  for (int i = 0; i < 10; ++i) {
    CAPTURE(i);
    CHECK(bytes[kCodecPrefixBytes + static_cast<std::size_t>(i)] == golden[i]);
  }

  CHECK(decode(bytes) == pred);
}

TEST_CASE("k=1 payload is a single index byte after the prefix") {
  CompressedPrediction pred;
  pred.variant_id = 2;
  pred.k = 1;
  pred.num_classes = 6;
  pred.indices = {4};
  const std::vector<std::uint8_t> bytes = encode(pred);
  REQUIRE(bytes.size() == kCodecPrefixBytes + 1);
  CHECK(bytes[kCodecPrefixBytes] == 0x04);
  CHECK(decode(bytes) == pred);
}

TEST_CASE("decode rejects malformed payloads") {
  CompressedPrediction pred;
  pred.variant_id = 1;
  pred.k = 2;
  pred.num_classes = 6;
  pred.indices = {1, 3};
  pred.values = {0.51f, 0.40f};
  std::vector<std::uint8_t> bytes = encode(pred);

  SUBCASE("truncated") {
    bytes.pop_back();
    CHECK_THROWS_AS(decode(bytes), CorruptPayloadError);
  }
  SUBCASE("trailing garbage") {
    bytes.push_back(0xFF);
    CHECK_THROWS_AS(decode(bytes), CorruptPayloadError);
  }
  SUBCASE("index out of range") {
    bytes[kCodecPrefixBytes] = 0x07;  // C is 6
    CHECK_THROWS_AS(decode(bytes), CorruptPayloadError);
  }
  SUBCASE("k of zero") {
    bytes[1] = 0;
    CHECK_THROWS_AS(decode(bytes), CorruptPayloadError);
  }
  SUBCASE("shorter than the prefix") {
    CHECK_THROWS_AS(decode(std::span<const std::uint8_t>(bytes.data(), 3)), CorruptPayloadError);
  }
}

TEST_CASE("scatter rebuilds the toy example row") {
  const PredictionVector v = make_vector(0, {0.04f, 0.51f, 0.03f, 0.40f, 0.01f, 0.01f});
  const CompressedPrediction pred = compress_topk(v, 2);
  const std::vector<CompressedPrediction> preds{pred};
  const ScatterTensor tensor = decompress_scatter(preds, 1, 6);
  REQUIRE(tensor.rows() == 1);
  CHECK(tensor.row_present[0]);
  const float expected[6] = {0.0f, 0.51f, 0.0f, 0.40f, 0.0f, 0.0f};
  for (int c = 0; c < 6; ++c) {
    CHECK(tensor.scores(0, c) == expected[c]);
    CHECK(tensor.received(0, c) == (c == 1 || c == 3));
  }
}

TEST_CASE("scatter flags missing rows absent instead of zero-filling") {
  const ScatterTensor tensor = decompress_scatter({}, 3, 6);
  CHECK(tensor.rows() == 3);
  for (int r = 0; r < 3; ++r) CHECK_FALSE(tensor.row_present[r]);
}

TEST_CASE("k=1 scatters a one-hot row") {
  CompressedPrediction pred;
  pred.variant_id = 0;
  pred.k = 1;
  pred.num_classes = 6;
  pred.indices = {4};
  const std::vector<CompressedPrediction> preds{pred};
  const ScatterTensor tensor = decompress_scatter(preds, 1, 6);
  for (int c = 0; c < 6; ++c) CHECK(tensor.scores(0, c) == (c == 4 ? 1.0f : 0.0f));
}

TEST_CASE("scatter rejects duplicates and unknown variants") {
  CompressedPrediction pred;
  pred.variant_id = 2;
  pred.k = 1;
  pred.num_classes = 6;
  pred.indices = {0};
  const std::vector<CompressedPrediction> twice{pred, pred};
  CHECK_THROWS_AS(decompress_scatter(twice, 3, 6), ProtocolError);

  const std::vector<int> session_ids{5, 7};
  const std::vector<CompressedPrediction> one{pred};
  CHECK_THROWS_AS(decompress_scatter(one, session_ids, 6), ProtocolError);
}

TEST_CASE("scatter maps session variant ids onto rows") {
  CompressedPrediction pred;
  pred.variant_id = 7;
  pred.k = 1;
  pred.num_classes = 4;
  pred.indices = {2};
  const std::vector<int> session_ids{5, 7};
  const std::vector<CompressedPrediction> preds{pred};
  const ScatterTensor tensor = decompress_scatter(preds, session_ids, 4);
  CHECK_FALSE(tensor.row_present[0]);
  CHECK(tensor.row_present[1]);
  CHECK(tensor.scores(1, 2) == 1.0f);
}

TEST_CASE("roundtrip, fidelity and argmax preservation over random vectors") {
  SplitMix64 rng(0xC0DEC);
  for (int trial = 0; trial < 10000; ++trial) {
    const int num_classes = 2 + static_cast<int>(rng.below(255));  // 2..256
    const int k = 1 + static_cast<int>(
                          rng.below(static_cast<std::uint64_t>(std::min(num_classes, 255))));
    const PredictionVector v =
        random_vector(rng, static_cast<int>(rng.below(256)), num_classes);
    const CompressedPrediction pred = compress_topk(v, k);

    // Wire roundtrip is the identity.
    const std::vector<std::uint8_t> bytes = encode(pred);
    CHECK(decode(bytes) == pred);
    CHECK(static_cast<std::int64_t>(bytes.size() - kCodecPrefixBytes) ==
          encoded_entry_bytes(k, num_classes, 4));

    // Scatter agrees with the source at kept indices, zero elsewhere (k >= 2)
    // and preserves the argmax for every k.
    const std::vector<CompressedPrediction> preds{pred};
    const std::vector<int> ids{pred.variant_id};
    const ScatterTensor tensor = decompress_scatter(preds, ids, num_classes);
    int argmax_source = 0;
    for (int c = 1; c < num_classes; ++c) {
      if (v.scores[c] > v.scores[argmax_source]) argmax_source = c;
    }
    int argmax_row = 0;
    for (int c = 1; c < num_classes; ++c) {
      if (tensor.scores(0, c) > tensor.scores(0, argmax_row)) argmax_row = c;
    }
    CHECK(argmax_row == argmax_source);
    if (k >= 2) {
      for (int i = 0; i < k; ++i) {
        CHECK(tensor.scores(0, pred.indices[static_cast<std::size_t>(i)]) ==
              pred.values[static_cast<std::size_t>(i)]);
      }
      for (int c = 0; c < num_classes; ++c) {
        if (!tensor.received(0, c)) CHECK(tensor.scores(0, c) == 0.0f);
      }

      // Compression is idempotent on the scattered row.
      PredictionVector row;
      row.variant_id = pred.variant_id;
      row.scores = tensor.scores.row(0).transpose();
      CHECK(compress_topk(row, k) == pred);
    }
  }
}
