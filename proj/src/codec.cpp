#include "vp/codec.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>
#include <string>

#include "vp/errors.hpp"

namespace vp {

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_f32(std::vector<std::uint8_t>& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  out.push_back(static_cast<std::uint8_t>(bits & 0xFF));
  out.push_back(static_cast<std::uint8_t>((bits >> 8) & 0xFF));
  out.push_back(static_cast<std::uint8_t>((bits >> 16) & 0xFF));
  out.push_back(static_cast<std::uint8_t>((bits >> 24) & 0xFF));
}

std::uint16_t get_u16(std::span<const std::uint8_t> in, std::size_t at) {
  return static_cast<std::uint16_t>(in[at] | (in[at + 1] << 8));
}

float get_f32(std::span<const std::uint8_t> in, std::size_t at) {
  std::uint32_t bits = static_cast<std::uint32_t>(in[at]) |
                       (static_cast<std::uint32_t>(in[at + 1]) << 8) |
                       (static_cast<std::uint32_t>(in[at + 2]) << 16) |
                       (static_cast<std::uint32_t>(in[at + 3]) << 24);
  float v;
  std::memcpy(&v, &bits, sizeof(v));
  return v;
}

}  // namespace

CompressedPrediction compress_topk(const PredictionVector& v, int k) {
  const int num_classes = static_cast<int>(v.scores.size());
  if (k < 1 || k > num_classes) {
    throw InvalidArgumentError("k must be in [1, " + std::to_string(num_classes) + "], got " +
                               std::to_string(k));
  }

  std::vector<int> order(static_cast<std::size_t>(num_classes));
  std::iota(order.begin(), order.end(), 0);
  const auto by_score_then_index = [&v](int a, int b) {
    const float sa = v.scores[a];
    const float sb = v.scores[b];
    return sa > sb || (sa == sb && a < b);
  };
  std::partial_sort(order.begin(), order.begin() + k, order.end(), by_score_then_index);

  CompressedPrediction pred;
  pred.variant_id = v.variant_id;
  pred.k = k;
  pred.num_classes = num_classes;
  pred.indices.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) pred.indices.push_back(static_cast<std::uint16_t>(order[i]));
  if (k > 1) {
    pred.values.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) pred.values.push_back(v.scores[order[i]]);
  }
  return pred;
}

std::int64_t size_law_bytes(int k, int num_classes, int fp_size) {
  if (k == 1) return 1;
  return std::min<std::int64_t>(static_cast<std::int64_t>(k) * (fp_size + 1),
                                static_cast<std::int64_t>(fp_size) * num_classes);
}

std::int64_t encoded_entry_bytes(int k, int num_classes, int fp_size) {
  const int index_bytes = num_classes <= 256 ? 1 : 2;
  if (k == 1) return index_bytes;
  return std::min<std::int64_t>(static_cast<std::int64_t>(k) * (fp_size + index_bytes),
                                static_cast<std::int64_t>(fp_size) * num_classes);
}

std::vector<std::uint8_t> encode(const CompressedPrediction& pred) {
  if (pred.k < 1 || pred.k > 255) throw InvalidArgumentError("wire k must be in [1, 255]");
  if (pred.k > pred.num_classes) throw InvalidArgumentError("k exceeds num_classes");
  if (pred.variant_id < 0 || pred.variant_id > 255) {
    throw InvalidArgumentError("wire variant_id must fit one byte");
  }
  if (pred.num_classes < 2 || pred.num_classes > 65535) {
    throw InvalidArgumentError("wire num_classes must fit two bytes");
  }
  if (pred.indices.size() != static_cast<std::size_t>(pred.k)) {
    throw InvalidArgumentError("index count does not match k");
  }
  const std::size_t expected_values = pred.k == 1 ? 0 : static_cast<std::size_t>(pred.k);
  if (pred.values.size() != expected_values) {
    throw InvalidArgumentError("value count does not match k");
  }

  const bool wide_index = pred.num_classes > 256;
  std::vector<std::uint8_t> out;
  out.reserve(kCodecPrefixBytes +
              static_cast<std::size_t>(pred.k) * (wide_index ? 6 : 5));
  out.push_back(static_cast<std::uint8_t>(pred.variant_id));
  out.push_back(static_cast<std::uint8_t>(pred.k));
  put_u16(out, static_cast<std::uint16_t>(pred.num_classes));
  for (int i = 0; i < pred.k; ++i) {
    const std::uint16_t index = pred.indices[static_cast<std::size_t>(i)];
    if (index >= pred.num_classes) throw InvalidArgumentError("class index out of range");
    if (wide_index) {
      put_u16(out, index);
    } else {
      out.push_back(static_cast<std::uint8_t>(index));
    }
    if (pred.k > 1) put_f32(out, pred.values[static_cast<std::size_t>(i)]);
  }
  return out;
}

CompressedPrediction decode(std::span<const std::uint8_t> payload) {
  if (payload.size() < kCodecPrefixBytes) {
    throw CorruptPayloadError("payload shorter than its fixed prefix");
  }
  CompressedPrediction pred;
  pred.variant_id = payload[0];
  pred.k = payload[1];
  pred.num_classes = get_u16(payload, 2);
  if (pred.k < 1) throw CorruptPayloadError("payload declares k = 0");
  if (pred.k > pred.num_classes) throw CorruptPayloadError("payload declares k > C");

  const bool wide_index = pred.num_classes > 256;
  const std::size_t index_bytes = wide_index ? 2 : 1;
  const std::size_t entry_bytes = index_bytes + (pred.k > 1 ? 4 : 0);
  const std::size_t expected = kCodecPrefixBytes + static_cast<std::size_t>(pred.k) * entry_bytes;
  if (payload.size() < expected) throw CorruptPayloadError("payload truncated");
  if (payload.size() > expected) throw CorruptPayloadError("payload has trailing bytes");

  std::size_t at = kCodecPrefixBytes;
  for (int i = 0; i < pred.k; ++i) {
    const std::uint16_t index = wide_index ? get_u16(payload, at) : payload[at];
    at += index_bytes;
    if (index >= pred.num_classes) throw CorruptPayloadError("class index out of range");
    pred.indices.push_back(index);
    if (pred.k > 1) {
      pred.values.push_back(get_f32(payload, at));
      at += 4;
    }
  }
  return pred;
}

ScatterTensor decompress_scatter(std::span<const CompressedPrediction> preds,
                                 int num_variants, int num_classes) {
  std::vector<int> identity(static_cast<std::size_t>(num_variants));
  std::iota(identity.begin(), identity.end(), 0);
  return decompress_scatter(preds, identity, num_classes);
}

ScatterTensor decompress_scatter(std::span<const CompressedPrediction> preds,
                                 std::span<const int> variant_ids, int num_classes) {
  const Eigen::Index v = static_cast<Eigen::Index>(variant_ids.size());
  ScatterTensor tensor;
  tensor.scores = MatrixF::Zero(v, num_classes);
  tensor.received = MaskMatrix::Constant(v, num_classes, false);
  tensor.row_present = ArrayXb::Constant(v, false);

  for (const auto& pred : preds) {
    const auto it = std::find(variant_ids.begin(), variant_ids.end(), pred.variant_id);
    if (it == variant_ids.end()) {
      throw ProtocolError("response from unknown variant id " + std::to_string(pred.variant_id));
    }
    const Eigen::Index row = it - variant_ids.begin();
    if (tensor.row_present[row]) {
      throw ProtocolError("duplicate response for variant id " + std::to_string(pred.variant_id));
    }
    tensor.row_present[row] = true;
    for (int i = 0; i < pred.k; ++i) {
      const int index = pred.indices[static_cast<std::size_t>(i)];
      if (index >= num_classes) throw CorruptPayloadError("class index out of range");
      tensor.scores(row, index) = pred.k == 1 ? 1.0f : pred.values[static_cast<std::size_t>(i)];
      tensor.received(row, index) = true;
    }
  }
  return tensor;
}

}  // namespace vp
