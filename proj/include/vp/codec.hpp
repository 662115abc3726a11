#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vp/types.hpp"

namespace vp {

/// Top-k slice of a prediction vector: the unit of network transfer.
/// Indices are ordered by descending score, ties broken toward the lower
/// class index. `values` is empty when k == 1 (index-only transfer).
struct CompressedPrediction {
  int variant_id = 0;
  int k = 0;
  int num_classes = 0;
  std::vector<std::uint16_t> indices;
  std::vector<float> values;

  bool operator==(const CompressedPrediction&) const = default;
};

/// The k highest-scoring (index, value) pairs of `v`.
CompressedPrediction compress_topk(const PredictionVector& v, int k);

/// Payload size law in bytes: min{k*(fp_size+1), fp_size*C}, or 1 when
/// k == 1. Indices are accounted at one byte regardless of C.
std::int64_t size_law_bytes(int k, int num_classes, int fp_size = 4);

/// Bytes the entry section actually occupies on the wire: equals
/// size_law_bytes for C <= 256; indices widen to two bytes beyond that.
std::int64_t encoded_entry_bytes(int k, int num_classes, int fp_size = 4);

/// Fixed prefix of an encoded prediction: variant_id u8, k u8, C u16.
inline constexpr std::size_t kCodecPrefixBytes = 4;

/// Little-endian layout: variant_id u8, k u8, C u16, then k entries of
/// (index u8 when C <= 256 else u16, value f32 omitted when k == 1).
/// The wire k field is a u8, so k must be <= 255.
std::vector<std::uint8_t> encode(const CompressedPrediction& pred);

/// Exact inverse of encode. Throws CorruptPayloadError on truncation,
/// trailing bytes, or out-of-range contents.
CompressedPrediction decode(std::span<const std::uint8_t> payload);

/// Dense (V, C) reconstruction of a response set. Rows with no received
/// prediction are flagged absent rather than zero-filled; `received` marks
/// which classes of a present row carried a value (needed by the masked
/// aggregation mode).
struct ScatterTensor {
  MatrixF scores;        // V x C
  MaskMatrix received;   // V x C
  ArrayXb row_present;   // V

  Eigen::Index rows() const { return scores.rows(); }
  Eigen::Index cols() const { return scores.cols(); }
};

/// Scatter each prediction's values at their class indices into the row
/// given by its variant_id, which must already be a row id in [0, V).
/// k == 1 predictions scatter the constant 1.0 at their lone index.
ScatterTensor decompress_scatter(std::span<const CompressedPrediction> preds,
                                 int num_variants, int num_classes);

/// Same, with rows keyed by position in `variant_ids` (a session's
/// configured variant order) instead of raw id.
ScatterTensor decompress_scatter(std::span<const CompressedPrediction> preds,
                                 std::span<const int> variant_ids, int num_classes);

}  // namespace vp
