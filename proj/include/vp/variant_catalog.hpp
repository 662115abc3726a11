#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace vp {

enum class LayerKind { InitialConv, Bottleneck, PointwiseConv, GlobalMaxPool, HeadConv };

enum class VariantFamily { Standard, ImageNet };

/// One row of a variant's layer schedule. A row is applied `repeats` times;
/// the first repeat uses `stride`, the rest stride 1. `expansion` is the
/// bottleneck expansion factor t and is 1 for every other kind.
struct LayerSpec {
  LayerKind kind = LayerKind::InitialConv;
  int expansion = 1;
  int out_filters = 0;  // already width-scaled and rounded; 0 for pooling
  int repeats = 1;
  int stride = 1;
};

/// Architecture descriptor of one variant. Holds no weights; enough to
/// reconstruct the model and account its cost.
struct VariantSpec {
  int index = 0;  // 1..7; 0 marks the width-1.0 reference model
  VariantFamily family = VariantFamily::Standard;
  int input_resolution = 0;  // square side in pixels, 3 channels
  double width_factor = 1.0;
  int head_width = 0;  // j: the last pointwise conv has 64*j filters
  int num_classes = 0;
  std::vector<LayerSpec> layers;
};

struct ModelAudit {
  std::int64_t param_count = 0;
  std::int64_t mac_count = 0;
};

/// Width-scaled filter count rounded to the nearest multiple of 8 (half up),
/// never below 8.
int round_filters(double filters);

/// Variant schedule for index 1..7 of a family. Standard family: 96..320 px,
/// width 0.35, head j = 3+i. ImageNet family: width 0.5, j = min(7+2i, 20).
VariantSpec build_variant(int index, VariantFamily family, int num_classes);

/// Width-1.0 reference model (224 px, 1280-wide final conv): the audit
/// baseline the variants are compared against.
VariantSpec build_reference(int num_classes);

/// Schedule with explicit geometry. `scale_initial_conv` selects whether the
/// stem conv participates in width scaling: the Standard family keeps the
/// stem at 32 (only the depthwise-separable stack is narrowed) while the
/// ImageNet family applies its depth multiplier to every conv.
VariantSpec build_scaled(int index, VariantFamily family, int input_resolution,
                         double width_factor, int head_width, int num_classes,
                         bool scale_initial_conv);

/// Trainable parameter and multiply-accumulate counts for one forward pass.
/// Convention: batch-norm scale/shift counted (2 per channel) on every conv
/// except the head, which instead carries a bias; pooling and activations
/// cost no MACs.
ModelAudit audit(const VariantSpec& spec);

struct CatalogRow {
  VariantSpec spec;
  ModelAudit cost;
};

/// All seven variants of a family with their audits, ascending by index.
std::vector<CatalogRow> catalog_table(VariantFamily family, int num_classes);

const char* to_string(VariantFamily family);
const char* to_string(LayerKind kind);
VariantFamily family_from_string(const std::string& name);

}  // namespace vp
