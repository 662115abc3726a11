#include "vp/variant_catalog.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vp/errors.hpp"

namespace vp {

namespace {

struct BottleneckRow {
  int expansion;
  int filters;
  int repeats;
  int stride;
};

// Inverted-residual stack shared by every variant: 19 bottlenecks in 7 rows.
constexpr BottleneckRow kBottleneckRows[] = {
    {1, 16, 1, 1}, {6, 24, 2, 2}, {6, 32, 3, 2}, {6, 64, 4, 2},
    {6, 96, 3, 1}, {6, 160, 3, 2}, {6, 320, 1, 1},
};

constexpr int kInitialFilters = 32;
constexpr int kResolutions[] = {96, 128, 160, 192, 224, 256, 320};

int ceil_div(int a, int b) { return (a + b - 1) / b; }

}  // namespace

int round_filters(double filters) {
  const int rounded = static_cast<int>(std::floor(filters / 8.0 + 0.5)) * 8;
  return std::max(8, rounded);
}

VariantSpec build_scaled(int index, VariantFamily family, int input_resolution,
                         double width_factor, int head_width, int num_classes,
                         bool scale_initial_conv) {
  if (input_resolution <= 0) throw InvalidArgumentError("input resolution must be positive");
  if (width_factor <= 0.0) throw InvalidArgumentError("width factor must be positive");
  if (head_width <= 0) throw InvalidArgumentError("head width must be positive");
  if (num_classes < 2) throw InvalidArgumentError("num_classes must be at least 2");

  VariantSpec spec;
  spec.index = index;
  spec.family = family;
  spec.input_resolution = input_resolution;
  spec.width_factor = width_factor;
  spec.head_width = head_width;
  spec.num_classes = num_classes;

  const int stem = scale_initial_conv && width_factor != 1.0
                       ? round_filters(kInitialFilters * width_factor)
                       : kInitialFilters;
  spec.layers.push_back({LayerKind::InitialConv, 1, stem, 1, 2});
  for (const auto& row : kBottleneckRows) {
    const int filters = width_factor == 1.0 ? row.filters : round_filters(row.filters * width_factor);
    spec.layers.push_back({LayerKind::Bottleneck, row.expansion, filters, row.repeats, row.stride});
  }
  spec.layers.push_back({LayerKind::PointwiseConv, 1, 64 * head_width, 1, 1});
  spec.layers.push_back({LayerKind::GlobalMaxPool, 1, 0, 1, 1});
  spec.layers.push_back({LayerKind::HeadConv, 1, num_classes, 1, 1});
  return spec;
}

VariantSpec build_variant(int index, VariantFamily family, int num_classes) {
  if (index < 1 || index > 7) {
    throw InvalidArgumentError("variant index must be in [1, 7], got " + std::to_string(index));
  }
  const int resolution = kResolutions[index - 1];
  if (family == VariantFamily::Standard) {
    return build_scaled(index, family, resolution, 0.35, 3 + index, num_classes,
                        /*scale_initial_conv=*/false);
  }
  return build_scaled(index, family, resolution, 0.5, std::min(7 + 2 * index, 20), num_classes,
                      /*scale_initial_conv=*/true);
}

VariantSpec build_reference(int num_classes) {
  return build_scaled(0, VariantFamily::Standard, 224, 1.0, 20, num_classes,
                      /*scale_initial_conv=*/false);
}

ModelAudit audit(const VariantSpec& spec) {
  if (spec.layers.empty()) throw InvalidArgumentError("variant spec has no layers");

  std::int64_t params = 0;
  std::int64_t macs = 0;
  std::int64_t side = spec.input_resolution;
  std::int64_t channels = 3;

  for (const auto& layer : spec.layers) {
    switch (layer.kind) {
      case LayerKind::InitialConv: {
        side = ceil_div(static_cast<int>(side), layer.stride);
        const std::int64_t out = layer.out_filters;
        params += 9 * channels * out + 2 * out;
        macs += side * side * 9 * channels * out;
        channels = out;
        break;
      }
      case LayerKind::Bottleneck: {
        const std::int64_t out = layer.out_filters;
        for (int rep = 0; rep < layer.repeats; ++rep) {
          const int stride = rep == 0 ? layer.stride : 1;
          const std::int64_t expanded = channels * layer.expansion;
          const std::int64_t side_out = ceil_div(static_cast<int>(side), stride);
          if (layer.expansion > 1) {
            // 1x1 expansion runs at the input resolution.
            params += channels * expanded + 2 * expanded;
            macs += side * side * channels * expanded;
          }
          params += 9 * expanded + 2 * expanded;
          macs += side_out * side_out * 9 * expanded;
          params += expanded * out + 2 * out;
          macs += side_out * side_out * expanded * out;
          side = side_out;
          channels = out;
        }
        break;
      }
      case LayerKind::PointwiseConv: {
        const std::int64_t out = layer.out_filters;
        params += channels * out + 2 * out;
        macs += side * side * channels * out;
        channels = out;
        break;
      }
      case LayerKind::GlobalMaxPool: {
        side = 1;
        break;
      }
      case LayerKind::HeadConv: {
        const std::int64_t out = layer.out_filters;
        params += channels * out + out;  // bias, no batch norm
        macs += side * side * channels * out;
        channels = out;
        break;
      }
    }
  }
  return {params, macs};
}

std::vector<CatalogRow> catalog_table(VariantFamily family, int num_classes) {
  std::vector<CatalogRow> rows;
  rows.reserve(7);
  for (int i = 1; i <= 7; ++i) {
    VariantSpec spec = build_variant(i, family, num_classes);
    ModelAudit cost = audit(spec);
    rows.push_back({std::move(spec), cost});
  }
  return rows;
}

const char* to_string(VariantFamily family) {
  return family == VariantFamily::Standard ? "standard" : "imagenet";
}

const char* to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::InitialConv: return "conv2d";
    case LayerKind::Bottleneck: return "bottleneck";
    case LayerKind::PointwiseConv: return "conv2d_1x1";
    case LayerKind::GlobalMaxPool: return "globalmaxpool";
    case LayerKind::HeadConv: return "head_conv2d_1x1";
  }
  return "unknown";
}

VariantFamily family_from_string(const std::string& name) {
  if (name == "standard") return VariantFamily::Standard;
  if (name == "imagenet") return VariantFamily::ImageNet;
  throw InvalidArgumentError("unknown variant family: " + name);
}

}  // namespace vp
