#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vp/latency.hpp"
#include "vp/report.hpp"
#include "vp/runtime.hpp"
#include "vp/simnet.hpp"

namespace vp {

/// Where one variant's predictions come from: a calibrated synthetic
/// generator (default) or a score-row fixture file.
struct VariantSource {
  int index = 1;
  double target_top1 = 0.9;
  std::string fixture_path;  // file-backed when non-empty
};

/// Declarative session description the experiments and the CLI share.
/// Defaults emulate the five-variant ten-class setup with the reported
/// per-variant accuracy targets.
struct SessionSpec {
  VariantFamily family = VariantFamily::Standard;
  int num_classes = 10;
  std::vector<VariantSource> variants{{1, 0.9176, ""},
                                      {2, 0.9307, ""},
                                      {3, 0.9381, ""},
                                      {4, 0.9443, ""},
                                      {5, 0.9462, ""}};
  std::optional<int> master_variant_index;  // extra variant run by the master
  double concentration = 0.3;
  double runnerup_truth_prob = 0.5;
  int k = 2;
  double alpha = 1.0;
  int top_m = 2;
  std::uint64_t seed = 42;
};

SessionConfig make_session(const SessionSpec& spec);

/// Deterministic sample stream: true classes uniform under the seed.
LabeledSample make_sample(std::uint64_t seed, std::int64_t sample_id, int num_classes);

/// Offline pipeline for one sample: predict on every configured variant,
/// compress with the session k (skipped when compress is false), scatter,
/// aggregate.
EnsembleResult run_pipeline(const SessionConfig& session, const LabeledSample& sample,
                            bool compress = true);

struct AccuracyStats {
  int samples = 0;
  int top1_hits = 0;
  int topm_hits = 0;

  double top1() const { return samples ? static_cast<double>(top1_hits) / samples : 0.0; }
  double topm() const { return samples ? static_cast<double>(topm_hits) / samples : 0.0; }
};

AccuracyStats evaluate_accuracy(const SessionConfig& session, int num_samples,
                                std::uint64_t sample_seed, int top_m, bool compress = true);

/// Accuracy and top-m over the k grid; one CSV row per k.
ExperimentReport sweep_k(const SessionSpec& spec, std::span<const int> k_values,
                         int num_samples);

enum class AblationMode { Cumulative, LeaveOneOut };

/// Cumulative mode evaluates {V1}, {V1,V2}, ...; leave-one-out evaluates
/// every all-minus-one set. Rows carry the mean MACs over participating
/// variants.
ExperimentReport ablate_variants(const SessionSpec& spec, AblationMode mode, int num_samples);

/// Fraction of requests answered and conditional accuracy under random
/// fail-stop plans at each failure rate, driven through the simulated
/// master.
ExperimentReport availability_curve(const SessionSpec& spec, std::span<const double> failure_rates,
                                    int num_trials, const SimNetConfig& net,
                                    const LatencyModel& latency, double window_ms);

/// Speedup table as a report (CSV + JSON).
ExperimentReport latency_report(const LatencyModel& model, std::span<const int> variant_set,
                                int k, int num_classes);

/// Bandwidth table as a report.
ExperimentReport bandwidth_table(std::span<const int> k_values, std::span<const int> class_counts,
                                 int fp_size = 4);

/// Catalog table as a report.
ExperimentReport catalog_report(VariantFamily family, int num_classes);

/// Service time for a variant: tabulated when available, otherwise
/// extrapolated proportionally to MACs from the largest tabulated variant.
double service_time_ms(const LatencyModel& model, const VariantSpec& spec);

}  // namespace vp
