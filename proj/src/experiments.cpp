#include "vp/experiments.hpp"

#include <algorithm>
#include <numeric>

#include "vp/errors.hpp"
#include "vp/rng.hpp"

namespace vp {

namespace {

WorkerAssignment make_assignment(const SessionSpec& spec, const VariantSource& source) {
  WorkerAssignment assignment;
  assignment.variant = build_variant(source.index, spec.family, spec.num_classes);
  if (!source.fixture_path.empty()) {
    assignment.predictor = load_fixture(source.fixture_path, spec.num_classes, source.index);
  } else {
    CalibrationProfile profile;
    profile.variant_id = source.index;
    profile.target_top1 = source.target_top1;
    profile.concentration = spec.concentration;
    profile.runnerup_truth_prob = spec.runnerup_truth_prob;
    profile.seed = spec.seed;
    assignment.predictor = calibrate(profile, spec.num_classes);
  }
  return assignment;
}

nlohmann::ordered_json echo_config(const SessionSpec& spec) {
  nlohmann::ordered_json j;
  j["family"] = to_string(spec.family);
  j["num_classes"] = spec.num_classes;
  nlohmann::ordered_json variants = nlohmann::ordered_json::array();
  for (const auto& v : spec.variants) {
    nlohmann::ordered_json item;
    item["index"] = v.index;
    if (v.fixture_path.empty()) {
      item["target_top1"] = v.target_top1;
    } else {
      item["fixture"] = v.fixture_path;
    }
    variants.push_back(item);
  }
  j["variants"] = variants;
  if (spec.master_variant_index) j["master_variant_index"] = *spec.master_variant_index;
  j["concentration"] = spec.concentration;
  j["runnerup_truth_prob"] = spec.runnerup_truth_prob;
  j["k"] = spec.k;
  j["alpha"] = spec.alpha;
  j["top_m"] = spec.top_m;
  j["seed"] = spec.seed;
  return j;
}

SessionSpec subset_spec(const SessionSpec& spec, const std::vector<std::size_t>& keep) {
  SessionSpec out = spec;
  out.variants.clear();
  for (const std::size_t i : keep) out.variants.push_back(spec.variants[i]);
  return out;
}

std::string subset_label(const SessionSpec& spec, const std::vector<std::size_t>& keep) {
  std::string label;
  for (const std::size_t i : keep) {
    if (!label.empty()) label += '+';
    label += "V" + std::to_string(spec.variants[i].index);
  }
  return label;
}

double mean_macs(const SessionSpec& spec, const std::vector<std::size_t>& keep) {
  double total = 0.0;
  for (const std::size_t i : keep) {
    const auto cost = audit(build_variant(spec.variants[i].index, spec.family, spec.num_classes));
    total += static_cast<double>(cost.mac_count);
  }
  return keep.empty() ? 0.0 : total / static_cast<double>(keep.size());
}

}  // namespace

SessionConfig make_session(const SessionSpec& spec) {
  if (spec.variants.empty()) throw InvalidArgumentError("session spec has no variants");
  SessionConfig session;
  session.k = spec.k;
  session.alpha = spec.alpha;
  for (const auto& source : spec.variants) {
    session.workers.push_back(make_assignment(spec, source));
  }
  if (spec.master_variant_index) {
    VariantSource source;
    source.index = *spec.master_variant_index;
    source.target_top1 = 0.9;
    for (const auto& v : spec.variants) {
      if (v.index == *spec.master_variant_index) source = v;
    }
    session.master_variant = make_assignment(spec, source);
  }
  return session;
}

LabeledSample make_sample(std::uint64_t seed, std::int64_t sample_id, int num_classes) {
  SplitMix64 rng(mix_key(seed, 0x53414D50ull, static_cast<std::uint64_t>(sample_id)));
  return {sample_id, static_cast<int>(rng.below(static_cast<std::uint64_t>(num_classes)))};
}

EnsembleResult run_pipeline(const SessionConfig& session, const LabeledSample& sample,
                            bool compress) {
  const std::vector<VariantTraits> traits = session.configured_traits();
  const std::vector<int> ids = session.configured_variant_ids();
  const int num_classes = session.num_classes();

  std::vector<PredictionVector> predictions;
  predictions.reserve(traits.size());
  for (const auto& w : session.workers) predictions.push_back(w.predictor->predict(sample));
  if (session.master_variant) {
    predictions.push_back(session.master_variant->predictor->predict(sample));
  }

  ScatterTensor tensor;
  if (compress) {
    std::vector<CompressedPrediction> preds;
    preds.reserve(predictions.size());
    for (const auto& p : predictions) preds.push_back(compress_topk(p, session.k));
    tensor = decompress_scatter(preds, ids, num_classes);
  } else {
    const Eigen::Index v = static_cast<Eigen::Index>(predictions.size());
    tensor.scores = MatrixF::Zero(v, num_classes);
    tensor.received = MaskMatrix::Constant(v, num_classes, true);
    tensor.row_present = ArrayXb::Constant(v, true);
    for (Eigen::Index row = 0; row < v; ++row) {
      tensor.scores.row(row) = predictions[static_cast<std::size_t>(row)].scores.transpose();
    }
  }
  const ScalingContext ctx = make_scaling_context(traits, session.alpha);
  return aggregate(tensor, traits, ctx, session.absent_mode);
}

AccuracyStats evaluate_accuracy(const SessionConfig& session, int num_samples,
                                std::uint64_t sample_seed, int top_m, bool compress) {
  AccuracyStats stats;
  const int num_classes = session.num_classes();
  for (int s = 0; s < num_samples; ++s) {
    const LabeledSample sample = make_sample(sample_seed, s, num_classes);
    const EnsembleResult result = run_pipeline(session, sample, compress);
    ++stats.samples;
    stats.top1_hits += result.top1 == sample.true_class ? 1 : 0;
    stats.topm_hits += top_m_hit(result.combined, sample.true_class, top_m) ? 1 : 0;
  }
  return stats;
}

ExperimentReport sweep_k(const SessionSpec& spec, std::span<const int> k_values,
                         int num_samples) {
  ExperimentReport report;
  report.name = "sweep-k";
  report.config = echo_config(spec);
  report.config["num_samples"] = num_samples;
  report.trials.columns = {"k", "samples", "top1_accuracy", "topm_accuracy", "m"};

  nlohmann::ordered_json by_k;
  for (const int k : k_values) {
    SessionSpec trial = spec;
    trial.k = k;
    const SessionConfig session = make_session(trial);
    const AccuracyStats stats = evaluate_accuracy(session, num_samples, spec.seed, spec.top_m);
    report.trials.rows.push_back({std::to_string(k), std::to_string(stats.samples),
                                  format_number(stats.top1()), format_number(stats.topm()),
                                  std::to_string(spec.top_m)});
    by_k[std::to_string(k)] = {{"top1", stats.top1()}, {"topm", stats.topm()}};
  }
  report.summary["accuracy_by_k"] = by_k;
  return report;
}

ExperimentReport ablate_variants(const SessionSpec& spec, AblationMode mode, int num_samples) {
  if (spec.variants.size() < 2) {
    throw InvalidArgumentError("ablation needs at least two variants");
  }
  ExperimentReport report;
  report.name = mode == AblationMode::Cumulative ? "ablate-cumulative" : "ablate-leave-one-out";
  report.config = echo_config(spec);
  report.config["num_samples"] = num_samples;
  report.trials.columns = {"subset", "variant_count", "mean_macs", "top1_accuracy",
                           "topm_accuracy"};

  std::vector<std::vector<std::size_t>> subsets;
  const std::size_t n = spec.variants.size();
  if (mode == AblationMode::Cumulative) {
    for (std::size_t upto = 1; upto <= n; ++upto) {
      std::vector<std::size_t> keep(upto);
      std::iota(keep.begin(), keep.end(), 0);
      subsets.push_back(keep);
    }
  } else {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    subsets.push_back(all);  // reference row: the full set
    for (std::size_t skip = 0; skip < n; ++skip) {
      std::vector<std::size_t> keep;
      for (std::size_t i = 0; i < n; ++i) {
        if (i != skip) keep.push_back(i);
      }
      subsets.push_back(keep);
    }
  }

  for (const auto& keep : subsets) {
    const SessionSpec trial = subset_spec(spec, keep);
    const SessionConfig session = make_session(trial);
    const AccuracyStats stats = evaluate_accuracy(session, num_samples, spec.seed, spec.top_m);
    report.trials.rows.push_back({subset_label(spec, keep), std::to_string(keep.size()),
                                  format_number(mean_macs(spec, keep)),
                                  format_number(stats.top1()), format_number(stats.topm())});
  }
  return report;
}

ExperimentReport availability_curve(const SessionSpec& spec, std::span<const double> failure_rates,
                                    int num_trials, const SimNetConfig& net,
                                    const LatencyModel& latency, double window_ms) {
  ExperimentReport report;
  report.name = "availability";
  report.config = echo_config(spec);
  report.config["num_trials"] = num_trials;
  report.config["window_ms"] = window_ms;
  report.config["rtt_ms"] = net.rtt_ms;
  report.config["bandwidth_bps"] = net.bandwidth_bps;
  report.trials.columns = {"failure_rate", "trials", "answered", "availability",
                           "conditional_top1", "mean_contributors"};

  const SessionConfig session = make_session(spec);
  SimSession sim;
  sim.session = session;
  sim.net = net;
  for (const auto& w : session.workers) {
    sim.worker_compute_ms.push_back(service_time_ms(latency, w.variant));
  }
  if (session.master_variant) {
    sim.master_compute_ms = service_time_ms(latency, session.master_variant->variant);
  }

  for (std::size_t r = 0; r < failure_rates.size(); ++r) {
    const double rate = failure_rates[r];
    int answered = 0;
    int correct = 0;
    std::int64_t contributors = 0;
    for (int t = 0; t < num_trials; ++t) {
      SplitMix64 plan_rng(mix_key(spec.seed, 0x4641554Cull, r, static_cast<std::uint64_t>(t)));
      sim.faults.workers.clear();
      for (std::size_t w = 0; w < session.workers.size(); ++w) {
        FaultEntry entry;
        if (plan_rng.uniform() < rate) entry.fail_stop_at_ms = 0.0;
        sim.faults.workers.push_back(entry);
      }
      const LabeledSample sample = make_sample(spec.seed, t, spec.num_classes);
      InferenceRequest request;
      request.request_id = static_cast<std::uint64_t>(t);
      request.input_blob = encode_sample_blob(sample.sample_id, sample.true_class);
      request.deadline_window_ms = window_ms;
      const MasterReport outcome = run_master(sim, request);
      if (outcome.result) {
        ++answered;
        correct += outcome.result->top1 == sample.true_class ? 1 : 0;
        contributors +=
            static_cast<std::int64_t>(outcome.result->contributing_variant_ids.size());
      }
    }
    const double availability = num_trials ? static_cast<double>(answered) / num_trials : 0.0;
    report.trials.rows.push_back(
        {format_number(rate), std::to_string(num_trials), std::to_string(answered),
         format_number(availability),
         format_number(answered ? static_cast<double>(correct) / answered : 0.0),
         format_number(answered ? static_cast<double>(contributors) / answered : 0.0)});
  }
  return report;
}

ExperimentReport latency_report(const LatencyModel& model, std::span<const int> variant_set,
                                int k, int num_classes) {
  const SpeedupTable table = estimate_latency(model, variant_set, k, num_classes);
  ExperimentReport report;
  report.name = "estimate-latency";
  report.config["baseline_compute_ms"] = model.baseline_compute_ms;
  report.config["rtt_ms"] = model.rtt_ms;
  report.config["bandwidth_bps"] = model.bandwidth_bps;
  report.config["input_bytes"] = model.input_bytes;
  report.config["k"] = k;
  report.config["num_classes"] = num_classes;
  report.trials.columns = {"variant",     "compute_ms",       "compute_only_speedup",
                           "response_ms", "rtt_adjusted_speedup", "output_transfer_ms"};
  for (const auto& row : table.rows) {
    report.trials.rows.push_back({"V" + std::to_string(row.variant_index),
                                  format_number(row.compute_ms),
                                  format_number(row.compute_only_speedup),
                                  format_number(row.response_ms),
                                  format_number(row.rtt_adjusted_speedup),
                                  format_number(row.output_transfer_ms)});
  }
  report.summary["set_slowest_compute_ms"] = table.set_slowest_compute_ms;
  report.summary["set_response_ms"] = table.set_response_ms;
  report.summary["set_speedup"] = table.set_speedup;
  report.summary["input_transfer_ms"] = table.input_transfer_ms;
  report.summary["aggregate_ms"] = table.aggregate_ms;
  return report;
}

ExperimentReport bandwidth_table(std::span<const int> k_values, std::span<const int> class_counts,
                                 int fp_size) {
  ExperimentReport report;
  report.name = "bandwidth";
  report.config["fp_size"] = fp_size;
  report.trials.columns = {"k",           "num_classes",   "size_law_bytes",
                           "wire_bytes",  "dense_bytes",   "ratio_vs_dense",
                           "ratio_vs_class_split_low", "ratio_vs_class_split_high"};
  for (const auto& row : bandwidth_report(k_values, class_counts, fp_size)) {
    report.trials.rows.push_back(
        {std::to_string(row.k), std::to_string(row.num_classes), std::to_string(row.size_law),
         std::to_string(row.wire_bytes), std::to_string(row.dense_bytes),
         format_number(row.ratio_vs_dense), format_number(row.ratio_vs_class_split_low),
         format_number(row.ratio_vs_class_split_high)});
  }
  return report;
}

ExperimentReport catalog_report(VariantFamily family, int num_classes) {
  ExperimentReport report;
  report.name = "gen-variants";
  report.config["family"] = to_string(family);
  report.config["num_classes"] = num_classes;
  report.trials.columns = {"variant", "input_resolution", "width_factor", "head_width",
                           "params",  "macs"};
  for (const auto& row : catalog_table(family, num_classes)) {
    report.trials.rows.push_back(
        {"V" + std::to_string(row.spec.index), std::to_string(row.spec.input_resolution),
         format_number(row.spec.width_factor), std::to_string(row.spec.head_width),
         std::to_string(row.cost.param_count), std::to_string(row.cost.mac_count)});
  }
  const auto reference = build_reference(num_classes);
  const auto cost = audit(reference);
  report.trials.rows.push_back({"baseline", std::to_string(reference.input_resolution),
                                format_number(reference.width_factor),
                                std::to_string(reference.head_width),
                                std::to_string(cost.param_count), std::to_string(cost.mac_count)});
  return report;
}

double service_time_ms(const LatencyModel& model, const VariantSpec& spec) {
  const auto it = model.variant_compute_ms.find(spec.index);
  if (it != model.variant_compute_ms.end()) return it->second;
  // Untabulated variant: extrapolate proportionally to MACs from the
  // largest tabulated one.
  if (model.variant_compute_ms.empty()) {
    throw InvalidArgumentError("latency model has no tabulated compute times");
  }
  const auto largest = std::prev(model.variant_compute_ms.end());
  const auto known = audit(build_variant(largest->first, spec.family, spec.num_classes));
  const auto target = audit(spec);
  return largest->second * static_cast<double>(target.mac_count) /
         static_cast<double>(known.mac_count);
}

}  // namespace vp
