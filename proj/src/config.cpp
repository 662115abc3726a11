#include "vp/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "vp/errors.hpp"

namespace vp {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) {
      if (key == k) ok = true;
    }
    if (!ok) throw InvalidArgumentError("unknown config key \"" + key + "\" in " + where);
  }
}

void parse_session(const json& j, SessionSpec& spec) {
  reject_unknown(j,
                 {"family", "num_classes", "variants", "master_variant_index", "concentration",
                  "runnerup_truth_prob", "k", "alpha", "top_m", "seed"},
                 "session");
  if (j.contains("family")) spec.family = family_from_string(j["family"].get<std::string>());
  if (j.contains("num_classes")) spec.num_classes = j["num_classes"].get<int>();
  if (j.contains("variants")) {
    spec.variants.clear();
    for (const auto& item : j["variants"]) {
      reject_unknown(item, {"index", "target_top1", "fixture"}, "session.variants");
      VariantSource source;
      source.index = item.at("index").get<int>();
      if (item.contains("fixture")) {
        source.fixture_path = item["fixture"].get<std::string>();
      } else if (item.contains("target_top1")) {
        source.target_top1 = item["target_top1"].get<double>();
      }
      spec.variants.push_back(source);
    }
  }
  if (j.contains("master_variant_index")) {
    spec.master_variant_index = j["master_variant_index"].get<int>();
  }
  if (j.contains("concentration")) spec.concentration = j["concentration"].get<double>();
  if (j.contains("runnerup_truth_prob")) {
    spec.runnerup_truth_prob = j["runnerup_truth_prob"].get<double>();
  }
  if (j.contains("k")) spec.k = j["k"].get<int>();
  if (j.contains("alpha")) spec.alpha = j["alpha"].get<double>();
  if (j.contains("top_m")) spec.top_m = j["top_m"].get<int>();
  if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
}

void parse_simnet(const json& j, SimNetConfig& net) {
  reject_unknown(j, {"rtt_ms", "bandwidth_bps", "seed"}, "simnet");
  if (j.contains("rtt_ms")) net.rtt_ms = j["rtt_ms"].get<double>();
  if (j.contains("bandwidth_bps")) net.bandwidth_bps = j["bandwidth_bps"].get<double>();
  if (j.contains("seed")) net.seed = j["seed"].get<std::uint64_t>();
}

void parse_faults(const json& j, FaultPlan& plan) {
  plan.workers.clear();
  for (const auto& item : j) {
    reject_unknown(item,
                   {"fail_stop_at_ms", "slowdown_factor", "drop_probability",
                    "extra_latency_mean_ms"},
                   "faults");
    FaultEntry entry;
    if (item.contains("fail_stop_at_ms") && !item["fail_stop_at_ms"].is_null()) {
      entry.fail_stop_at_ms = item["fail_stop_at_ms"].get<double>();
    }
    if (item.contains("slowdown_factor")) {
      entry.slowdown_factor = item["slowdown_factor"].get<double>();
      if (entry.slowdown_factor < 1.0) {
        throw InvalidArgumentError("slowdown_factor must be >= 1");
      }
    }
    if (item.contains("drop_probability")) {
      entry.drop_probability = item["drop_probability"].get<double>();
      if (entry.drop_probability < 0.0 || entry.drop_probability >= 1.0) {
        throw InvalidArgumentError("drop_probability must be in [0, 1)");
      }
    }
    if (item.contains("extra_latency_mean_ms")) {
      entry.extra_latency_mean_ms = item["extra_latency_mean_ms"].get<double>();
    }
    plan.workers.push_back(entry);
  }
}

void parse_latency(const json& j, LatencyModel& model) {
  reject_unknown(j,
                 {"variant_compute_ms", "baseline_compute_ms", "aggregate_ms", "rtt_ms",
                  "bandwidth_bps", "input_bytes"},
                 "latency");
  if (j.contains("variant_compute_ms")) {
    model.variant_compute_ms.clear();
    for (const auto& [key, value] : j["variant_compute_ms"].items()) {
      model.variant_compute_ms[std::stoi(key)] = value.get<double>();
    }
  }
  if (j.contains("baseline_compute_ms")) {
    model.baseline_compute_ms = j["baseline_compute_ms"].get<double>();
  }
  if (j.contains("aggregate_ms")) model.aggregate_ms = j["aggregate_ms"].get<double>();
  if (j.contains("rtt_ms")) model.rtt_ms = j["rtt_ms"].get<double>();
  if (j.contains("bandwidth_bps")) model.bandwidth_bps = j["bandwidth_bps"].get<double>();
  if (j.contains("input_bytes")) model.input_bytes = j["input_bytes"].get<std::int64_t>();
}

}  // namespace

HarnessConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidArgumentError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(j, {"session", "simnet", "faults", "latency", "deadline_ms", "reserve_ms"},
                 "config");
  HarnessConfig config;
  if (j.contains("session")) parse_session(j["session"], config.session);
  if (j.contains("simnet")) parse_simnet(j["simnet"], config.net);
  if (j.contains("faults")) parse_faults(j["faults"], config.faults);
  if (j.contains("latency")) parse_latency(j["latency"], config.latency);
  if (j.contains("deadline_ms")) config.deadline_ms = j["deadline_ms"].get<double>();
  if (j.contains("reserve_ms")) config.reserve_ms = j["reserve_ms"].get<double>();
  if (config.window_ms() <= 0) {
    throw InvalidArgumentError("deadline_ms must exceed reserve_ms");
  }
  return config;
}

HarnessConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgumentError("cannot open config file: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::optional<std::uint64_t> seed_override_from_env() {
  const char* value = std::getenv("VP_SEED");
  if (!value || !*value) return std::nullopt;
  try {
    return std::stoull(value);
  } catch (const std::exception&) {
    throw InvalidArgumentError("VP_SEED must be an unsigned integer");
  }
}

void apply_seed_override(HarnessConfig& config) {
  if (const auto seed = seed_override_from_env()) {
    config.session.seed = *seed;
    config.net.seed = *seed;
  }
}

}  // namespace vp
