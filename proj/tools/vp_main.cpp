#include <csignal>
#include <fstream>
#include <iostream>
#include <semaphore>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "vp/config.hpp"
#include "vp/errors.hpp"
#include "vp/experiments.hpp"
#include "vp/tcp.hpp"

namespace {

using namespace vp;

std::binary_semaphore g_shutdown{0};

void emit_report(const ExperimentReport& report, const std::string& csv_path,
                 const std::string& json_path) {
  const std::string csv = report.trials.to_csv();
  if (csv_path.empty()) {
    std::cout << csv;
  } else {
    std::ofstream out(csv_path, std::ios::binary);
    out << csv;
  }
  if (!json_path.empty()) {
    std::ofstream out(json_path, std::ios::binary);
    out << report.to_json_string();
  } else if (!report.summary.empty()) {
    std::cerr << report.to_json_string();
  }
}

Endpoint parse_endpoint(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos) throw InvalidArgumentError("endpoint must be host:port");
  Endpoint ep;
  ep.host = text.substr(0, colon);
  ep.port = std::stoi(text.substr(colon + 1));
  if (ep.host.empty()) ep.host = "127.0.0.1";
  return ep;
}

PredictorPtr make_cli_predictor(const std::string& kind, int variant_index, int num_classes,
                                double target_top1, std::uint64_t seed) {
  if (kind == "synthetic") {
    CalibrationProfile profile;
    profile.variant_id = variant_index;
    profile.target_top1 = target_top1;
    profile.seed = seed;
    return calibrate(profile, num_classes);
  }
  if (kind.rfind("fixture:", 0) == 0) {
    return load_fixture(kind.substr(8), num_classes, variant_index);
  }
  throw InvalidArgumentError("--predictor must be \"synthetic\" or \"fixture:<path>\"");
}

nlohmann::ordered_json report_to_json(const MasterReport& report) {
  nlohmann::ordered_json doc;
  doc["request_id"] = report.request_id;
  doc["window_ms"] = report.window_ms;
  doc["completed_at_ms"] = report.completed_at_ms;
  doc["answered"] = report.result.has_value();
  if (report.result) {
    doc["top1"] = report.result->top1;
    doc["contributing_variant_ids"] = report.result->contributing_variant_ids;
    doc["master_contributed"] = report.master_contributed;
  }
  nlohmann::ordered_json workers = nlohmann::ordered_json::array();
  for (const auto& w : report.workers) {
    nlohmann::ordered_json item;
    item["worker"] = w.worker_index;
    item["variant_id"] = w.variant_id;
    switch (w.status) {
      case SlotStatus::Responded: item["status"] = "responded"; break;
      case SlotStatus::Late: item["status"] = "late"; break;
      case SlotStatus::Dropped: item["status"] = "dropped"; break;
      case SlotStatus::FailStopped: item["status"] = "fail_stopped"; break;
      case SlotStatus::NoResponse: item["status"] = "no_response"; break;
    }
    if (w.arrival_ms) item["arrival_ms"] = *w.arrival_ms;
    workers.push_back(item);
  }
  doc["workers"] = workers;
  return doc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variant-ensemble distributed inference toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string csv_path;
  std::string json_path;
  app.add_option("--config", config_path, "JSON config file")->capture_default_str();
  app.add_option("--csv", csv_path, "write the per-trial CSV here (default: stdout)");
  app.add_option("--json", json_path, "write the JSON summary here (default: stderr)");

  // gen-variants
  auto* gen = app.add_subcommand("gen-variants", "emit the variant catalog with cost audits");
  std::string gen_family = "standard";
  int gen_classes = 101;
  std::string gen_format = "csv";
  gen->add_option("--family", gen_family, "standard|imagenet")->capture_default_str();
  gen->add_option("--classes", gen_classes, "number of classes")->capture_default_str();
  gen->add_option("--format", gen_format, "csv|json")->capture_default_str();

  // sweep-k
  auto* sweep = app.add_subcommand("sweep-k", "accuracy across compression levels");
  std::vector<int> sweep_ks{1, 2, 3, 5, 10};
  int sweep_samples = 2000;
  sweep->add_option("--k-values", sweep_ks, "k grid")->delimiter(',')->capture_default_str();
  sweep->add_option("--samples", sweep_samples, "samples per k")->capture_default_str();

  // ablate
  auto* ablate = app.add_subcommand("ablate", "variant combination/exclusion study");
  std::string ablate_mode = "cumulative";
  int ablate_samples = 2000;
  ablate->add_option("--mode", ablate_mode, "cumulative|leave-one-out")->capture_default_str();
  ablate->add_option("--samples", ablate_samples, "samples per subset")->capture_default_str();

  // availability
  auto* avail = app.add_subcommand("availability", "answered fraction under fail-stop plans");
  std::vector<double> avail_rates{0.0, 0.2, 0.4, 0.6, 0.8};
  int avail_trials = 500;
  avail->add_option("--rates", avail_rates, "failure rates")->delimiter(',')->capture_default_str();
  avail->add_option("--trials", avail_trials, "trials per rate")->capture_default_str();

  // estimate-latency
  auto* lat = app.add_subcommand("estimate-latency", "speedup table from the service-time model");
  std::vector<int> lat_variants{1, 2, 3, 4, 5, 6};
  int lat_k = 2;
  int lat_classes = 101;
  lat->add_option("--variants", lat_variants, "variant indices")->delimiter(',')->capture_default_str();
  lat->add_option("--k", lat_k, "compression k")->capture_default_str();
  lat->add_option("--classes", lat_classes, "number of classes")->capture_default_str();

  // bandwidth
  auto* bw = app.add_subcommand("bandwidth", "payload size law across k and C");
  std::vector<int> bw_ks{1, 2, 3, 5, 10};
  std::vector<int> bw_classes{10, 101, 1000};
  bw->add_option("--k-values", bw_ks, "k grid")->delimiter(',')->capture_default_str();
  bw->add_option("--classes", bw_classes, "class counts")->delimiter(',')->capture_default_str();

  // serve-worker
  auto* serve = app.add_subcommand("serve-worker", "answer inference requests on a socket");
  std::string serve_listen = "127.0.0.1:7070";
  int serve_variant = 1;
  std::string serve_family = "standard";
  int serve_classes = 10;
  std::string serve_predictor = "synthetic";
  double serve_target = 0.9;
  int serve_k = 2;
  std::uint64_t serve_seed = 42;
  serve->add_option("--listen", serve_listen, "host:port (port 0 = ephemeral)")->capture_default_str();
  serve->add_option("--variant", serve_variant, "variant index 1..7")->capture_default_str();
  serve->add_option("--family", serve_family, "standard|imagenet")->capture_default_str();
  serve->add_option("--classes", serve_classes, "number of classes")->capture_default_str();
  serve->add_option("--predictor", serve_predictor, "synthetic | fixture:<path>")->capture_default_str();
  serve->add_option("--target-top1", serve_target, "synthetic accuracy target")->capture_default_str();
  serve->add_option("--k", serve_k, "compression k")->capture_default_str();
  serve->add_option("--seed", serve_seed, "synthetic seed")->capture_default_str();

  // run-master
  auto* master = app.add_subcommand("run-master", "one scatter-gather inference over sockets");
  std::vector<std::string> master_workers;
  std::vector<int> master_variants;
  std::string master_family = "standard";
  int master_classes = 10;
  double master_deadline = 100.0;
  double master_reserve = 5.0;
  int master_k = 2;
  double master_alpha = 1.0;
  std::int64_t master_sample = 0;
  int master_true_class = 0;
  int master_own_variant = 0;
  double master_own_target = 0.9;
  std::uint64_t master_seed = 42;
  master->add_option("--workers", master_workers, "worker endpoints host:port")
      ->delimiter(',')->required();
  master->add_option("--variants", master_variants, "variant index per worker, same order")
      ->delimiter(',')->required();
  master->add_option("--family", master_family, "standard|imagenet")->capture_default_str();
  master->add_option("--classes", master_classes, "number of classes")->capture_default_str();
  master->add_option("--deadline-ms", master_deadline, "request deadline")->capture_default_str();
  master->add_option("--reserve-ms", master_reserve, "aggregation reserve")->capture_default_str();
  master->add_option("--k", master_k, "compression k")->capture_default_str();
  master->add_option("--alpha", master_alpha, "scaling exponent")->capture_default_str();
  master->add_option("--sample-id", master_sample, "sample to request")->capture_default_str();
  master->add_option("--true-class", master_true_class, "ground truth of the sample")->capture_default_str();
  master->add_option("--master-variant", master_own_variant,
                     "variant the master runs itself (0 = none)")->capture_default_str();
  master->add_option("--master-target", master_own_target, "master's synthetic target")->capture_default_str();
  master->add_option("--seed", master_seed, "master-side synthetic seed")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    HarnessConfig config = config_path.empty() ? HarnessConfig{} : load_config_file(config_path);
    apply_seed_override(config);

    if (*gen) {
      ExperimentReport report = catalog_report(family_from_string(gen_family), gen_classes);
      if (gen_format == "json") {
        nlohmann::ordered_json doc;
        doc["experiment"] = report.name;
        doc["config"] = report.config;
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (const auto& row : report.trials.rows) {
          nlohmann::ordered_json item;
          for (std::size_t c = 0; c < report.trials.columns.size(); ++c) {
            item[report.trials.columns[c]] = row[c];
          }
          rows.push_back(item);
        }
        doc["rows"] = rows;
        std::cout << doc.dump(2) << "\n";
      } else {
        emit_report(report, csv_path, json_path);
      }
    } else if (*sweep) {
      emit_report(sweep_k(config.session, sweep_ks, sweep_samples), csv_path, json_path);
    } else if (*ablate) {
      const AblationMode mode = ablate_mode == "leave-one-out" ? AblationMode::LeaveOneOut
                                                               : AblationMode::Cumulative;
      emit_report(ablate_variants(config.session, mode, ablate_samples), csv_path, json_path);
    } else if (*avail) {
      emit_report(availability_curve(config.session, avail_rates, avail_trials, config.net,
                                     config.latency, config.window_ms()),
                  csv_path, json_path);
    } else if (*lat) {
      emit_report(latency_report(config.latency, lat_variants, lat_k, lat_classes), csv_path,
                  json_path);
    } else if (*bw) {
      emit_report(bandwidth_table(bw_ks, bw_classes), csv_path, json_path);
    } else if (*serve) {
      const Endpoint ep = parse_endpoint(serve_listen);
      if (const auto seed = seed_override_from_env()) serve_seed = *seed;
      WorkerAssignment assignment;
      assignment.variant =
          build_variant(serve_variant, family_from_string(serve_family), serve_classes);
      assignment.predictor = make_cli_predictor(serve_predictor, serve_variant, serve_classes,
                                                serve_target, serve_seed);
      WorkerServer server(std::move(assignment), serve_k, ep.host, ep.port);
      std::cerr << "serving variant V" << serve_variant << " on " << ep.host << ":"
                << server.port() << "\n";
      std::signal(SIGINT, [](int) { g_shutdown.release(); });
      std::signal(SIGTERM, [](int) { g_shutdown.release(); });
      g_shutdown.acquire();
      server.stop();
    } else if (*master) {
      if (master_workers.size() != master_variants.size()) {
        throw InvalidArgumentError("--workers and --variants must have the same length");
      }
      if (const auto seed = seed_override_from_env()) master_seed = *seed;
      const VariantFamily family = family_from_string(master_family);
      SessionConfig session;
      session.k = master_k;
      session.alpha = master_alpha;
      std::vector<Endpoint> endpoints;
      for (std::size_t i = 0; i < master_workers.size(); ++i) {
        WorkerAssignment assignment;
        assignment.variant = build_variant(master_variants[i], family, master_classes);
        session.workers.push_back(std::move(assignment));
        endpoints.push_back(parse_endpoint(master_workers[i]));
      }
      if (master_own_variant > 0) {
        WorkerAssignment own;
        own.variant = build_variant(master_own_variant, family, master_classes);
        own.predictor = make_cli_predictor("synthetic", master_own_variant, master_classes,
                                           master_own_target, master_seed);
        session.master_variant = std::move(own);
      }
      TcpMaster tcp(std::move(session), std::move(endpoints));
      InferenceRequest request;
      request.request_id = 1;
      request.input_blob = encode_sample_blob(master_sample, master_true_class);
      request.deadline_window_ms = master_deadline - master_reserve;
      const MasterReport report = tcp.run(request);
      std::cout << report_to_json(report).dump(2) << "\n";
      if (!report.result) return 2;
    }
  } catch (const vp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
