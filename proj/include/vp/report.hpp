#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace vp {

/// Shortest-exact decimal formatting (round-trips a double); keeps report
/// bytes reproducible run to run.
std::string format_number(double v);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const;
};

/// One experiment's output: a per-trial CSV plus a JSON summary carrying
/// the configuration echo. Regenerable byte-identically from
/// (config, seed).
struct ExperimentReport {
  std::string name;
  nlohmann::ordered_json config;
  CsvTable trials;
  nlohmann::ordered_json summary;

  std::string to_json_string() const;
};

}  // namespace vp
