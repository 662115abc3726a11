#include "vp/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace vp {

std::string format_number(double v) {
  if (v == static_cast<long long>(v) && std::abs(v) < 1e15) {
    return std::to_string(static_cast<long long>(v));
  }
  char buf[40];
  // %.17g round-trips but prints noise; try increasing precision until the
  // value parses back exactly.
  for (int precision = 6; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::string CsvTable::to_csv() const {
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) out += ',';
    out += columns[c];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += row[c];
    }
    out += '\n';
  }
  return out;
}

std::string ExperimentReport::to_json_string() const {
  nlohmann::ordered_json doc;
  doc["experiment"] = name;
  doc["config"] = config;
  doc["summary"] = summary;
  return doc.dump(2) + "\n";
}

}  // namespace vp
