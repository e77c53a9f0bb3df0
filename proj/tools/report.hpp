#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace cartanlab::cli {

using Json = nlohmann::ordered_json;

/// One verified property: residual against its threshold.  The WARN band is
/// [tolerance, 10 * tolerance) so finite-difference noise degrades a verdict
/// before it flips it.
struct CheckLine {
  std::string name;
  std::string ref;
  double residual = 0.0;
  double tolerance = 0.0;
};

const char* verdict(const CheckLine& line);

struct Report {
  std::string suite;
  std::string subject;
  std::uint64_t seed = 0;
  int samples = 0;
  double tol_scale = 1.0;
  std::vector<CheckLine> checks;

  /// Suite-specific payload rendered under "data" in JSON and as key/value
  /// lines in text mode.
  Json data;

  void add(std::string name, std::string ref, double residual, double tolerance);
  bool failed() const;

  std::string to_text() const;
  std::string to_json() const;
};

} // namespace cartanlab::cli
