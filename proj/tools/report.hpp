#pragma once

#include <json.hpp>

#include <map>
#include <string>
#include <vector>

namespace aford::cli {

/// Outcome of one verification. `metric` names what `residual` holds
/// (max_abs_residual, p_value or max_abs_z); p-values pass when above the
/// threshold, everything else when at or below it.
struct VerificationReport {
  std::string check;
  std::map<std::string, std::string> parameters;
  std::string metric = "max_abs_residual";
  double residual = 0.0;
  /// Exact residual for rational checks, empty otherwise.
  std::string residual_exact;
  double threshold = 0.0;
  bool pass = false;
  double wall_time_ms = 0.0;
};

bool within_threshold(const VerificationReport& r);

/// Wall time is left out unless asked for, so that equal configurations
/// serialise to identical bytes.
nlohmann::ordered_json to_json(const VerificationReport& r, bool with_timing);

/// A rectangular result with JSON-valued cells, printable as CSV or JSON.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::ordered_json>> rows;
};

}  // namespace aford::cli
