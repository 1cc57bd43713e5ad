// Sweep driver: one function per experiment kind, producing flat records
// and pass/fail gates, plus deterministic CSV/JSON emission.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qhall/config.hpp"

namespace qhall {

struct ExperimentRecord {
  std::string experiment;
  std::optional<double> L_x, L_y, p, q, mu, W, seed, a, b, t;
  std::string functional;
  double value = 0.0;
  std::optional<double> two_pi_value;
  std::optional<double> nearest_int;
  std::optional<double> gap;
  std::optional<double> wall_ms;

  /// Sort key over the parameter columns and functional name.
  std::string key() const;
};

struct Gate {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  /// "<", "<=", "==", ">" or "in" (value within threshold of target).
  std::string comparison = "<";
  double target = 0.0;
  bool pass = false;
};

struct RunResult {
  ExperimentConfig config;
  std::vector<ExperimentRecord> records;
  std::vector<Gate> gates;

  bool all_pass() const;
};

/// Runs the configured experiment. Errors carry the parameter point.
RunResult run(const ExperimentConfig& config);

/// Sorted, duplicate-free records.
std::vector<ExperimentRecord> normalize(std::vector<ExperimentRecord> records);

std::string csv_header();
std::string to_csv(const std::vector<ExperimentRecord>& records, const std::string& config_hash,
                   const std::string& build);
std::string summary_json(const RunResult& result);

/// Writes <dir>/<experiment>.csv and <dir>/<experiment>_summary.json.
/// Throws IoFailure.
void emit(const RunResult& result, const std::string& dir);

}  // namespace qhall
