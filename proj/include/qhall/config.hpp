// Experiment configuration: JSON file -> validated struct, with command-line
// overrides applied on top and a canonical hash for provenance.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qhall {

enum class ExperimentKind {
  bulk_index,
  edge_conductance,
  equality_study,
  identity_suite,
  ft_sweep,
  decay_study,
  scaling_study,
  assumption_audit,
};

const char* to_string(ExperimentKind kind);
ExperimentKind experiment_from_string(const std::string& name);
const std::vector<std::string>& experiment_names();

struct ModelConfig {
  long p = 1;
  long q = 3;
  double t = 1.0;
  /// Explicit disorder half-width; ignored when gap_fraction is set.
  double disorder = 0.0;
  /// Disorder as a fraction of the clean bulk gap width.
  std::optional<double> disorder_gap_fraction;
  int hopping_range = 1;
  double mu0 = 1.0;
};

struct FermiConfig {
  /// Explicit Fermi energy, or the midpoint of gap number gap_index.
  std::optional<double> mu;
  int gap_index = 1;
};

struct BulkConfig {
  int L = 24;
  /// Half-width of the trace box around the flux; default L/3.
  std::optional<double> region_half_width;
  double center_x = -0.5;
  double center_y = -0.5;
  std::string profile = "linear";
};

struct EdgeConfig {
  int Lx = 48;
  int Ly = 24;
  /// Trace rows y < y_cut for sigma_E; default Ly/2.
  std::optional<int> y_cut;
  /// Trace rows y < k_y_cut for K; default 2 Ly / 3.
  std::optional<int> k_y_cut;
  std::vector<std::pair<double, double>> g_supports{{-1.9, -0.85}, {-1.7, -1.0}};
  std::vector<double> chi_half_widths{4.0, 8.0};
  bool k_study = true;
};

struct DecayConfig {
  std::vector<int> torus_sizes{18, 24};
  int strip_Lx = 36;
  int strip_Ly = 24;
  int ct_torus = 12;
  int hs_torus = 12;
};

struct ScalingConfig {
  int Lx = 112;
  int Ly = 16;
};

struct IdentityConfig {
  int pairs = 100;
  int size = 20;
  int fuzz_pairs = 200;
  int fuzz_size = 30;
  int banded_operators = 200;
  int banded_side = 6;
  int bandwidth = 3;
};

struct SweepConfig {
  std::vector<int> L{24, 36, 48};
  std::vector<int> a{8};
  std::vector<int> b{4};
  std::vector<double> t{0.0, 1.0, 10.0, 100.0, 10000.0};
  std::vector<std::uint64_t> seeds{0};
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::bulk_index;
  ModelConfig model;
  FermiConfig fermi;
  BulkConfig bulk;
  EdgeConfig edge;
  DecayConfig decay;
  ScalingConfig scaling;
  IdentityConfig identity;
  SweepConfig sweep;
  std::map<std::string, double> tolerances;
  std::string output_dir = "out";
  int threads = 1;
  bool timing = false;
  /// Sign relating the Berry-curvature Chern number to the index.
  int berry_sign = -1;
  int berry_grid = 24;

  double tolerance(const std::string& key) const;
};

/// Registered tolerance names with their defaults.
const std::map<std::string, double>& tolerance_registry();

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
/// Canonical JSON (sorted keys, all defaults filled in).
std::string canonical_json(const ExperimentConfig& config);
/// FNV-1a 64 of the canonical JSON, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);
/// Throws ConfigInvalid naming the offending field.
void validate(const ExperimentConfig& config);

const char* build_id();

}  // namespace qhall
