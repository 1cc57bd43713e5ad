#include "qhall/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qhall/dense.hpp"

#ifndef QHALL_BUILD_ID
#define QHALL_BUILD_ID "unknown"
#endif

namespace qhall {

using nlohmann::json;

namespace {

const std::vector<std::pair<ExperimentKind, std::string>>& experiment_table() {
  static const std::vector<std::pair<ExperimentKind, std::string>> table{
      {ExperimentKind::bulk_index, "bulk-index"},
      {ExperimentKind::edge_conductance, "edge-conductance"},
      {ExperimentKind::equality_study, "equality-study"},
      {ExperimentKind::identity_suite, "identity-suite"},
      {ExperimentKind::ft_sweep, "ft-sweep"},
      {ExperimentKind::decay_study, "decay-study"},
      {ExperimentKind::scaling_study, "scaling-study"},
      {ExperimentKind::assumption_audit, "assumption-audit"},
  };
  return table;
}

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::ConfigInvalid, path + ": " + what);
}

// Reads keys of one JSON object, remembering which were consumed so that
// unknown keys can be reported.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) invalid(path_, "expected an object");
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  template <typename T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      invalid(at(key), e.what());
    }
  }

  template <typename T>
  void get(const std::string& key, std::optional<T>& out) {
    seen_.insert(key);
    if (!j_.contains(key) || j_.at(key).is_null()) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      invalid(at(key), e.what());
    }
  }

  Section sub(const std::string& key) {
    seen_.insert(key);
    static const json empty = json::object();
    return Section(j_.contains(key) ? j_.at(key) : empty, at(key));
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) invalid(at(it.key()), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = to_string(c.experiment);
  j["model"] = {{"p", c.model.p},
                {"q", c.model.q},
                {"t", c.model.t},
                {"disorder", c.model.disorder},
                {"disorder_gap_fraction", optional_json(c.model.disorder_gap_fraction)},
                {"hopping_range", c.model.hopping_range},
                {"mu0", c.model.mu0}};
  j["fermi"] = {{"mu", optional_json(c.fermi.mu)}, {"gap_index", c.fermi.gap_index}};
  j["bulk"] = {{"L", c.bulk.L},
               {"region_half_width", optional_json(c.bulk.region_half_width)},
               {"center", {c.bulk.center_x, c.bulk.center_y}},
               {"profile", c.bulk.profile}};
  j["edge"] = {{"Lx", c.edge.Lx},
               {"Ly", c.edge.Ly},
               {"y_cut", optional_json(c.edge.y_cut)},
               {"k_y_cut", optional_json(c.edge.k_y_cut)},
               {"g_supports", c.edge.g_supports},
               {"chi_half_widths", c.edge.chi_half_widths},
               {"k_study", c.edge.k_study}};
  j["decay"] = {{"torus_sizes", c.decay.torus_sizes},
                {"strip_Lx", c.decay.strip_Lx},
                {"strip_Ly", c.decay.strip_Ly},
                {"ct_torus", c.decay.ct_torus},
                {"hs_torus", c.decay.hs_torus}};
  j["scaling"] = {{"Lx", c.scaling.Lx}, {"Ly", c.scaling.Ly}};
  j["identity"] = {{"pairs", c.identity.pairs},
                   {"size", c.identity.size},
                   {"fuzz_pairs", c.identity.fuzz_pairs},
                   {"fuzz_size", c.identity.fuzz_size},
                   {"banded_operators", c.identity.banded_operators},
                   {"banded_side", c.identity.banded_side},
                   {"bandwidth", c.identity.bandwidth}};
  j["sweep"] = {{"L", c.sweep.L}, {"a", c.sweep.a}, {"b", c.sweep.b}, {"t", c.sweep.t},
                {"seeds", c.sweep.seeds}};
  j["tolerances"] = c.tolerances;
  j["output_dir"] = c.output_dir;
  j["threads"] = c.threads;
  j["timing"] = c.timing;
  j["berry_sign"] = c.berry_sign;
  j["berry_grid"] = c.berry_grid;
  return j;
}

}  // namespace

const char* to_string(ExperimentKind kind) {
  for (const auto& [k, name] : experiment_table()) {
    if (k == kind) return name.c_str();
  }
  return "unknown";
}

ExperimentKind experiment_from_string(const std::string& name) {
  for (const auto& [k, n] : experiment_table()) {
    if (n == name) return k;
  }
  invalid("experiment", "unknown experiment '" + name + "'");
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& kv : experiment_table()) out.push_back(kv.second);
    return out;
  }();
  return names;
}

const std::map<std::string, double>& tolerance_registry() {
  static const std::map<std::string, double> registry{
      {"bulk_integer_gap", 0.05}, {"equality", 0.1},       {"switch_independence", 1e-2},
      {"k_invariance", 0.1},      {"identity", 1e-10},     {"ft_projection", 1e-9},
      {"poly_trace", 1e-10},      {"inequality_slack", 1e-12}, {"ct_ratio", 1.0},
      {"decay_stability", 0.2},   {"scaling_center", 0.5}, {"scaling_window", 0.15},
      {"hs_agreement", 1e-5},     {"zero_flux", 1e-3},     {"projection", 1e-10},
      {"window_stability", 0.25},
  };
  return registry;
}

double ExperimentConfig::tolerance(const std::string& key) const {
  const auto it = tolerances.find(key);
  if (it != tolerances.end()) return it->second;
  const auto& reg = tolerance_registry();
  const auto r = reg.find(key);
  if (r == reg.end()) throw Error(ErrorKind::ConfigInvalid, "tolerances." + key + ": not registered");
  return r->second;
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    invalid("<root>", e.what());
  }
  ExperimentConfig c;
  Section root(j, "");
  std::string experiment = to_string(c.experiment);
  root.get("experiment", experiment);
  c.experiment = experiment_from_string(experiment);

  Section m = root.sub("model");
  m.get("p", c.model.p);
  m.get("q", c.model.q);
  m.get("t", c.model.t);
  m.get("disorder", c.model.disorder);
  m.get("disorder_gap_fraction", c.model.disorder_gap_fraction);
  m.get("hopping_range", c.model.hopping_range);
  m.get("mu0", c.model.mu0);
  m.finish();

  Section f = root.sub("fermi");
  f.get("mu", c.fermi.mu);
  f.get("gap_index", c.fermi.gap_index);
  f.finish();

  Section b = root.sub("bulk");
  b.get("L", c.bulk.L);
  b.get("region_half_width", c.bulk.region_half_width);
  std::vector<double> center{c.bulk.center_x, c.bulk.center_y};
  b.get("center", center);
  if (center.size() != 2) invalid("bulk.center", "expected two numbers");
  c.bulk.center_x = center[0];
  c.bulk.center_y = center[1];
  b.get("profile", c.bulk.profile);
  b.finish();

  Section e = root.sub("edge");
  e.get("Lx", c.edge.Lx);
  e.get("Ly", c.edge.Ly);
  e.get("y_cut", c.edge.y_cut);
  e.get("k_y_cut", c.edge.k_y_cut);
  e.get("g_supports", c.edge.g_supports);
  e.get("chi_half_widths", c.edge.chi_half_widths);
  e.get("k_study", c.edge.k_study);
  e.finish();

  Section d = root.sub("decay");
  d.get("torus_sizes", c.decay.torus_sizes);
  d.get("strip_Lx", c.decay.strip_Lx);
  d.get("strip_Ly", c.decay.strip_Ly);
  d.get("ct_torus", c.decay.ct_torus);
  d.get("hs_torus", c.decay.hs_torus);
  d.finish();

  Section s = root.sub("scaling");
  s.get("Lx", c.scaling.Lx);
  s.get("Ly", c.scaling.Ly);
  s.finish();

  Section id = root.sub("identity");
  id.get("pairs", c.identity.pairs);
  id.get("size", c.identity.size);
  id.get("fuzz_pairs", c.identity.fuzz_pairs);
  id.get("fuzz_size", c.identity.fuzz_size);
  id.get("banded_operators", c.identity.banded_operators);
  id.get("banded_side", c.identity.banded_side);
  id.get("bandwidth", c.identity.bandwidth);
  id.finish();

  Section sw = root.sub("sweep");
  sw.get("L", c.sweep.L);
  sw.get("a", c.sweep.a);
  sw.get("b", c.sweep.b);
  sw.get("t", c.sweep.t);
  sw.get("seeds", c.sweep.seeds);
  sw.finish();

  root.get("tolerances", c.tolerances);
  root.get("output_dir", c.output_dir);
  root.get("threads", c.threads);
  root.get("timing", c.timing);
  root.get("berry_sign", c.berry_sign);
  root.get("berry_grid", c.berry_grid);
  root.finish();

  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const ExperimentConfig& c) {
  if (c.model.q <= 0) invalid("model.q", "must be positive");
  if (!(c.model.t != 0.0)) invalid("model.t", "hopping must be nonzero");
  if (!(c.model.disorder >= 0.0)) invalid("model.disorder", "must be >= 0");
  if (c.model.disorder_gap_fraction && !(*c.model.disorder_gap_fraction >= 0.0)) {
    invalid("model.disorder_gap_fraction", "must be >= 0");
  }
  if (c.model.hopping_range != 1) invalid("model.hopping_range", "only nearest-neighbour hopping is built");
  if (!(c.model.mu0 > 0.0)) invalid("model.mu0", "must be positive");
  if (c.fermi.gap_index < 1 || c.fermi.gap_index >= c.model.q) {
    invalid("fermi.gap_index", "must lie in [1, q)");
  }
  if (c.bulk.L < 2) invalid("bulk.L", "must be >= 2");
  if (c.bulk.profile != "linear" && c.bulk.profile != "smoothed_ramp") {
    invalid("bulk.profile", "expected linear or smoothed_ramp");
  }
  if (c.edge.Lx < 2 || c.edge.Ly < 2) invalid("edge", "strip must be at least 2x2");
  if (c.edge.g_supports.empty()) invalid("edge.g_supports", "empty sweep axis");
  for (const auto& [lo, hi] : c.edge.g_supports) {
    if (!(lo < hi)) invalid("edge.g_supports", "each support needs lower < upper");
  }
  if (c.edge.chi_half_widths.empty()) invalid("edge.chi_half_widths", "empty sweep axis");
  for (double w : c.edge.chi_half_widths) {
    if (!(w > 0.0)) invalid("edge.chi_half_widths", "widths must be positive");
  }
  if (c.decay.torus_sizes.empty()) invalid("decay.torus_sizes", "empty sweep axis");
  if (c.sweep.L.empty()) invalid("sweep.L", "empty sweep axis");
  if (c.sweep.a.empty()) invalid("sweep.a", "empty sweep axis");
  if (c.sweep.b.empty()) invalid("sweep.b", "empty sweep axis");
  if (c.sweep.t.empty()) invalid("sweep.t", "empty sweep axis");
  if (c.sweep.seeds.empty()) invalid("sweep.seeds", "empty sweep axis");
  for (int a : c.sweep.a) {
    if (a < 1) invalid("sweep.a", "values must be >= 1");
  }
  for (double t : c.sweep.t) {
    if (!(t >= 0.0)) invalid("sweep.t", "values must be >= 0");
  }
  for (const auto& kv : c.tolerances) {
    if (!tolerance_registry().count(kv.first)) invalid("tolerances." + kv.first, "not registered");
  }
  if (c.threads < 1) invalid("threads", "must be >= 1");
  if (c.berry_sign != 1 && c.berry_sign != -1) invalid("berry_sign", "must be +1 or -1");
  if (c.identity.pairs < 1 || c.identity.size < 2) invalid("identity", "needs pairs >= 1, size >= 2");
}

std::string canonical_json(const ExperimentConfig& config) { return to_json(config).dump(); }

std::string config_hash(const ExperimentConfig& config) {
  // output location and thread count do not change results
  json j = to_json(config);
  j.erase("output_dir");
  j.erase("threads");
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

const char* build_id() { return QHALL_BUILD_ID; }

}  // namespace qhall
