// Acceptance suite: runs every experiment through the qhall executable and
// prints one PASS/FAIL line per criterion from the emitted summaries.
//
// usage: acceptance <qhall executable> <config dir> <output dir>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  std::string label;
  std::string experiment;
  std::string config;
};

struct Outcome {
  int exit_code = -1;
  double seconds = 0.0;
  json summary;
};

struct Criterion {
  std::string name;
  std::vector<std::pair<std::string, std::string>> gates;  // run label, gate name
  std::string runtime_run;
  double runtime_limit = 0.0;
};

std::string quote(const std::string& s) { return "'" + s + "'"; }

Outcome execute(const std::string& cli, const fs::path& configs, const fs::path& out, const Run& r) {
  Outcome o;
  const fs::path dir = out / r.label;
  fs::create_directories(dir);
  const std::string cmd = quote(cli) + " " + r.experiment + " --config " + quote((configs / r.config).string()) +
                          " --out " + quote(dir.string()) + " --quiet > " + quote((dir / "log.txt").string()) +
                          " 2>&1";
  const auto t0 = std::chrono::steady_clock::now();
  const int status = std::system(cmd.c_str());
  o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(dir / (r.experiment + "_summary.json"));
  if (in) {
    try {
      o.summary = json::parse(in);
    } catch (const json::exception&) {
    }
  }
  std::printf("ran %-18s %-17s exit=%d %.1f s\n", r.label.c_str(), r.experiment.c_str(), o.exit_code, o.seconds);
  std::fflush(stdout);
  return o;
}

const json* find_gate(const Outcome& o, const std::string& name) {
  if (!o.summary.is_object() || !o.summary.contains("gates")) return nullptr;
  for (const json& g : o.summary["gates"])
    if (g.value("name", "") == name) return &g;
  return nullptr;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 4) {
    std::fprintf(stderr, "usage: %s <qhall> <config dir> <output dir>\n", argv[0]);
    return 2;
  }
  const std::string cli = argv[1];
  const fs::path configs = argv[2];
  const fs::path out = argv[3];

  const std::vector<Run> runs{
      {"bulk", "bulk-index", "reference.json"},
      {"equality", "equality-study", "reference.json"},
      {"edge", "edge-conductance", "reference.json"},
      {"identity", "identity-suite", "reference.json"},
      {"ft", "ft-sweep", "reference.json"},
      {"decay", "decay-study", "reference.json"},
      {"scaling", "scaling-study", "scaling.json"},
      {"audit", "assumption-audit", "reference.json"},
      {"disorder", "equality-study", "disorder.json"},
  };
  const std::vector<Criterion> criteria{
      {"quantized bulk index (trace, counting, Berry)",
       {{"bulk", "bulk_integer_gap"}, {"bulk", "counting_matches_trace"}, {"bulk", "berry_matches_trace"}},
       "bulk", 60.0},
      {"bulk/edge equality on the 48x24 strip", {{"equality", "equality_two_pi_diff"}}, "equality", 300.0},
      {"independence of sigma_E from (g, chi)", {{"edge", "sigma_E_switch_spread"}}, "", 0.0},
      {"K invariance between check and hat gauges, monotone in L",
       {{"equality", "K_check_vs_hat"}, {"equality", "K_gap_monotone"}}, "", 0.0},
      {"operator identity suite",
       {{"identity", "identities_general"}, {"identity", "identities_projection"},
        {"identity", "projection_inputs_detected"}},
       "identity", 10.0},
      {"tr f_t(A) = tr A^3 for projection pairs",
       {{"identity", "ft_vs_cubic_projection_pairs"}, {"ft", "ft_vs_cubic_bulk_pair"}}, "", 0.0},
      {"polynomial trace differences vanish for diagonal U",
       {{"identity", "poly_trace_diagonal_u_pairs"}, {"audit", "poly_trace_physical_pairs"}}, "", 0.0},
      {"f_t inequalities, row-shift bound and Combes-Thomas bound",
       {{"identity", "ft_norm_bound_failures"}, {"identity", "ft_lipschitz_failures"}, {"identity", "rowshift_ratio_max"},
        {"decay", "ct_ratio_max"}, {"decay", "ct_pair_count"}},
       "", 0.0},
      {"kernel decay certification",
       {{"decay", "bulk_decay_rate_positive"}, {"decay", "bulk_decay_rate_stability"},
        {"decay", "edge_decay_rate_positive"}},
       "", 0.0},
      {"boundary strip norm scaling with a", {{"scaling", "hat_strip_hs_exponent"}}, "", 0.0},
      {"disorder robustness over five seeds",
       {{"disorder", "index_unchanged"}, {"disorder", "equality_two_pi_diff"}}, "", 0.0},
  };

  fs::create_directories(out);
  std::map<std::string, Outcome> outcomes;
  double total = 0.0;
  for (const Run& r : runs) {
    outcomes[r.label] = execute(cli, configs, out, r);
    total += outcomes[r.label].seconds;
  }

  int failed = 0;
  for (const Criterion& c : criteria) {
    bool pass = true;
    std::string detail;
    for (const auto& [label, gate] : c.gates) {
      const Outcome& o = outcomes[label];
      const json* g = find_gate(o, gate);
      if (!g) {
        pass = false;
        detail += " " + gate + "=missing(exit " + std::to_string(o.exit_code) + ")";
        continue;
      }
      const bool gp = g->value("pass", false);
      pass = pass && gp;
      char buf[160];
      if ((*g)["value"].is_number()) {
        std::snprintf(buf, sizeof buf, " %s=%.4g%s", gate.c_str(), (*g)["value"].get<double>(), gp ? "" : "!");
      } else {
        std::snprintf(buf, sizeof buf, " %s=%s!", gate.c_str(), (*g)["value"].dump().c_str());
      }
      detail += buf;
    }
    if (!c.runtime_run.empty()) {
      const double s = outcomes[c.runtime_run].seconds;
      const bool rp = s < c.runtime_limit;
      pass = pass && rp;
      char buf[96];
      std::snprintf(buf, sizeof buf, " runtime=%.1fs<%.0fs%s", s, c.runtime_limit, rp ? "" : "!");
      detail += buf;
    }
    if (!pass) ++failed;
    std::printf("%s  %s |%s\n", pass ? "PASS" : "FAIL", c.name.c_str(), detail.c_str());
  }
  std::printf("%zu criteria, %d failed, total runtime %.1f s\n", criteria.size(), failed, total);
  return failed == 0 ? 0 : 1;
}
