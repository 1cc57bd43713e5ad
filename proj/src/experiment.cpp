#include "qhall/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "qhall/berry.hpp"
#include "qhall/conductance.hpp"
#include "qhall/helffer_sjostrand.hpp"
#include "qhall/identities.hpp"
#include "qhall/schatten.hpp"

namespace qhall {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

// Parameter columns shared by the rows of one sweep point.
struct Point {
  std::optional<double> L_x{}, L_y{}, mu{}, W{}, seed{}, a{}, b{}, t{};

  std::string describe() const {
    std::ostringstream os;
    auto put = [&os](const char* name, const std::optional<double>& v) {
      if (v) os << ' ' << name << '=' << *v;
    };
    put("L_x", L_x);
    put("L_y", L_y);
    put("mu", mu);
    put("W", W);
    put("seed", seed);
    put("a", a);
    put("b", b);
    put("t", t);
    return os.str();
  }
};

std::string strip_kind_prefix(const char* what) {
  const char* colon = std::strstr(what, ": ");
  return colon ? std::string(colon + 2) : std::string(what);
}

// Runs f, attaching the parameter point to any library error.
template <typename F>
auto at_point(const Point& pt, const std::string& stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.kind(), strip_kind_prefix(e.what()) + " [" + stage + ":" + pt.describe() + "]");
  }
}

class Sink {
 public:
  Sink(const ExperimentConfig& c, std::vector<ExperimentRecord>& out)
      : c_(c), out_(out), name_(to_string(c.experiment)) {}

  ExperimentRecord& add(const Point& pt, const std::string& functional, double value) {
    ExperimentRecord r;
    r.experiment = name_;
    r.L_x = pt.L_x;
    r.L_y = pt.L_y;
    r.p = static_cast<double>(c_.model.p);
    r.q = static_cast<double>(c_.model.q);
    r.mu = pt.mu;
    r.W = pt.W;
    r.seed = pt.seed;
    r.a = pt.a;
    r.b = pt.b;
    r.t = pt.t;
    r.functional = functional;
    r.value = value;
    out_.push_back(std::move(r));
    return out_.back();
  }

  ExperimentRecord& add(const Point& pt, const std::string& functional, const ConductanceResult& cr,
                        std::optional<double> gap = std::nullopt) {
    ExperimentRecord& r = add(pt, functional, cr.value);
    r.two_pi_value = cr.two_pi_value;
    r.nearest_int = static_cast<double>(cr.nearest_integer);
    r.gap = gap;
    return r;
  }

  void time(ExperimentRecord& r, Clock::time_point since) const {
    if (c_.timing) r.wall_ms = elapsed_ms(since);
  }

 private:
  const ExperimentConfig& c_;
  std::vector<ExperimentRecord>& out_;
  std::string name_;
};

Gate make_gate(const std::string& name, double value, const std::string& cmp, double threshold,
               double target = 0.0) {
  Gate g;
  g.name = name;
  g.value = value;
  g.comparison = cmp;
  g.threshold = threshold;
  g.target = target;
  if (std::isnan(value)) {
    g.pass = false;
  } else if (cmp == "<") {
    g.pass = value < threshold;
  } else if (cmp == "<=") {
    g.pass = value <= threshold;
  } else if (cmp == ">") {
    g.pass = value > threshold;
  } else if (cmp == "==") {
    g.pass = value == target;
  } else if (cmp == "in") {
    g.pass = std::abs(value - target) <= threshold;
  } else {
    throw Error(ErrorKind::InvalidArgument, "unknown gate comparison " + cmp);
  }
  return g;
}

// Independent tasks on a small thread pool; results keep task order.
template <typename R, typename F>
std::vector<R> parallel_map(std::size_t n, int threads, F&& f) {
  std::vector<std::optional<R>> slots(n);
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) slots[i].emplace(f(i));
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            slots[i].emplace(f(i));
          } catch (...) {
            std::lock_guard<std::mutex> lock(mutex);
            if (!first_error) first_error = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }
  std::vector<R> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

ModelSpec model_spec(const ExperimentConfig& c, double W, std::uint64_t seed) {
  ModelSpec s;
  s.flux_numerator = c.model.p;
  s.flux_denominator = c.model.q;
  s.hopping_amplitude = c.model.t;
  s.disorder_amplitude = W;
  s.disorder_seed = seed;
  s.hopping_range = c.model.hopping_range;
  s.decay_rate_mu0 = c.model.mu0;
  return s.reduced();
}

PhaseProfile bulk_profile(const ExperimentConfig& c) {
  return c.bulk.profile == "smoothed_ramp" ? PhaseProfile::smoothed_ramp() : PhaseProfile::linear();
}

Eigen::Index filled_states(const ExperimentConfig& c, const ModelSpec& spec, Eigen::Index n) {
  if (n % spec.flux_denominator != 0) {
    throw Error(ErrorKind::InvalidArgument, "site count is not a multiple of the flux denominator");
  }
  return static_cast<Eigen::Index>(c.fermi.gap_index) * (n / spec.flux_denominator);
}

struct TorusRun {
  ModelSpec spec;
  HermitianLatticeOperator h;
  SpectralDecomposition d;
  GapReport gap;
  HermitianLatticeOperator p;
};

TorusRun torus_run(const ExperimentConfig& c, int lx, int ly, double W, std::uint64_t seed) {
  TorusRun r;
  r.spec = model_spec(c, W, seed);
  r.h = build_bulk_hamiltonian(r.spec, LatticeGeometry::torus(lx, ly));
  r.d = decompose(r.h);
  if (c.fermi.mu) {
    r.gap = spectral_gap(r.d.eigenvalues, *c.fermi.mu);
  } else {
    r.gap = gap_above_filling(r.d.eigenvalues, filled_states(c, r.spec, r.h.size()));
  }
  r.p = fermi_projection(r.d, r.gap.mu);
  return r;
}

// Disorder half-width: explicit, or a fraction of the clean bulk gap width.
double resolve_disorder(const ExperimentConfig& c) {
  if (!c.model.disorder_gap_fraction) return c.model.disorder;
  const TorusRun clean = torus_run(c, c.bulk.L, c.bulk.L, 0.0, 0);
  return *c.model.disorder_gap_fraction * clean.gap.width();
}

struct StripRun {
  HalfPlaneRestriction r;
  SpectralDecomposition d;
  /// g(H) for the first Fermi switch; a projection only away from the edge.
  HermitianLatticeOperator gp;
};

// Half-plane strip with rows y in [0, ly) and its smoothed Fermi operator g(H).
StripRun strip_run(const ExperimentConfig& c, int lx, int ly, double W, std::uint64_t seed,
                   Boundary xb = Boundary::open) {
  StripRun s;
  const ModelSpec spec = model_spec(c, W, seed);
  const HermitianLatticeOperator bulk =
      build_bulk_hamiltonian(spec, LatticeGeometry::plane_window(lx, 1, ly, xb));
  s.r = restrict_half_plane(bulk, c.model.mu0);
  s.d = decompose(s.r.hamiltonian);
  s.gp = matrix_function(s.d, SwitchFunction(c.edge.g_supports.front().first, c.edge.g_supports.front().second));
  return s;
}

int default_y_cut(const ExperimentConfig& c) { return c.edge.y_cut.value_or(c.edge.Ly / 2); }
int default_k_y_cut(int ly, const std::optional<int>& configured) {
  return configured.value_or(2 * ly / 3);
}

ConductanceResult bulk_sigma(const ExperimentConfig& c, const TorusRun& run) {
  const LatticeGeometry& g = run.h.geometry;
  const double hw = c.bulk.region_half_width.value_or(c.bulk.L / 3.0);
  const ProjectionPair pair =
      make_pair(run.p, flux_phase(bulk_profile(c), c.bulk.center_x, c.bulk.center_y, g));
  return bulk_index(pair, TraceRegion::box(g, c.bulk.center_x, c.bulk.center_y, hw));
}

SwitchFunction fermi_switch(const std::pair<double, double>& support) {
  return SwitchFunction(support.first, support.second);
}

SwitchFunction position_switch(double half_width) { return SwitchFunction(-half_width, half_width); }

struct KPair {
  KParts check, hat;
  ConductanceResult k_check, k_hat;
};

KPair k_comparison(const StripRun& s, int a, int y_cut) {
  const LatticeGeometry& g = s.r.hamiltonian.geometry;
  const PhaseProfile ramp = PhaseProfile::smoothed_ramp();
  const TraceRegion region = TraceRegion::rows_below(g, y_cut);
  const ProjectionPair check = make_pair(s.gp, truncated_phase(flux_phase(ramp, 0.0, 0.0, g), a));
  const ProjectionPair hat = make_pair(s.gp, pulled_phase(a, ramp, g));
  KPair out;
  out.check = k_parts(check, region);
  out.hat = k_parts(hat, region);
  out.k_check = k_functional(check, region);
  out.k_hat = k_functional(hat, region);
  return out;
}

// ---------------------------------------------------------------- bulk-index

void run_bulk_index(const ExperimentConfig& c, RunResult& res) {
  Sink sink(c, res.records);
  const double W = resolve_disorder(c);
  const int L = c.bulk.L;
  struct Out {
    std::uint64_t seed;
    TorusRun run;
    ConductanceResult idx;
    long counting;
    double ms;
  };
  auto outs = parallel_map<Out>(c.sweep.seeds.size(), c.threads, [&](std::size_t i) {
    const auto t0 = Clock::now();
    const std::uint64_t seed = c.sweep.seeds[i];
    Point pt{L, L, std::nullopt, W, static_cast<double>(seed)};
    return at_point(pt, "bulk-index", [&] {
      Out o{seed, torus_run(c, L, L, W, seed), {}, 0, 0.0};
      const LatticeGeometry& g = o.run.h.geometry;
      const ProjectionPair pair =
          make_pair(o.run.p, flux_phase(bulk_profile(c), c.bulk.center_x, c.bulk.center_y, g));
      const TraceRegion region = TraceRegion::box(g, c.bulk.center_x, c.bulk.center_y,
                                                  c.bulk.region_half_width.value_or(L / 3.0));
      o.idx = bulk_index(pair, region);
      o.counting = counting_index(pair, region);
      o.ms = elapsed_ms(t0);
      return o;
    });
  });

  const ChernResult chern =
      fhs_chern_number(model_spec(c, 0.0, 0), c.fermi.gap_index, c.berry_grid);
  double worst_gap = 0.0;
  long mismatched_counting = 0;
  long mismatched_berry = 0;
  for (const Out& o : outs) {
    Point pt{L, L, o.run.gap.mu, W, static_cast<double>(o.seed)};
    ExperimentRecord& r = sink.add(pt, "tr_A3", o.idx, o.run.gap.width());
    if (c.timing) r.wall_ms = o.ms;
    sink.add(pt, "counting_index", static_cast<double>(o.counting)).nearest_int =
        static_cast<double>(o.counting);
    sink.add(pt, "integer_gap", o.idx.integer_gap);
    worst_gap = std::max(worst_gap, o.idx.integer_gap);
    if (o.counting != o.idx.nearest_integer) ++mismatched_counting;
    if (c.berry_sign * chern.chern != o.idx.nearest_integer) ++mismatched_berry;
  }
  Point cp{};
  cp.mu = outs.front().run.gap.mu;
  ExperimentRecord& br = sink.add(cp, "berry_chern", chern.raw);
  br.nearest_int = static_cast<double>(chern.chern);
  br.gap = chern.min_gap;
  sink.add(cp, "berry_sign", static_cast<double>(c.berry_sign));

  res.gates.push_back(make_gate("bulk_integer_gap", worst_gap, "<", c.tolerance("bulk_integer_gap")));
  res.gates.push_back(make_gate("counting_matches_trace", static_cast<double>(mismatched_counting), "==", 0.0));
  res.gates.push_back(make_gate("berry_matches_trace", static_cast<double>(mismatched_berry), "==", 0.0));
}

// ---------------------------------------------------------- edge-conductance

struct EdgeSweep {
  std::vector<ConductanceResult> sigma;
  std::vector<std::pair<std::pair<double, double>, double>> labels;
};

EdgeSweep edge_sweep(const ExperimentConfig& c, const StripRun& s, const GapReport& bulk_gap) {
  EdgeSweep out;
  const TraceRegion region = TraceRegion::rows_below(s.r.hamiltonian.geometry, default_y_cut(c));
  for (const auto& sup : c.edge.g_supports) {
    for (double w : c.edge.chi_half_widths) {
      out.sigma.push_back(edge_conductance(s.d, s.r.hamiltonian.entries, fermi_switch(sup),
                                           position_switch(w), bulk_gap, region));
      out.labels.push_back({sup, w});
    }
  }
  return out;
}

std::string edge_label(const std::pair<std::pair<double, double>, double>& l) {
  std::ostringstream os;
  os << "sigma_E[g=" << l.first.first << ":" << l.first.second << ",chi=" << l.second << "]";
  return os.str();
}

void run_edge_conductance(const ExperimentConfig& c, RunResult& res) {
  Sink sink(c, res.records);
  const double W = resolve_disorder(c);
  double worst_spread = 0.0;
  double worst_spread_2pi = 0.0;
  for (std::uint64_t seed : c.sweep.seeds) {
    const auto t0 = Clock::now();
    Point pt{static_cast<double>(c.edge.Lx), static_cast<double>(c.edge.Ly), std::nullopt, W,
             static_cast<double>(seed)};
    at_point(pt, "edge-conductance", [&] {
      const TorusRun proxy = torus_run(c, c.bulk.L, c.bulk.L, W, seed);
      pt.mu = proxy.gap.mu;
      const StripRun s = strip_run(c, c.edge.Lx, c.edge.Ly, W, seed);
      const EdgeSweep sw = edge_sweep(c, s, proxy.gap);
      double lo = sw.sigma.front().value, hi = lo;
      for (std::size_t i = 0; i < sw.sigma.size(); ++i) {
        ExperimentRecord& r = sink.add(pt, edge_label(sw.labels[i]), sw.sigma[i], proxy.gap.width());
        if (i == 0) sink.time(r, t0);
        lo = std::min(lo, sw.sigma[i].value);
        hi = std::max(hi, sw.sigma[i].value);
      }
      sink.add(pt, "sigma_E_spread", hi - lo);
      worst_spread = std::max(worst_spread, hi - lo);
      worst_spread_2pi = std::max(worst_spread_2pi, kTwoPi * (hi - lo));
      return 0;
    });
  }
  res.gates.push_back(make_gate("sigma_E_switch_spread", worst_spread, "<", c.tolerance("switch_independence")));
  Point none{};
  sink.add(none, "sigma_E_spread_two_pi_max", worst_spread_2pi);
}

// ------------------------------------------------------------ equality-study

void run_equality_study(const ExperimentConfig& c, RunResult& res) {
  Sink sink(c, res.records);
  const double W = resolve_disorder(c);
  const int L = c.bulk.L;
  const auto& sup = c.edge.g_supports.front();
  const double chi_w = c.edge.chi_half_widths.front();

  struct Out {
    std::uint64_t seed;
    GapReport gap;
    ConductanceResult sb, se;
    double ms;
  };
  auto outs = parallel_map<Out>(c.sweep.seeds.size(), c.threads, [&](std::size_t i) {
    const auto t0 = Clock::now();
    const std::uint64_t seed = c.sweep.seeds[i];
    Point pt{static_cast<double>(c.edge.Lx), static_cast<double>(c.edge.Ly), std::nullopt, W,
             static_cast<double>(seed)};
    return at_point(pt, "equality-study", [&] {
      const TorusRun bulk = torus_run(c, L, L, W, seed);
      const StripRun s = strip_run(c, c.edge.Lx, c.edge.Ly, W, seed);
      const TraceRegion region = TraceRegion::rows_below(s.r.hamiltonian.geometry, default_y_cut(c));
      Out o{seed, bulk.gap, bulk_sigma(c, bulk),
            edge_conductance(s.d, s.r.hamiltonian.entries, fermi_switch(sup), position_switch(chi_w),
                             bulk.gap, region),
            0.0};
      o.ms = elapsed_ms(t0);
      return o;
    });
  });

  long clean_index = outs.front().sb.nearest_integer;
  if (W > 0.0) {
    Point pt{static_cast<double>(L), static_cast<double>(L), std::nullopt, 0.0};
    const TorusRun clean = at_point(pt, "clean bulk", [&] { return torus_run(c, L, L, 0.0, 0); });
    const ConductanceResult sc = bulk_sigma(c, clean);
    pt.mu = clean.gap.mu;
    sink.add(pt, "sigma_B_clean", sc, clean.gap.width());
    clean_index = sc.nearest_integer;
  }

  double worst = 0.0;
  long changed = 0;
  for (const Out& o : outs) {
    Point pt{static_cast<double>(c.edge.Lx), static_cast<double>(c.edge.Ly), o.gap.mu, W,
             static_cast<double>(o.seed)};
    const double diff = std::abs(o.sb.two_pi_value - o.se.two_pi_value);
    sink.add(pt, "sigma_B", o.sb, o.gap.width());
    ExperimentRecord& r = sink.add(pt, "sigma_E", o.se, o.gap.width());
    if (c.timing) r.wall_ms = o.ms;
    sink.add(pt, "abs_two_pi_sigma_B_minus_sigma_E", diff);
    worst = std::max(worst, diff);
    if (o.sb.nearest_integer != clean_index) ++changed;
  }
  res.gates.push_back(make_gate("equality_two_pi_diff", worst, "<", c.tolerance("equality")));
  res.gates.push_back(make_gate("index_unchanged", static_cast<double>(changed), "==", 0.0));

  if (!c.edge.k_study) return;
  const std::uint64_t seed = c.sweep.seeds.front();
  const double mu = outs.front().gap.mu;

  // K on the reference strip for every a.
  {
    Point pt{static_cast<double>(c.edge.Lx), static_cast<double>(c.edge.Ly), mu, W,
             static_cast<double>(seed)};
    const StripRun s =
        at_point(pt, "K reference strip", [&] { return strip_run(c, c.edge.Lx, c.edge.Ly, W, seed); });
    const int y_cut = default_k_y_cut(c.edge.Ly, c.edge.k_y_cut);
    double worst_k = 0.0;
    for (int a : c.sweep.a) {
      pt.a = a;
      const KPair kp = at_point(pt, "K reference", [&] { return k_comparison(s, a, y_cut); });
      sink.add(pt, "K_check", kp.k_check);
      sink.add(pt, "K_hat", kp.k_hat);
      const double d = std::abs(kp.k_check.two_pi_value - kp.k_hat.two_pi_value);
      sink.add(pt, "abs_K_check_minus_K_hat", d);
      worst_k = std::max(worst_k, d);
    }
    res.gates.push_back(make_gate("K_check_vs_hat", worst_k, "<", c.tolerance("k_invariance")));
  }

  // Convergence of K(check U) and K(hat U) to the bulk index over strips
  // L x L/2 with a = L/8.
  const double target = static_cast<double>(clean_index);
  std::vector<double> gaps_check, gaps_hat;
  for (int Ls : c.sweep.L) {
    const int ly = Ls / 2;
    const int a = std::max(1, Ls / 8);
    Point pt{static_cast<double>(Ls), static_cast<double>(ly), mu, W, static_cast<double>(seed),
             static_cast<double>(a)};
    const KPair kp = at_point(pt, "K convergence", [&] {
      const StripRun s = strip_run(c, Ls, ly, W, seed);
      return k_comparison(s, a, default_k_y_cut(ly, std::nullopt));
    });
    sink.add(pt, "K_check_L", kp.k_check);
    sink.add(pt, "K_hat_L", kp.k_hat);
    sink.add(pt, "K_check_cubic", kp.check.cubic);
    sink.add(pt, "K_check_anticommutator", kp.check.anticommutator);
    sink.add(pt, "K_hat_cubic", kp.hat.cubic);
    sink.add(pt, "K_hat_anticommutator", kp.hat.anticommutator);
    sink.add(pt, "abs_K_check_minus_K_hat_L", std::abs(kp.k_check.two_pi_value - kp.k_hat.two_pi_value));
    gaps_check.push_back(std::abs(kp.k_check.two_pi_value - target));
    gaps_hat.push_back(std::abs(kp.k_hat.two_pi_value - target));
    sink.add(pt, "K_check_gap_to_index", gaps_check.back());
    sink.add(pt, "K_hat_gap_to_index", gaps_hat.back());
  }
  long increases = 0;
  for (std::size_t i = 1; i < gaps_check.size(); ++i) {
    if (!(gaps_check[i] < gaps_check[i - 1])) ++increases;
    if (!(gaps_hat[i] < gaps_hat[i - 1])) ++increases;
  }
  res.gates.push_back(make_gate("K_gap_monotone", static_cast<double>(increases), "==", 0.0));
}

// ------------------------------------------------------------ identity-suite

std::uint64_t corpus_seed(std::uint64_t base, std::uint64_t i) { return base * 1000003ULL + i; }

CMatrix poly1(const CMatrix& x) { return x - x * x; }
CMatrix poly2(const CMatrix& x) {
  const CMatrix x2 = x * x;
  return x - 3.0 * x2 + 2.0 * x2 * x;
}

// sum f_t(l) - sum l^3 over the spectrum of a Hermitian A.
double ft_minus_cubic(const RVector& eig, double t) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < eig.size(); ++i) s += ft(eig(i), t) - eig(i) * eig(i) * eig(i);
  return s;
}

CMatrix random_banded(const LatticeGeometry& g, int bandwidth, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  const Eigen::Index n = g.site_count();
  CMatrix m = CMatrix::Zero(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index col = r; col < n; ++col) {
      const auto [dx, dy] = g.displacement(r, col);
      if (std::hypot(dx, dy) > bandwidth) continue;
      const cplx v = r == col ? cplx(n01(rng), 0.0) : cplx(n01(rng), n01(rng));
      m(r, col) = v;
      m(col, r) = std::conj(v);
    }
  }
  return m;
}

void run_identity_suite(const ExperimentConfig& c, RunResult& res) {
  Sink sink(c, res.records);
  const IdentityConfig& ic = c.identity;
  const double id_tol = c.tolerance("identity");
  const double slack = c.tolerance("inequality_slack");
  double worst_general = 0.0, worst_projection = 0.0, worst_ft_cubic = 0.0, worst_poly_trace = 0.0;
  double worst_norm_bound = 0.0, worst_lipschitz = 0.0, worst_rowshift = 0.0, worst_holder = 0.0;
  long non_projection_inputs = 0, norm_bound_failures = 0, lipschitz_failures = 0;

  for (std::uint64_t base : c.sweep.seeds) {
    for (int i = 0; i < ic.pairs; ++i) {
      const std::uint64_t seed = corpus_seed(base, static_cast<std::uint64_t>(i));
      std::mt19937_64 rng(seed);
      Point pt{};
      pt.seed = static_cast<double>(seed);
      pt.L_x = ic.size;

      const CMatrix hp = random_hermitian(ic.size, rng);
      const CMatrix hq = random_hermitian(ic.size, rng);
      const IdentityReport gen = algebraic_identity_suite(hp, hq, c.tolerance("projection"));
      for (const auto& r : gen.residuals) {
        if (!r.applicable) continue;
        sink.add(pt, "general:" + r.tag, r.residual);
        worst_general = std::max(worst_general, r.residual);
      }

      const Eigen::Index rank_p = 1 + static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(ic.size - 1));
      const Eigen::Index rank_q = 1 + static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(ic.size - 1));
      const CMatrix pp = random_projection(ic.size, rank_p, rng);
      const CMatrix pq = random_projection(ic.size, rank_q, rng);
      const IdentityReport proj = algebraic_identity_suite(pp, pq, c.tolerance("projection"));
      if (!proj.inputs_are_projections) ++non_projection_inputs;
      for (const auto& r : proj.residuals) {
        sink.add(pt, "projection:" + r.tag, r.residual);
        worst_projection = std::max(worst_projection, r.residual);
      }

      // Diagonal-U pair Q = U P U* alongside the generic projection pair.
      std::uniform_real_distribution<double> angle(0.0, kTwoPi);
      CVector u(ic.size);
      for (Eigen::Index k = 0; k < u.size(); ++k) u(k) = std::polar(1.0, angle(rng));
      const CMatrix uq = hermitize(u.asDiagonal() * pp * u.conjugate().asDiagonal());
      const double d1 = std::abs((poly1(uq) - poly1(pp)).trace().real());
      const double d2 = std::abs((poly2(uq) - poly2(pp)).trace().real());
      sink.add(pt, "poly_trace:p1", d1);
      sink.add(pt, "poly_trace:p2", d2);
      worst_poly_trace = std::max({worst_poly_trace, d1, d2});

      const RVector eig_generic = hermitian_eigenvalues(hermitize(pq - pp));
      const RVector eig_diag = hermitian_eigenvalues(hermitize(uq - pp));
      for (double t : c.sweep.t) {
        Point tp = pt;
        tp.t = t;
        const double e1 = std::abs(ft_minus_cubic(eig_generic, t));
        const double e2 = std::abs(ft_minus_cubic(eig_diag, t));
        sink.add(tp, "ft_vs_cubic:projection_pair", e1);
        sink.add(tp, "ft_vs_cubic:diagonal_u_pair", e2);
        worst_ft_cubic = std::max({worst_ft_cubic, e1, e2});
      }
    }

    for (int i = 0; i < ic.fuzz_pairs; ++i) {
      const std::uint64_t seed = corpus_seed(base, 500000ULL + static_cast<std::uint64_t>(i));
      std::mt19937_64 rng(seed);
      Point pt{};
      pt.seed = static_cast<double>(seed);
      pt.L_x = ic.fuzz_size;
      const CMatrix x = random_hermitian(ic.fuzz_size, rng);
      const CMatrix y = random_hermitian(ic.fuzz_size, rng);
      const FtPerturbationReport rep = ft_perturbation_checks(x, y, c.sweep.t);
      for (const auto& row : rep.rows) {
        Point tp = pt;
        tp.t = row.t;
        const double r1 = row.norm_lhs / row.norm_rhs;
        const double r2 = std::isinf(row.lipschitz_rhs) ? 0.0 : row.lipschitz_lhs / row.lipschitz_rhs;
        sink.add(tp, "ft_norm_bound_ratio", r1);
        sink.add(tp, "ft_lipschitz_ratio", r2);
        sink.add(tp, "ft_trace_limit_residual", row.trace_limit_residual);
        worst_norm_bound = std::max(worst_norm_bound, r1);
        worst_lipschitz = std::max(worst_lipschitz, r2);
      }
      if (!rep.norm_bound_holds(slack)) ++norm_bound_failures;
      if (!rep.lipschitz_holds(slack)) ++lipschitz_failures;
      const auto [lhs, rhs] = holder_check(x, y);
      sink.add(pt, "holder_ratio", lhs / rhs);
      worst_holder = std::max(worst_holder, lhs / rhs);
    }

    const LatticeGeometry bg =
        LatticeGeometry::plane_window(ic.banded_side, ic.banded_side / 2, ic.banded_side - ic.banded_side / 2);
    for (int i = 0; i < ic.banded_operators; ++i) {
      const std::uint64_t seed = corpus_seed(base, 900000ULL + static_cast<std::uint64_t>(i));
      std::mt19937_64 rng(seed);
      const CMatrix t = random_banded(bg, ic.bandwidth, rng);
      Point pt{};
      pt.seed = static_cast<double>(seed);
      pt.L_x = ic.banded_side;
      pt.L_y = ic.banded_side;
      for (double p : {1.0, 2.0, 3.0}) {
        const SchattenReport rep = rowshift_bound(bg, t, p);
        sink.add(pt, "rowshift_ratio_p" + std::to_string(static_cast<int>(p)), rep.ratio);
        worst_rowshift = std::max(worst_rowshift, rep.ratio);
      }
    }
  }

  res.gates.push_back(make_gate("identities_general", worst_general, "<", id_tol));
  res.gates.push_back(make_gate("identities_projection", worst_projection, "<", id_tol));
  res.gates.push_back(make_gate("projection_inputs_detected", static_cast<double>(non_projection_inputs), "==", 0.0));
  res.gates.push_back(make_gate("ft_vs_cubic_projection_pairs", worst_ft_cubic, "<", c.tolerance("ft_projection")));
  res.gates.push_back(make_gate("poly_trace_diagonal_u_pairs", worst_poly_trace, "<", c.tolerance("poly_trace")));
  res.gates.push_back(make_gate("ft_norm_bound_failures", static_cast<double>(norm_bound_failures), "==", 0.0));
  res.gates.push_back(make_gate("ft_lipschitz_failures", static_cast<double>(lipschitz_failures), "==", 0.0));
  res.gates.push_back(make_gate("rowshift_ratio_max", worst_rowshift, "<=", 1.0 + slack));
  Point none{};
  sink.add(none, "ft_norm_bound_ratio_max", worst_norm_bound);
  sink.add(none, "ft_lipschitz_ratio_max", worst_lipschitz);
  res.gates.push_back(make_gate("holder_ratio_max", worst_holder, "<=", 1.0 + slack));
}

// ------------------------------------------------------------------ ft-sweep

void run_ft_sweep(const ExperimentConfig& c, RunResult& res) {
  Sink sink(c, res.records);
  const double W = resolve_disorder(c);
  const int L = c.bulk.L;
  double worst_ft_cubic = 0.0;
  for (std::uint64_t seed : c.sweep.seeds) {
    Point pt{static_cast<double>(L), static_cast<double>(L), std::nullopt, W, static_cast<double>(seed)};
    at_point(pt, "ft-sweep bulk", [&] {
      const TorusRun run = torus_run(c, L, L, W, seed);
      pt.mu = run.gap.mu;
      const LatticeGeometry& g = run.h.geometry;
      const ProjectionPair pair =
          make_pair(run.p, flux_phase(bulk_profile(c), c.bulk.center_x, c.bulk.center_y, g));
      const TraceRegion box = TraceRegion::box(g, c.bulk.center_x, c.bulk.center_y,
                                               c.bulk.region_half_width.value_or(L / 3.0));
      const FtSweep full = ft_sweep(pair, c.sweep.t, TraceRegion::full(g));
      const FtSweep local = ft_sweep(pair, c.sweep.t, box);
      const double cubic_full = TraceRegion::full(g).trace_of_product(pair.A * pair.A, pair.A);
      const ConductanceResult idx = bulk_index(pair, box);
      sink.add(pt, "tr_F_A3", idx);
      for (std::size_t i = 0; i < full.t_values.size(); ++i) {
        Point tp = pt;
        tp.t = full.t_values[i];
        const double e = std::abs(full.traces[i] - cubic_full);
        sink.add(tp, "ft_vs_cubic_full_trace", e);
        sink.add(tp, "tr_F_ft_A", ConductanceResult::from_two_pi(local.traces[i]));
        worst_ft_cubic = std::max(worst_ft_cubic, e);
      }
      return 0;
    });
  }
  res.gates.push_back(make_gate("ft_vs_cubic_bulk_pair", worst_ft_cubic, "<", c.tolerance("ft_projection")));

  // Half-plane pair with the pulled gauge, reported only.
  const std::uint64_t seed = c.sweep.seeds.front();
  Point pt{static_cast<double>(c.edge.Lx), static_cast<double>(c.edge.Ly), std::nullopt, W,
           static_cast<double>(seed)};
  at_point(pt, "ft-sweep strip", [&] {
    const TorusRun proxy = torus_run(c, L, L, W, seed);
    pt.mu = proxy.gap.mu;
    const StripRun s = strip_run(c, c.edge.Lx, c.edge.Ly, W, seed);
    const LatticeGeometry& g = s.r.hamiltonian.geometry;
    const TraceRegion region = TraceRegion::rows_below(g, default_k_y_cut(c.edge.Ly, c.edge.k_y_cut));
    for (int a : c.sweep.a) {
      Point ap = pt;
      ap.a = a;
      const ProjectionPair pair = make_pair(s.gp, pulled_phase(a, PhaseProfile::smoothed_ramp(), g));
      sink.add(ap, "K_hat", k_functional(pair, region));
      const FtSweep sw = ft_sweep(pair, c.sweep.t, region);
      for (std::size_t i = 0; i < sw.t_values.size(); ++i) {
        Point tp = ap;
        tp.t = sw.t_values[i];
        sink.add(tp, "tr_F_ft_A_hat", ConductanceResult::from_two_pi(sw.traces[i]));
      }
    }
    return 0;
  });
}

// --------------------------------------------------------------- decay-study

void add_profile(Sink& sink, const Point& pt, const std::string& name, const DecayProfile& prof) {
  for (std::size_t i = 0; i < prof.distance_bins.size(); ++i) {
    sink.add(pt, name + "_max@r=" + std::to_string(prof.distance_bins[i]), prof.max_abs_kernel[i]);
  }
  sink.add(pt, name + "_rate", prof.exponential_rate);
  sink.add(pt, name + "_poly_order", prof.polynomial_order);
  sink.add(pt, name + "_fit_first_bin", prof.fit_first_bin);
  sink.add(pt, name + "_fit_last_bin", prof.fit_last_bin);
}

struct CtModel {
  long p, q;
  double W;
};

void run_decay_study(const ExperimentConfig& c, RunResult& res) {
  Sink sink(c, res.records);
  const double W = resolve_disorder(c);
  const std::uint64_t seed = c.sweep.seeds.front();
  const SwitchFunction g = fermi_switch(c.edge.g_supports.front());

  // g(H_B) on tori of two sizes.
  std::vector<double> rates;
  for (int L : c.decay.torus_sizes) {
    Point pt{static_cast<double>(L), static_cast<double>(L), std::nullopt, W, static_cast<double>(seed)};
    const DecayProfile prof = at_point(pt, "bulk kernel decay", [&] {
      const TorusRun run = torus_run(c, L, L, W, seed);
      pt.mu = run.gap.mu;
      if (!run.gap.contains(g.lower(), g.upper())) {
        throw Error(ErrorKind::GapClosed, "supp g' is not inside the bulk gap");
      }
      return decay_profile(matrix_function(run.d, g), DecayWeight::polynomial);
    });
    add_profile(sink, pt, "g_HB", prof);
    rates.push_back(prof.exponential_rate);
  }
  const double min_rate = *std::min_element(rates.begin(), rates.end());
  const double max_rate = *std::max_element(rates.begin(), rates.end());
  res.gates.push_back(make_gate("bulk_decay_rate_positive", min_rate, ">", 0.0));
  res.gates.push_back(make_gate("bulk_decay_rate_stability", (max_rate - min_rate) / max_rate, "<=",
                                c.tolerance("decay_stability")));

  // G = g - g^2 on a cylinder (periodic x), decaying in y1 + y2 from the edge.
  {
    const int lx = c.decay.strip_Lx, ly = c.decay.strip_Ly;
    Point pt{static_cast<double>(lx), static_cast<double>(ly), std::nullopt, W, static_cast<double>(seed)};
    const DecayProfile prof = at_point(pt, "edge kernel decay", [&] {
      const TorusRun proxy = torus_run(c, c.bulk.L, c.bulk.L, W, seed);
      pt.mu = proxy.gap.mu;
      const StripRun s = strip_run(c, lx, ly, W, seed, Boundary::periodic);
      const HermitianLatticeOperator big_g =
          apply_function(s.d, [&g](double e) { return g(e) - g(e) * g(e); });
      DecayOptions opt;
      opt.y_limit = ly / 2;
      return decay_profile(big_g, DecayWeight::exponential_in_y1plusy2, opt);
    });
    add_profile(sink, pt, "G_H", prof);
    res.gates.push_back(make_gate("edge_decay_rate_positive", prof.exponential_rate, ">", 0.0));
  }

  // Combes-Thomas on 20 (model, z) pairs at half the maximal constant.
  {
    const std::vector<CtModel> models{{1, 3, 0.0}, {1, 4, 0.0}, {1, 6, 0.0}, {1, 3, 0.5}, {1, 4, 0.5}};
    const int L = c.decay.ct_torus;
    double worst = 0.0;
    long pairs = 0;
    for (std::size_t mi = 0; mi < models.size(); ++mi) {
      ExperimentConfig mc = c;
      mc.model.p = models[mi].p;
      mc.model.q = models[mi].q;
      mc.fermi = FermiConfig{};
      Point pt{static_cast<double>(L), static_cast<double>(L), std::nullopt, models[mi].W,
               static_cast<double>(seed)};
      const TorusRun run = at_point(pt, "CT model", [&] { return torus_run(mc, L, L, models[mi].W, seed); });
      const double lo = run.d.eigenvalues(0);
      const std::vector<cplx> zs{{run.gap.mu, 0.05}, {run.gap.mu, 0.3}, {run.gap.mu, 0.0}, {lo - 0.5, 0.2}};
      for (std::size_t zi = 0; zi < zs.size(); ++zi) {
        Point zp = pt;
        zp.mu = zs[zi].real();
        zp.t = zs[zi].imag();
        const CTReport rep = at_point(zp, "CT check", [&] {
          return combes_thomas_check(run.h, zs[zi], 0.5 * maximal_ct_constant(run.h, zs[zi]));
        });
        const std::string tag = "ct[p/q=" + std::to_string(models[mi].p) + "/" + std::to_string(models[mi].q) +
                                ",z" + std::to_string(zi) + "]";
        sink.add(zp, tag + "_ratio", rep.max_violation_ratio);
        sink.add(zp, tag + "_mu", rep.mu);
        worst = std::max(worst, rep.max_violation_ratio);
        ++pairs;
      }
    }
    res.gates.push_back(make_gate("ct_ratio_max", worst, "<=", c.tolerance("ct_ratio")));
    res.gates.push_back(make_gate("ct_pair_count", static_cast<double>(pairs), "==", 20.0, 20.0));
  }

  // Helffer-Sjostrand against the eigendecomposition.
  {
    auto agree = [&](int L, ResolventMode mode, const std::string& name) {
      Point pt{static_cast<double>(L), static_cast<double>(L), std::nullopt, W, static_cast<double>(seed)};
      const double diff = at_point(pt, name, [&] {
        const TorusRun run = torus_run(c, L, L, W, seed);
        pt.mu = run.gap.mu;
        HSOptions opt;
        opt.mode = mode;
        const HSResult hs = hs_matrix_function(run.h, g, opt);
        const HermitianLatticeOperator ref = matrix_function(run.d, g);
        return (hs.value.entries - ref.entries).cwiseAbs().maxCoeff();
      });
      sink.add(pt, name, diff);
      res.gates.push_back(make_gate(name, diff, "<", c.tolerance("hs_agreement")));
    };
    agree(c.decay.hs_torus, ResolventMode::spectral, "hs_vs_eig_spectral");
    agree(6, ResolventMode::direct_lu, "hs_vs_eig_direct_lu");
  }
}

// -------------------------------------------------------------- scaling-study

void run_scaling_study(const ExperimentConfig& c, RunResult& res) {
  Sink sink(c, res.records);
  const double W = resolve_disorder(c);
  const std::uint64_t seed = c.sweep.seeds.front();
  const int lx = c.scaling.Lx, ly = c.scaling.Ly;
  const int b = c.sweep.b.front();
  Point pt{static_cast<double>(lx), static_cast<double>(ly), std::nullopt, W, static_cast<double>(seed)};
  const StripRun s = at_point(pt, "scaling strip", [&] {
    const TorusRun proxy = torus_run(c, c.bulk.L, c.bulk.L, W, seed);
    pt.mu = proxy.gap.mu;
    return strip_run(c, lx, ly, W, seed);
  });
  const LatticeGeometry& g = s.r.hamiltonian.geometry;
  const PhaseProfile ramp = PhaseProfile::smoothed_ramp();
  std::vector<double> xs, ys_hat, ys_check;
  for (int a : c.sweep.a) {
    Point ap = pt;
    ap.a = a;
    ap.b = b;
    const ProjectionPair hat = make_pair(s.gp, pulled_phase(a, ramp, g));
    const BoundaryNorms nh = boundary_norms(hat, a, b, false);
    sink.add(ap, "hat_strip_hs_norm", nh.strip_hs_norm);
    sink.add(ap, "hat_strip_trace_norm", nh.strip_trace_norm);
    xs.push_back(static_cast<double>(a) / b);
    ys_hat.push_back(nh.strip_hs_norm);

    Point cp = ap;
    cp.b = std::max(1, a / 2);
    const ProjectionPair check = make_pair(s.gp, truncated_phase(flux_phase(ramp, 0.0, 0.0, g), a));
    const BoundaryNorms nc = boundary_norms(check, a, std::max(1, a / 2), false);
    sink.add(cp, "check_strip_hs_norm", nc.strip_hs_norm);
    ys_check.push_back(nc.strip_hs_norm);
  }
  const PowerFit fit = at_point(pt, "scaling fit", [&] { return fit_power_law(xs, ys_hat); });
  Point fp = pt;
  fp.b = b;
  sink.add(fp, "hat_exponent_vs_a_over_b", fit.exponent);
  sink.add(fp, "hat_prefactor", fit.prefactor);
  res.gates.push_back(make_gate("hat_strip_hs_exponent", fit.exponent, "in", c.tolerance("scaling_window"),
                                -c.tolerance("scaling_center")));
  if (ys_check.size() >= 2 && std::all_of(ys_check.begin(), ys_check.end(), [](double v) { return v > 0; })) {
    sink.add(fp, "check_exponent_vs_a", fit_power_law(xs, ys_check).exponent);
  }
}

// ----------------------------------------------------------- assumption-audit

void add_audit(Sink& sink, const Point& pt, const std::string& name, const AssumptionReport& a) {
  sink.add(pt, name + ":schatten3_cubed", a.schatten3_of_A);
  sink.add(pt, name + ":trace_norm_mixed_P", a.trace_norm_mixed[0]);
  sink.add(pt, name + ":trace_norm_mixed_Q", a.trace_norm_mixed[1]);
  sink.add(pt, name + ":trace_norm_poly1", a.trace_norm_poly[0]);
  sink.add(pt, name + ":trace_norm_poly2", a.trace_norm_poly[1]);
  sink.add(pt, name + ":trace_poly1", a.trace_of_poly_diff[0]);
  sink.add(pt, name + ":trace_poly2", a.trace_of_poly_diff[1]);
}

bool audit_finite(const AssumptionReport& a) {
  return std::isfinite(a.schatten3_of_A) && std::isfinite(a.trace_norm_mixed[0]) &&
         std::isfinite(a.trace_norm_mixed[1]) && std::isfinite(a.trace_norm_poly[0]) &&
         std::isfinite(a.trace_norm_poly[1]);
}

void run_assumption_audit(const ExperimentConfig& c, RunResult& res) {
  Sink sink(c, res.records);
  const double W = resolve_disorder(c);
  const std::uint64_t seed = c.sweep.seeds.front();
  const PhaseProfile ramp = PhaseProfile::smoothed_ramp();
  double worst_poly = 0.0;
  long non_finite = 0;
  std::vector<double> hat_s3, check_s3;
  double rowshift_ratio = 0.0;

  Point bp{static_cast<double>(c.bulk.L), static_cast<double>(c.bulk.L), std::nullopt, W,
           static_cast<double>(seed)};
  const TorusRun bulk = at_point(bp, "audit bulk", [&] { return torus_run(c, c.bulk.L, c.bulk.L, W, seed); });
  bp.mu = bulk.gap.mu;
  {
    ProjectionPair pair =
        make_pair(bulk.p, flux_phase(ramp, c.bulk.center_x, c.bulk.center_y, bulk.h.geometry));
    audit_assumptions(pair);
    add_audit(sink, bp, "bulk_wedge", pair.assumptions);
    worst_poly = std::max({worst_poly, std::abs(pair.assumptions.trace_of_poly_diff[0]),
                           std::abs(pair.assumptions.trace_of_poly_diff[1])});
    if (!audit_finite(pair.assumptions)) ++non_finite;
  }

  for (std::size_t i = 0; i < c.sweep.L.size(); ++i) {
    const int L = c.sweep.L[i];
    const int ly = L / 2;
    const int a = std::max(1, L / 8);
    Point pt{static_cast<double>(L), static_cast<double>(ly), bulk.gap.mu, W, static_cast<double>(seed),
             static_cast<double>(a)};
    at_point(pt, "audit strip", [&] {
      const StripRun s = strip_run(c, L, ly, W, seed);
      const LatticeGeometry& g = s.r.hamiltonian.geometry;
      ProjectionPair check = make_pair(s.gp, truncated_phase(flux_phase(ramp, 0.0, 0.0, g), a));
      ProjectionPair hat = make_pair(s.gp, pulled_phase(a, ramp, g));
      audit_assumptions(check);
      audit_assumptions(hat);
      add_audit(sink, pt, "check", check.assumptions);
      add_audit(sink, pt, "hat", hat.assumptions);
      for (const ProjectionPair* pr : {&check, &hat}) {
        worst_poly = std::max({worst_poly, std::abs(pr->assumptions.trace_of_poly_diff[0]),
                               std::abs(pr->assumptions.trace_of_poly_diff[1])});
        if (!audit_finite(pr->assumptions)) ++non_finite;
      }
      check_s3.push_back(check.assumptions.schatten3_of_A);
      hat_s3.push_back(hat.assumptions.schatten3_of_A);
      if (i + 1 == c.sweep.L.size()) {
        const SchattenReport rs = rowshift_bound(g, hat.A, 3.0);
        sink.add(pt, "hat:rowshift_ratio_p3", rs.ratio);
        rowshift_ratio = rs.ratio;
      }
      return 0;
    });
  }

  // ||A||_3^3 of the wedge pair on open L x L windows of the plane. On a
  // torus the wedge would wrap onto the region below the flux and add a
  // jump line of length ~ L.
  std::vector<double> bulk_s3;
  for (int L : c.sweep.L) {
    Point pt{static_cast<double>(L), static_cast<double>(L), bulk.gap.mu, W, static_cast<double>(seed)};
    bulk_s3.push_back(at_point(pt, "audit bulk window", [&] {
      const HermitianLatticeOperator h = build_bulk_hamiltonian(
          model_spec(c, W, seed), LatticeGeometry::plane_window(L, L / 2, L - L / 2));
      const HermitianLatticeOperator p = fermi_projection(h, bulk.gap.mu, 1e-10);
      const ProjectionPair pair = make_pair(p, flux_phase(ramp, c.bulk.center_x, c.bulk.center_y, h.geometry));
      return std::pow(schatten_norm(pair.A, 3.0), 3.0);
    }));
    sink.add(pt, "open_window_wedge:schatten3_cubed_L", bulk_s3.back());
  }

  auto stability = [](const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double x = v[v.size() - 2], y = v.back();
    return std::abs(y - x) / std::max(std::abs(x), std::abs(y));
  };
  Point none{};
  sink.add(none, "check_schatten3_window_change", stability(check_s3));
  sink.add(none, "hat_schatten3_window_change", stability(hat_s3));
  sink.add(none, "open_window_wedge_schatten3_window_change", stability(bulk_s3));
  res.gates.push_back(make_gate("poly_trace_physical_pairs", worst_poly, "<", c.tolerance("poly_trace")));
  res.gates.push_back(make_gate("audit_norms_finite", static_cast<double>(non_finite), "==", 0.0));
  res.gates.push_back(make_gate("audit_window_stability", stability(bulk_s3), "<",
                                c.tolerance("window_stability")));
  res.gates.push_back(make_gate("rowshift_p3_ratio", rowshift_ratio, "<=", 1.0 + c.tolerance("inequality_slack")));
}

// ------------------------------------------------------------------- output

void append_key(std::string& out, const std::optional<double>& v) {
  if (!v) {
    out += "0----------------|";
    return;
  }
  // Order-preserving encoding of the IEEE bits.
  std::uint64_t bits;
  const double d = *v == 0.0 ? 0.0 : *v;
  std::memcpy(&bits, &d, sizeof bits);
  bits = (bits & 0x8000000000000000ULL) ? ~bits : bits | 0x8000000000000000ULL;
  char buf[20];
  std::snprintf(buf, sizeof buf, "1%016llx|", static_cast<unsigned long long>(bits));
  out += buf;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
  f << text;
  f.close();
  if (!f) throw Error(ErrorKind::IoFailure, "write failed for " + path.string());
}

}  // namespace

std::string ExperimentRecord::key() const {
  std::string k = experiment + "|";
  for (const auto* v : {&L_x, &L_y, &p, &q, &mu, &W, &seed, &a, &b, &t}) append_key(k, *v);
  return k + functional;
}

bool RunResult::all_pass() const {
  return std::all_of(gates.begin(), gates.end(), [](const Gate& g) { return g.pass; });
}

RunResult run(const ExperimentConfig& config) {
  validate(config);
  RunResult res;
  res.config = config;
  switch (config.experiment) {
    case ExperimentKind::bulk_index: run_bulk_index(config, res); break;
    case ExperimentKind::edge_conductance: run_edge_conductance(config, res); break;
    case ExperimentKind::equality_study: run_equality_study(config, res); break;
    case ExperimentKind::identity_suite: run_identity_suite(config, res); break;
    case ExperimentKind::ft_sweep: run_ft_sweep(config, res); break;
    case ExperimentKind::decay_study: run_decay_study(config, res); break;
    case ExperimentKind::scaling_study: run_scaling_study(config, res); break;
    case ExperimentKind::assumption_audit: run_assumption_audit(config, res); break;
  }
  res.records = normalize(std::move(res.records));
  std::sort(res.gates.begin(), res.gates.end(), [](const Gate& x, const Gate& y) { return x.name < y.name; });
  return res;
}

std::vector<ExperimentRecord> normalize(std::vector<ExperimentRecord> records) {
  std::vector<std::pair<std::string, std::size_t>> keyed;
  keyed.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) keyed.emplace_back(records[i].key(), i);
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<ExperimentRecord> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < keyed.size(); ++i) {
    if (i > 0 && keyed[i].first == keyed[i - 1].first) continue;
    out.push_back(std::move(records[keyed[i].second]));
  }
  return out;
}

std::string csv_header() {
  return "experiment,L_x,L_y,p,q,mu,W,seed,a,b,t,functional,value,two_pi_value,nearest_int,gap,wall_ms,"
         "config_hash,build_id";
}

std::string to_csv(const std::vector<ExperimentRecord>& records, const std::string& config_hash,
                   const std::string& build) {
  std::string out = csv_header() + "\n";
  for (const auto& r : records) {
    out += csv_quote(r.experiment);
    for (const auto* v : {&r.L_x, &r.L_y, &r.p, &r.q, &r.mu, &r.W, &r.seed, &r.a, &r.b, &r.t}) {
      out += ',' + fmt(*v);
    }
    out += ',' + csv_quote(r.functional) + ',' + fmt(r.value);
    for (const auto* v : {&r.two_pi_value, &r.nearest_int, &r.gap, &r.wall_ms}) out += ',' + fmt(*v);
    out += ',' + config_hash + ',' + csv_quote(build) + '\n';
  }
  return out;
}

std::string summary_json(const RunResult& result) {
  nlohmann::ordered_json j;
  j["experiment"] = to_string(result.config.experiment);
  j["config_hash"] = config_hash(result.config);
  j["build_id"] = build_id();
  j["all_pass"] = result.all_pass();
  j["records"] = result.records.size();
  nlohmann::ordered_json gates = nlohmann::ordered_json::array();
  std::vector<Gate> sorted = result.gates;
  std::sort(sorted.begin(), sorted.end(), [](const Gate& x, const Gate& y) { return x.name < y.name; });
  for (const Gate& g : sorted) {
    nlohmann::ordered_json e;
    e["name"] = g.name;
    e["value"] = std::isfinite(g.value) ? nlohmann::ordered_json(g.value) : nlohmann::ordered_json(fmt(g.value));
    e["comparison"] = g.comparison;
    e["threshold"] = g.threshold;
    e["target"] = g.target;
    e["pass"] = g.pass;
    gates.push_back(e);
  }
  j["gates"] = gates;
  return j.dump(2) + "\n";
}

void emit(const RunResult& result, const std::string& dir) {
  if (result.records.empty()) throw Error(ErrorKind::InvalidArgument, "no records to emit");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoFailure, "cannot create " + dir + ": " + ec.message());
  const std::string name = to_string(result.config.experiment);
  const std::filesystem::path base(dir);
  write_file(base / (name + ".csv"), to_csv(result.records, config_hash(result.config), build_id()));
  write_file(base / (name + "_summary.json"), summary_json(result));
}

}  // namespace qhall
