// Square-lattice geometry, Hofstadter Hamiltonians on finite windows, the
// Dirichlet half-plane restriction with its edge term, and the locality and
// spectral-gap checks that the bulk/edge theory assumes.
#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/SparseCore>

#include "qhall/dense.hpp"

namespace qhall {

enum class Boundary { open, periodic };
enum class DomainKind { bulk_plane, half_plane };

/// Lattice coordinates of a site (not window indices).
struct Site {
  int x = 0;
  int y = 0;
  friend bool operator==(const Site&, const Site&) = default;
};

/// A finite rectangular window of Z^2. Window column i and row j hold the
/// lattice site (i - origin_x, j - origin_y); sites are numbered row-major,
/// index = j * width_x + i.
struct LatticeGeometry {
  int width_x = 0;
  int height_y = 0;
  Boundary x_boundary = Boundary::open;
  Boundary y_boundary = Boundary::open;
  DomainKind domain_kind = DomainKind::bulk_plane;
  int origin_x = 0;
  int origin_y = 0;

  /// Periodic in both directions, lattice origin at the window centre.
  static LatticeGeometry torus(int width, int height);
  /// Open window of the plane covering rows y in [-rows_below, rows_above).
  static LatticeGeometry plane_window(int width, int rows_below, int rows_above,
                                      Boundary x_boundary = Boundary::open);
  /// Half-plane strip: x centred on 0, rows y in [0, height).
  static LatticeGeometry half_plane_strip(int width, int height);

  void validate() const;
  Eigen::Index site_count() const {
    return static_cast<Eigen::Index>(width_x) * static_cast<Eigen::Index>(height_y);
  }
  bool contains(Site s) const;
  Eigen::Index index(Site s) const;
  Site site(Eigen::Index index) const;

  int min_x() const { return -origin_x; }
  int max_x() const { return width_x - 1 - origin_x; }
  int min_y() const { return -origin_y; }
  int max_y() const { return height_y - 1 - origin_y; }

  /// r1 - r2, minimum image along periodic axes.
  std::pair<int, int> displacement(Eigen::Index i1, Eigen::Index i2) const;
  double distance(Eigen::Index i1, Eigen::Index i2) const;

  friend bool operator==(const LatticeGeometry&, const LatticeGeometry&) = default;
};

/// Hofstadter model data. Flux per plaquette is p/q flux quanta.
struct ModelSpec {
  long flux_numerator = 0;
  long flux_denominator = 1;
  double hopping_amplitude = 1.0;
  double disorder_amplitude = 0.0;
  std::uint64_t disorder_seed = 0;
  int hopping_range = 1;
  double decay_rate_mu0 = 1.0;

  /// Validated copy with p/q in lowest terms and q > 0.
  ModelSpec reduced() const;
};

struct HermitianLatticeOperator {
  LatticeGeometry geometry;
  CMatrix entries;

  Eigen::Index size() const { return entries.rows(); }
};

using SparseCMatrix = Eigen::SparseMatrix<cplx, Eigen::ColMajor>;

/// E = J H - H_B J, mapping half-plane sites into the bulk window, with the
/// fitted constants of the bound sum_{r'} |E(r,r')| <= C exp(-kappa |y|).
struct EdgeTerm {
  LatticeGeometry bulk_geometry;
  LatticeGeometry half_geometry;
  SparseCMatrix entries;
  /// Largest row sum of |E| in each bulk row, indexed by y - bulk min_y.
  std::vector<double> row_sum_by_y;
  /// Fitted decay rate; +inf when E lives on a single row.
  double decay_constant = std::numeric_limits<double>::infinity();
  /// Smallest C with row sums <= C exp(-mu0 |y|).
  double bound_constant_mu0 = 0.0;
  double mu0 = 1.0;
};

struct HalfPlaneRestriction {
  HermitianLatticeOperator hamiltonian;
  EdgeTerm edge;
};

struct LocalityReport {
  double supremum = 0.0;
  Eigen::Index worst_row = 0;
  double cap = 0.0;
  bool pass = false;
};

struct GapReport {
  double mu = 0.0;
  /// Open spectral gap (lower, upper) containing mu; infinite when mu lies
  /// outside the spectrum on that side.
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  Eigen::Index states_below = 0;

  double width() const { return upper - lower; }
  bool contains(double lo, double hi) const { return lower < lo && hi < upper; }
};

HermitianLatticeOperator build_bulk_hamiltonian(const ModelSpec& spec, const LatticeGeometry& geom);

HalfPlaneRestriction restrict_half_plane(const HermitianLatticeOperator& bulk, double mu0 = 1.0);

LocalityReport verify_locality(const HermitianLatticeOperator& h, double mu0, double cap = 1e6);

/// Sum over r of |H(r0, r0 + r)| (exp(mu |r|) - 1), maximised over r0.
double locality_sum(const HermitianLatticeOperator& h, double mu);

GapReport spectral_gap(const HermitianLatticeOperator& h, double mu, double tolerance = 1e-8);
GapReport spectral_gap(const RVector& sorted_eigenvalues, double mu, double tolerance = 1e-8);

/// Gap between eigenvalue number `filled` and `filled + 1` of a sorted
/// spectrum; mu is placed at the midpoint.
GapReport gap_above_filling(const RVector& sorted_eigenvalues, Eigen::Index filled);

}  // namespace qhall
