// Bulk index, edge conductance, the K functional and f_t-regularised traces
// of a projection pair (P, Q = U P U*).
//
// On a finite window every full trace of these odd functionals vanishes,
// because the flux of U is compensated by an image flux at the window
// boundary. The physical quantities are therefore traced over a region F
// that contains the flux centre (bulk) or the relevant stretch of boundary
// (edge) but not the compensating part: tr_F X = sum_{r in F} X(r, r).
#pragma once

#include <vector>

#include "qhall/gauge.hpp"
#include "qhall/spectral.hpp"

namespace qhall {

struct TraceRegion {
  /// 1 on sites of F, 0 elsewhere.
  RVector weight;

  static TraceRegion full(const LatticeGeometry& g);
  /// Sites with |x - cx| < half_width and |y - cy| < half_width.
  static TraceRegion box(const LatticeGeometry& g, double cx, double cy, double half_width);
  /// Sites with y < y_cut.
  static TraceRegion rows_below(const LatticeGeometry& g, int y_cut);

  double trace_of_diagonal(const CVector& diagonal) const;
  /// tr_F(a b) in O(n^2).
  double trace_of_product(const CMatrix& a, const CMatrix& b) const;
  Eigen::Index size() const { return weight.size(); }
};

struct AssumptionReport {
  /// ||A||_3^3.
  double schatten3_of_A = 0.0;
  /// ||(Q-P)(P-P^2)||_1 and ||(P-P^2)(Q-P)||_1.
  double trace_norm_mixed[2] = {0.0, 0.0};
  /// ||p(Q) - p(P)||_1 for p = l - l^2 and p = l - 3 l^2 + 2 l^3.
  double trace_norm_poly[2] = {0.0, 0.0};
  /// tr(p(Q) - p(P)) for the same two polynomials.
  double trace_of_poly_diff[2] = {0.0, 0.0};
  bool norms_computed = false;
  double tolerance = 1e-10;

  bool pass() const;
};

struct ProjectionPair {
  LatticeGeometry geometry;
  GaugePhase gauge;
  CMatrix P, Q, A, B;
  CMatrix P2, Q2;
  double idempotency_residual = 0.0;
  AssumptionReport assumptions;
};

/// Builds Q = U P U*, A = Q - P, B = 1 - P - Q, the squares, and the trace
/// part of the assumption report.
ProjectionPair make_pair(const HermitianLatticeOperator& p, const GaugePhase& u);

/// Adds the Schatten norms to the assumption report (several SVDs).
void audit_assumptions(ProjectionPair& pair);

struct ConductanceResult {
  double value = 0.0;
  double two_pi_value = 0.0;
  long nearest_integer = 0;
  double integer_gap = 0.0;

  static ConductanceResult from_value(double value);
  static ConductanceResult from_two_pi(double two_pi_value);
};

/// tr_F(A^3) / 2 pi. Throws NotAProjection unless ||P^2 - P|| < tol.
ConductanceResult bulk_index(const ProjectionPair& pair, const TraceRegion& region,
                             double projection_tolerance = 1e-8);

/// Index by eigenvalue counting: eigenvectors of A at +1 minus those at -1,
/// each counted when its weight inside F exceeds 1/2.
long counting_index(const ProjectionPair& pair, const TraceRegion& region, double threshold = 1e-6);

/// -tr_F(g'(H) i[H, chi(x)]). The bulk gap must contain supp g'.
ConductanceResult edge_conductance(const SpectralDecomposition& h_spec, const CMatrix& h,
                                   const SwitchFunction& g, const SwitchFunction& chi,
                                   const GapReport& bulk_gap, const TraceRegion& region);
ConductanceResult edge_conductance(const HermitianLatticeOperator& h, const SwitchFunction& g,
                                   const SwitchFunction& chi, const GapReport& bulk_gap,
                                   const TraceRegion& region);

struct KParts {
  double cubic = 0.0;          // tr_F A^3
  double anticommutator = 0.0; // tr_F 3/2 {A, (Q-Q^2) + (P-P^2)}
  double total() const { return cubic + anticommutator; }
};

KParts k_parts(const ProjectionPair& pair, const TraceRegion& region);
/// K(U) / 2 pi. Throws AssumptionsViolated when the trace part of the
/// assumption report fails.
ConductanceResult k_functional(const ProjectionPair& pair, const TraceRegion& region);

/// f_t(l) = (1 + t) l^3 / (1 + t l^2).
double ft(double lambda, double t);

struct FtSweep {
  std::vector<double> t_values;
  std::vector<double> traces;
};

/// tr_F f_t(A) for every t from one eigendecomposition of A.
FtSweep ft_sweep(const ProjectionPair& pair, const std::vector<double>& t_values,
                 const TraceRegion& region);
double ft_trace(const ProjectionPair& pair, double t, const TraceRegion& region);

struct InvarianceReport {
  double k1 = 0.0;
  double k2 = 0.0;
  double difference = 0.0;
  /// tr(Q2 - Q1), full trace.
  double trace_q_difference = 0.0;
};

/// Throws DifferentP when the two pairs do not share P.
InvarianceReport deformation_invariance(const ProjectionPair& pair1, const ProjectionPair& pair2,
                                        const TraceRegion& region);

}  // namespace qhall
