#include "qhall/conductance.hpp"

#include <cmath>

namespace qhall {

TraceRegion TraceRegion::full(const LatticeGeometry& g) {
  return {RVector::Ones(g.site_count())};
}

TraceRegion TraceRegion::box(const LatticeGeometry& g, double cx, double cy, double half_width) {
  TraceRegion r{RVector::Zero(g.site_count())};
  for (Eigen::Index k = 0; k < g.site_count(); ++k) {
    const Site s = g.site(k);
    if (std::abs(s.x - cx) < half_width && std::abs(s.y - cy) < half_width) r.weight(k) = 1.0;
  }
  return r;
}

TraceRegion TraceRegion::rows_below(const LatticeGeometry& g, int y_cut) {
  TraceRegion r{RVector::Zero(g.site_count())};
  for (Eigen::Index k = 0; k < g.site_count(); ++k) {
    if (g.site(k).y < y_cut) r.weight(k) = 1.0;
  }
  return r;
}

double TraceRegion::trace_of_diagonal(const CVector& diagonal) const {
  if (diagonal.size() != weight.size()) {
    throw Error(ErrorKind::DimensionMismatch, "trace region and operator sizes differ");
  }
  return (diagonal.real().array() * weight.array()).sum();
}

double TraceRegion::trace_of_product(const CMatrix& a, const CMatrix& b) const {
  return trace_of_diagonal(diagonal_of_product(a, b));
}

bool AssumptionReport::pass() const {
  for (double v : trace_of_poly_diff) {
    if (!(std::abs(v) < tolerance)) return false;
  }
  if (norms_computed) {
    const double all[] = {schatten3_of_A, trace_norm_mixed[0], trace_norm_mixed[1],
                          trace_norm_poly[0], trace_norm_poly[1]};
    for (double v : all) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

ProjectionPair make_pair(const HermitianLatticeOperator& p, const GaugePhase& u) {
  const Eigen::Index n = p.size();
  if (p.entries.cols() != n || u.phases.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "projection and gauge sizes differ");
  }
  ProjectionPair pair;
  pair.geometry = p.geometry;
  pair.gauge = u;
  pair.P = p.entries;
  pair.Q = u.conjugate(pair.P);
  pair.A = pair.Q - pair.P;
  pair.B = CMatrix::Identity(n, n) - pair.P - pair.Q;
  pair.P2 = pair.P * pair.P;
  pair.Q2 = pair.Q * pair.Q;
  pair.idempotency_residual = n == 0 ? 0.0 : (pair.P2 - pair.P).cwiseAbs().maxCoeff();

  const double d1 = (pair.Q.trace() - pair.P.trace()).real();
  const double d2 = (pair.Q2.trace() - pair.P2.trace()).real();
  const double d3 = diagonal_of_product(pair.Q2, pair.Q).sum().real() -
                    diagonal_of_product(pair.P2, pair.P).sum().real();
  pair.assumptions.trace_of_poly_diff[0] = d1 - d2;
  pair.assumptions.trace_of_poly_diff[1] = d1 - 3.0 * d2 + 2.0 * d3;
  return pair;
}

namespace {

double schatten_sum(const CMatrix& m, double p) {
  const RVector s = singular_values(m);
  return s.array().pow(p).sum();
}

}  // namespace

void audit_assumptions(ProjectionPair& pair) {
  AssumptionReport& r = pair.assumptions;
  const CMatrix pp = pair.P - pair.P2;
  const CMatrix qq = pair.Q - pair.Q2;
  r.schatten3_of_A = schatten_sum(pair.A, 3.0);
  r.trace_norm_mixed[0] = schatten_sum(pair.A * pp, 1.0);
  r.trace_norm_mixed[1] = schatten_sum(pp * pair.A, 1.0);
  r.trace_norm_poly[0] = schatten_sum(qq - pp, 1.0);
  // p(l) = (1 - 2 l)(l - l^2)
  const CMatrix pq = qq - 2.0 * (pair.Q * qq);
  const CMatrix pp3 = pp - 2.0 * (pair.P * pp);
  r.trace_norm_poly[1] = schatten_sum(pq - pp3, 1.0);
  r.norms_computed = true;
}

ConductanceResult ConductanceResult::from_two_pi(double two_pi_value) {
  ConductanceResult r;
  r.two_pi_value = two_pi_value;
  r.value = two_pi_value / kTwoPi;
  r.nearest_integer = std::lround(two_pi_value);
  r.integer_gap = std::abs(two_pi_value - static_cast<double>(r.nearest_integer));
  return r;
}

ConductanceResult ConductanceResult::from_value(double value) {
  return from_two_pi(kTwoPi * value);
}

ConductanceResult bulk_index(const ProjectionPair& pair, const TraceRegion& region,
                             double projection_tolerance) {
  if (!(pair.idempotency_residual < projection_tolerance)) {
    throw Error(ErrorKind::NotAProjection,
                "idempotency residual " + std::to_string(pair.idempotency_residual));
  }
  const CMatrix a2 = pair.A * pair.A;
  return ConductanceResult::from_two_pi(region.trace_of_product(a2, pair.A));
}

long counting_index(const ProjectionPair& pair, const TraceRegion& region, double threshold) {
  const EigenPairs e = hermitian_eigen(pair.A);
  long index = 0;
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    const double l = e.values(i);
    const bool plus = std::abs(l - 1.0) < threshold;
    const bool minus = std::abs(l + 1.0) < threshold;
    if (!plus && !minus) continue;
    const double w = (e.vectors.col(i).cwiseAbs2().array() * region.weight.array()).sum();
    if (w > 0.5) index += plus ? 1 : -1;
  }
  return index;
}

ConductanceResult edge_conductance(const SpectralDecomposition& h_spec, const CMatrix& h,
                                   const SwitchFunction& g, const SwitchFunction& chi,
                                   const GapReport& bulk_gap, const TraceRegion& region) {
  if (!bulk_gap.contains(g.lower(), g.upper())) {
    throw Error(ErrorKind::GapClosed, "supp g' is not inside the bulk gap");
  }
  const LatticeGeometry& geom = h_spec.geometry;
  const Eigen::Index n = h.rows();
  RVector dg(n);
  for (Eigen::Index i = 0; i < n; ++i) dg(i) = g.derivative(h_spec.eigenvalues(i), 1);
  const CMatrix gp = reconstruct(h_spec.eigenvectors, dg);
  RVector cx(n);
  for (Eigen::Index i = 0; i < n; ++i) cx(i) = chi(geom.site(i).x);
  // i[H, chi]_{jk} = i H_{jk} (chi_k - chi_j)
  CMatrix c(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index j = 0; j < n; ++j) c(j, k) = cplx(0.0, 1.0) * h(j, k) * (cx(k) - cx(j));
  }
  return ConductanceResult::from_value(-region.trace_of_product(gp, c));
}

ConductanceResult edge_conductance(const HermitianLatticeOperator& h, const SwitchFunction& g,
                                   const SwitchFunction& chi, const GapReport& bulk_gap,
                                   const TraceRegion& region) {
  return edge_conductance(decompose(h), h.entries, g, chi, bulk_gap, region);
}

KParts k_parts(const ProjectionPair& pair, const TraceRegion& region) {
  const CMatrix s = (pair.Q - pair.Q2) + (pair.P - pair.P2);
  const CMatrix a2 = pair.A * pair.A;
  KParts k;
  k.cubic = region.trace_of_product(a2, pair.A);
  k.anticommutator =
      1.5 * (region.trace_of_product(pair.A, s) + region.trace_of_product(s, pair.A));
  return k;
}

ConductanceResult k_functional(const ProjectionPair& pair, const TraceRegion& region) {
  if (!pair.assumptions.pass()) {
    throw Error(ErrorKind::AssumptionsViolated,
                "tr(p(Q) - p(P)) = " + std::to_string(pair.assumptions.trace_of_poly_diff[0]) +
                    ", " + std::to_string(pair.assumptions.trace_of_poly_diff[1]));
  }
  return ConductanceResult::from_two_pi(k_parts(pair, region).total());
}

double ft(double lambda, double t) {
  const double l2 = lambda * lambda;
  return (1.0 + t) * l2 * lambda / (1.0 + t * l2);
}

FtSweep ft_sweep(const ProjectionPair& pair, const std::vector<double>& t_values,
                 const TraceRegion& region) {
  for (double t : t_values) {
    if (!(t >= 0.0)) throw Error(ErrorKind::InvalidArgument, "t must be >= 0");
  }
  const EigenPairs e = hermitian_eigen(pair.A);
  const RVector w = region.weight.transpose() * e.vectors.cwiseAbs2();
  FtSweep out;
  out.t_values = t_values;
  for (double t : t_values) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < e.values.size(); ++i) s += ft(e.values(i), t) * w(i);
    out.traces.push_back(s);
  }
  return out;
}

double ft_trace(const ProjectionPair& pair, double t, const TraceRegion& region) {
  return ft_sweep(pair, {t}, region).traces.front();
}

InvarianceReport deformation_invariance(const ProjectionPair& pair1, const ProjectionPair& pair2,
                                        const TraceRegion& region) {
  if (pair1.P.rows() != pair2.P.rows() ||
      (pair1.P.size() > 0 && (pair1.P - pair2.P).cwiseAbs().maxCoeff() > 0.0)) {
    throw Error(ErrorKind::DifferentP, "deformation invariance needs a common P");
  }
  InvarianceReport r;
  r.k1 = k_parts(pair1, region).total();
  r.k2 = k_parts(pair2, region).total();
  r.difference = std::abs(r.k1 - r.k2);
  r.trace_q_difference = (pair2.Q.trace() - pair1.Q.trace()).real();
  return r;
}

}  // namespace qhall
