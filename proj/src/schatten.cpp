#include "qhall/schatten.hpp"

#include <cmath>
#include <limits>
#include <map>

namespace qhall {

double schatten_norm(const CMatrix& t, double p) {
  if (!(p >= 1.0)) throw Error(ErrorKind::InvalidArgument, "Schatten index p must be >= 1");
  const RVector s = singular_values(t);
  return std::pow(s.array().pow(p).sum(), 1.0 / p);
}

SchattenReport rowshift_bound(const LatticeGeometry& g, const CMatrix& t, double p) {
  if (!(p >= 1.0)) throw Error(ErrorKind::InvalidArgument, "Schatten index p must be >= 1");
  if (t.rows() != g.site_count() || t.cols() != g.site_count()) {
    throw Error(ErrorKind::DimensionMismatch, "operator does not match geometry");
  }
  std::map<std::pair<int, int>, double> shifts;
  for (Eigen::Index c = 0; c < t.cols(); ++c) {
    const Site sc = g.site(c);
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
      const double v = std::abs(t(r, c));
      if (v == 0.0) continue;
      const Site sr = g.site(r);
      shifts[{sr.x - sc.x, sr.y - sc.y}] += std::pow(v, p);
    }
  }
  SchattenReport rep;
  rep.p = p;
  for (const auto& kv : shifts) rep.bound_value += std::pow(kv.second, 1.0 / p);
  rep.norm_value = schatten_norm(t, p);
  rep.ratio = rep.bound_value > 0.0 ? rep.norm_value / rep.bound_value : 0.0;
  return rep;
}

SchattenReport rowshift_bound(const HermitianLatticeOperator& t, double p) {
  return rowshift_bound(t.geometry, t.entries, p);
}

namespace {

CMatrix ft_matrix(const EigenPairs& e, double t) {
  RVector w(e.values.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = ft(e.values(i), t);
  return reconstruct(e.vectors, w);
}

}  // namespace

bool FtPerturbationReport::norm_bound_holds(double slack) const {
  for (const auto& r : rows) {
    if (r.norm_lhs > r.norm_rhs * (1.0 + slack) + slack) return false;
  }
  return true;
}

bool FtPerturbationReport::lipschitz_holds(double slack) const {
  for (const auto& r : rows) {
    if (r.lipschitz_lhs > r.lipschitz_rhs * (1.0 + slack) + slack) return false;
  }
  return true;
}

FtPerturbationReport ft_perturbation_checks(const CMatrix& x, const CMatrix& y,
                                            const std::vector<double>& t_values) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "X and Y differ in size");
  }
  const EigenPairs ex = hermitian_eigen(x);
  const EigenPairs ey = hermitian_eigen(y);
  const double x3 = ex.values.cwiseAbs().array().cube().sum();
  FtPerturbationReport rep;
  rep.trace_norm_difference = schatten_norm(x - y, 1.0);
  const double tr_diff = (x - y).trace().real();
  for (double t : t_values) {
    if (!(t >= 0.0)) throw Error(ErrorKind::InvalidArgument, "t must be >= 0");
    FtPerturbationRow row;
    row.t = t;
    const CMatrix fx = ft_matrix(ex, t);
    const CMatrix fy = ft_matrix(ey, t);
    double a1 = 0.0;
    for (Eigen::Index i = 0; i < ex.values.size(); ++i) a1 += std::abs(ft(ex.values(i), t));
    row.norm_lhs = a1;
    row.norm_rhs = (1.0 + t) * x3;
    row.lipschitz_lhs = schatten_norm(fx - fy, 1.0);
    row.lipschitz_rhs = t > 0.0 ? 3.0 * (1.0 + 1.0 / t) * rep.trace_norm_difference
                         : std::numeric_limits<double>::infinity();
    row.trace_limit_residual = std::abs((fx - fy).trace().real() - tr_diff);
    rep.rows.push_back(row);
  }
  return rep;
}

std::pair<double, double> holder_check(const CMatrix& a, const CMatrix& b) {
  return {schatten_norm(a * b, 1.0), schatten_norm(a, 3.0) * schatten_norm(b, 1.5)};
}

BoundaryNorms boundary_norms(const ProjectionPair& pair, int a, int b, bool restricted) {
  BoundaryNorms out;
  out.a = a;
  out.b = b;
  const Eigen::Index n = pair.A.rows();
  std::vector<Eigen::Index> strip;
  RVector rest = RVector::Ones(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (pair.geometry.site(k).y < b) {
      strip.push_back(k);
      rest(k) = 0.0;
    }
  }
  // (Q_a - P) F_b has nonzero columns only on the strip
  CMatrix cols(n, static_cast<Eigen::Index>(strip.size()));
  for (std::size_t j = 0; j < strip.size(); ++j) cols.col(static_cast<Eigen::Index>(j)) = pair.A.col(strip[j]);
  out.strip_trace_norm = strip.empty() ? 0.0 : schatten_norm(cols, 1.0);
  out.strip_hs_norm = cols.norm();
  if (restricted) {
    const CMatrix a_rest = pair.A * rest.asDiagonal();
    out.restricted_pp = schatten_norm(a_rest * (pair.P - pair.P2), 1.0);
    out.restricted_qq = schatten_norm(a_rest * (pair.Q - pair.Q2), 1.0);
  }
  return out;
}

PowerFit fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw Error(ErrorKind::InsufficientGrid, "power-law fit needs at least two points");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) {
      throw Error(ErrorKind::InsufficientGrid, "power-law fit needs positive data");
    }
    const double lx = std::log(xs[i]);
    const double ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = m * sxx - sx * sx;
  if (!(std::abs(den) > 0.0)) throw Error(ErrorKind::InsufficientGrid, "degenerate abscissae");
  PowerFit fit;
  fit.exponent = (m * sxy - sx * sy) / den;
  fit.prefactor = std::exp((sy - fit.exponent * sx) / m);
  return fit;
}

}  // namespace qhall
