#include "qhall/identities.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/QR>

#include "qhall/conductance.hpp"

namespace qhall {

double IdentityReport::max_applicable_residual() const {
  double m = 0.0;
  for (const auto& r : residuals) {
    if (r.applicable) m = std::max(m, r.residual);
  }
  return m;
}

bool IdentityReport::pass(double tolerance) const {
  for (const auto& r : residuals) {
    if (r.applicable && !(r.residual < tolerance)) return false;
  }
  return true;
}

double ft_scalar_identity_residual() {
  const double ts[] = {0.0, 0.1, 1.0, 10.0, 1e4};
  double worst = 0.0;
  for (double t : ts) {
    for (int i = 0; i <= 3000; ++i) {
      const double l = -1.5 + 3.0 * i / 3000.0;
      const double l2 = l * l;
      const double rhs = l2 * l + t * l2 / (1.0 + t * l2) * (l - l2 * l);
      worst = std::max(worst, std::abs(ft(l, t) - rhs));
    }
  }
  return worst;
}

IdentityReport algebraic_identity_suite(const CMatrix& p, const CMatrix& q,
                                        double projection_tolerance) {
  if (p.rows() != p.cols() || q.rows() != q.cols() || p.rows() != q.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "identity suite needs equal square operators");
  }
  const Eigen::Index n = p.rows();
  const CMatrix one = CMatrix::Identity(n, n);
  const CMatrix a = q - p;
  const CMatrix b = one - p - q;
  const CMatrix a2 = a * a;
  const CMatrix a3 = a2 * a;
  const CMatrix pp = p - p * p;
  const CMatrix qq = q - q * q;
  const CMatrix qp = q * p;
  const CMatrix pq = p * q;
  const CMatrix nq = one - q;
  const CMatrix np = one - p;
  const CMatrix c = one - a2 - b * b;

  IdentityReport rep;
  rep.inputs_are_projections = n == 0 || (idempotency_residual(p) < projection_tolerance &&
                                          idempotency_residual(q) < projection_tolerance);
  auto add = [&rep](const char* tag, const CMatrix& residual, bool general) {
    rep.residuals.push_back({tag, residual.norm(), general || rep.inputs_are_projections});
  };

  const CMatrix lhs = a - a3;
  const CMatrix qp_pq = commutator(qp, pq);
  add("proj_cubic_commutator", lhs - qp_pq, false);
  add("proj_nested_commutator", qp_pq - commutator(qp, commutator(p, a)), false);
  add("proj_A2_commutes_P", commutator(p, a2), false);
  add("proj_A2_commutes_Q", commutator(q, a2), false);

  rep.residuals.push_back({"ft_scalar", ft_scalar_identity_residual(), true});

  const CMatrix cubic_line1 = 0.5 * qp_pq - 0.5 * commutator(nq * np, np * nq);
  const CMatrix cubic_line2 = (one - 2.0 * q) * qq - (one - 2.0 * p) * pp;
  const CMatrix cubic_line3 = 1.5 * anticommutator(a, qq + pp);
  add("cubic_expansion", lhs - (cubic_line1 + cubic_line2 + cubic_line3), true);

  const CMatrix corr = commutator(a, qq - pp);
  add("A2_commutator_P", commutator(p, a2) - corr, true);
  add("A2_commutator_Q", commutator(q, a2) - corr, true);

  const CMatrix ab = anticommutator(a, b);
  add("AB_anticommutator", ab - 2.0 * (qq - pp), true);
  add("C_square_sum", c - 2.0 * (qq + pp), true);

  const CMatrix bc_line1 = 0.25 * commutator(b, commutator(b, a));
  const CMatrix bc_line2 = 0.25 * anticommutator(b, ab) - 0.25 * anticommutator(a, c);
  const CMatrix bc_line3 = 0.75 * anticommutator(a, c);
  add("BC_expansion_line1", bc_line1 - cubic_line1, true);
  add("BC_expansion_line2", bc_line2 - cubic_line2, true);
  add("BC_expansion_line3", bc_line3 - cubic_line3, true);
  add("BC_expansion", lhs - (bc_line1 + bc_line2 + bc_line3), true);

  add("A2_B_commutator", commutator(a2, b) - commutator(a, ab), true);
  return rep;
}

CMatrix random_hermitian(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = cplx(normal(rng), normal(rng));
  }
  CMatrix h = hermitize(m);
  const RVector ev = hermitian_eigenvalues(h);
  const double norm = n == 0 ? 1.0 : std::max(std::abs(ev(0)), std::abs(ev(n - 1)));
  return hermitize(h / norm);
}

CMatrix random_projection(Eigen::Index n, Eigen::Index rank, std::mt19937_64& rng) {
  if (rank < 0 || rank > n) throw Error(ErrorKind::InvalidArgument, "rank out of range");
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix m(n, rank);
  for (Eigen::Index j = 0; j < rank; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) m(i, j) = cplx(normal(rng), normal(rng));
  }
  const CMatrix basis = Eigen::HouseholderQR<CMatrix>(m).householderQ() * CMatrix::Identity(n, rank);
  return hermitize(basis * basis.adjoint());
}

}  // namespace qhall
