// Schatten norms, the shift-diagonal bound on them, the f_t perturbation
// inequalities, and the boundary-strip norms of Q_a - P.
#pragma once

#include <vector>

#include "qhall/conductance.hpp"

namespace qhall {

struct SchattenReport {
  double p = 1.0;
  double norm_value = 0.0;
  double bound_value = 0.0;
  double ratio = 0.0;
};

/// (sum sigma_i^p)^(1/p).
double schatten_norm(const CMatrix& t, double p);

/// sum_s (sum_r |T(r + s, r)|^p)^(1/p) over all realised lattice shifts s,
/// compared against ||T||_p.
SchattenReport rowshift_bound(const HermitianLatticeOperator& t, double p);
SchattenReport rowshift_bound(const LatticeGeometry& g, const CMatrix& t, double p);

struct FtPerturbationRow {
  double t = 0.0;
  double norm_lhs = 0.0;  // ||f_t(X)||_1
  double norm_rhs = 0.0;  // (1 + t) ||X||_3^3
  double lipschitz_lhs = 0.0;  // ||f_t(X) - f_t(Y)||_1
  double lipschitz_rhs = 0.0;  // 3 (1 + 1/t) ||X - Y||_1, +inf at t = 0
  double trace_limit_residual = 0.0;  // |tr(f_t(X) - f_t(Y)) - tr(X - Y)|
};

struct FtPerturbationReport {
  std::vector<FtPerturbationRow> rows;
  double trace_norm_difference = 0.0;  // ||X - Y||_1
  bool norm_bound_holds(double slack = 1e-12) const;
  bool lipschitz_holds(double slack = 1e-12) const;
};

FtPerturbationReport ft_perturbation_checks(const CMatrix& x, const CMatrix& y,
                                            const std::vector<double>& t_values);

/// ||a b||_1 and ||a||_3 ||b||_{3/2}.
std::pair<double, double> holder_check(const CMatrix& a, const CMatrix& b);

struct BoundaryNorms {
  int a = 0;
  int b = 0;
  double restricted_pp = 0.0;  // ||(Q_a - P)(1 - F_b)(P - P^2)||_1
  double restricted_qq = 0.0;  // ||(Q_a - P)(1 - F_b)(Q_a - Q_a^2)||_1
  double strip_trace_norm = 0.0;  // ||(Q_a - P) F_b||_1
  double strip_hs_norm = 0.0;     // ||(Q_a - P) F_b||_2
};

/// F_b is the indicator of rows y < b. The restricted norms need two full
/// SVDs and are skipped unless requested.
BoundaryNorms boundary_norms(const ProjectionPair& pair, int a, int b, bool restricted = true);

struct PowerFit {
  double exponent = 0.0;
  double prefactor = 0.0;
};

/// Least-squares fit of y = prefactor * x^exponent. Throws InsufficientGrid
/// for fewer than two points or non-positive data.
PowerFit fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace qhall
