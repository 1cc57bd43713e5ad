// Operator identities relating A = Q - P and B = 1 - P - Q for arbitrary
// bounded P, Q, and the extra ones valid for projections. Residuals are
// Frobenius norms, an upper bound for the operator norm.
#pragma once

#include <random>
#include <string>
#include <vector>

#include "qhall/dense.hpp"

namespace qhall {

struct IdentityResidual {
  std::string tag;
  double residual = 0.0;
  /// false when the identity only holds for projections and the input is not one.
  bool applicable = true;
};

struct IdentityReport {
  std::vector<IdentityResidual> residuals;
  bool inputs_are_projections = false;

  double max_applicable_residual() const;
  bool pass(double tolerance) const;
};

/// projection_tolerance decides whether the projection-only identities apply.
IdentityReport algebraic_identity_suite(const CMatrix& p, const CMatrix& q,
                                        double projection_tolerance = 1e-10);

/// max over a grid of lambda in [-1.5, 1.5] and t in {0, 0.1, 1, 10, 1e4} of
/// |f_t(l) - l^3 - t l^2 (l - l^3) / (1 + t l^2)|.
double ft_scalar_identity_residual();

/// Hermitian with entries of a complex Gaussian, scaled to spectral norm 1.
CMatrix random_hermitian(Eigen::Index n, std::mt19937_64& rng);
/// Orthogonal projection of the given rank onto a random subspace.
CMatrix random_projection(Eigen::Index n, Eigen::Index rank, std::mt19937_64& rng);

}  // namespace qhall
