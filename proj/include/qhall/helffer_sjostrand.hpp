// g(H) as a plane integral of the resolvent against an almost-analytic
// extension of g, evaluated by composite Gauss-Legendre quadrature.
#pragma once

#include "qhall/spectral.hpp"

namespace qhall {

enum class ResolventMode {
  /// (H - z)^{-1} through an eigendecomposition of H.
  spectral,
  /// (H - z)^{-1} by an LU solve at every node.
  direct_lu,
};

struct HSOptions {
  int extension_order = 2;
  /// The y cutoff is 1 on |y| <= height/2 and 0 for |y| >= height.
  double height = 1.0;
  int points_per_panel = 8;
  int initial_panels = 4;
  int max_refinements = 6;
  double tolerance = 1e-6;
  ResolventMode mode = ResolventMode::spectral;
};

struct HSResult {
  HermitianLatticeOperator value;
  /// max |entry| change at the last refinement.
  double last_change = 0.0;
  int panels = 0;
  int refinements = 0;
};

/// Throws QuadratureUnresolved when refinement does not settle below
/// options.tolerance.
HSResult hs_matrix_function(const HermitianLatticeOperator& h, const SwitchFunction& g,
                            const HSOptions& options = {});

}  // namespace qhall
