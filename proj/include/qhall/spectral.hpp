// Functional calculus of lattice Hamiltonians through dense
// eigendecomposition, kernel decay measurements and the Combes-Thomas bound.
#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "qhall/lattice.hpp"
#include "qhall/switch_function.hpp"

namespace qhall {

struct SpectralDecomposition {
  LatticeGeometry geometry;
  RVector eigenvalues;
  CMatrix eigenvectors;

  double reconstruction_residual(const CMatrix& h) const;
  double orthonormality_residual() const;
};

SpectralDecomposition decompose(const HermitianLatticeOperator& h);

/// V f(Lambda) V*, exactly Hermitian.
HermitianLatticeOperator apply_function(const SpectralDecomposition& d,
                                        const std::function<double(double)>& f);

/// Spectral projection onto eigenvalues <= mu; mu must sit in a verified gap.
HermitianLatticeOperator fermi_projection(const HermitianLatticeOperator& h, double mu,
                                          double gap_tolerance = 1e-8);
HermitianLatticeOperator fermi_projection(const SpectralDecomposition& d, double mu,
                                          double gap_tolerance = 1e-8);

HermitianLatticeOperator matrix_function(const HermitianLatticeOperator& h, const SwitchFunction& g);
HermitianLatticeOperator matrix_function(const SpectralDecomposition& d, const SwitchFunction& g);

/// max |M^2 - M| entrywise.
double idempotency_residual(const CMatrix& m);

enum class DecayWeight { polynomial, exponential_in_y, exponential_in_y1plusy2 };

struct DecayOptions {
  /// Fit window as fractions of the populated bins.
  double fit_begin = 0.2;
  double fit_end = 0.8;
  /// Only pairs with both y <= y_limit enter (keeps far edges of a strip out).
  int y_limit = std::numeric_limits<int>::max();
};

struct DecayProfile {
  DecayWeight weight = DecayWeight::polynomial;
  /// Bin label: rounded distance, or y / y1+y2 in the y modes.
  std::vector<int> distance_bins;
  std::vector<double> max_abs_kernel;
  /// log max = intercept - rate * bin over the fit window.
  double exponential_rate = 0.0;
  /// log max = intercept - order * log(1 + bin) over the fit window.
  double polynomial_order = 0.0;
  int fit_first_bin = 0;
  int fit_last_bin = 0;
};

DecayProfile decay_profile(const HermitianLatticeOperator& t, DecayWeight weight,
                           const DecayOptions& options = {});

struct CTReport {
  std::complex<double> z;
  double distance = 0.0;
  double mu = 0.0;
  /// Left side of the Combes-Thomas precondition.
  double condition_sum = 0.0;
  /// max over pairs of |R(r1,r2)| / ((2/dist) exp(-mu |r1-r2|)).
  double max_violation_ratio = 0.0;
};

/// Verifies |(H-z)^{-1}(r1,r2)| <= (2/d) exp(-mu |r1-r2|) with mu = c d,
/// d = dist(z, spectrum). Throws ConditionUnsatisfied when the locality
/// sum at mu exceeds d/2.
CTReport combes_thomas_check(const HermitianLatticeOperator& h, std::complex<double> z, double c);

/// Largest c for which the Combes-Thomas precondition holds at z.
double maximal_ct_constant(const HermitianLatticeOperator& h, std::complex<double> z);

/// Lower end of the Gershgorin enclosure of the spectrum, and upper end.
std::pair<double, double> gershgorin_bounds(const CMatrix& h);

}  // namespace qhall
