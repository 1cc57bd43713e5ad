// Diagonal gauge unitaries U(r) = exp(i phi(arg(r - c))) of winding one,
// the truncated variant (U set to 1 below y = a) and the variant whose
// flux line is pulled across the boundary.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qhall/lattice.hpp"
#include "qhall/switch_function.hpp"

namespace qhall {

enum class PhaseProfileKind {
  /// phi(theta) = theta.
  linear,
  /// phi' a smoothed indicator of [lower, upper], normalised to total 2 pi.
  smoothed_ramp,
};

class PhaseProfile {
 public:
  static PhaseProfile linear();
  static PhaseProfile smoothed_ramp(double lower = kPi / 4, double upper = 3 * kPi / 4,
                                    double smoothing = 0.15);

  PhaseProfileKind kind() const { return kind_; }
  int winding() const { return 1; }
  /// Closed interval outside of which phi' vanishes.
  std::pair<double, double> support_of_derivative() const;
  /// phi on [0, 2 pi), angle reduced mod 2 pi first. Values in [0, 2 pi].
  double operator()(double angle) const;

 private:
  PhaseProfile() = default;
  double density(double s) const;

  PhaseProfileKind kind_ = PhaseProfileKind::linear;
  double lower_ = 0.0;
  double upper_ = kTwoPi;
  double smoothing_ = 0.0;
  double mass_ = 1.0;
};

enum class PhaseKind { full_U, check_U, hat_U };

struct GaugePhase {
  LatticeGeometry geometry;
  CVector phases;
  PhaseKind kind = PhaseKind::full_U;
  int a = 0;
  double center_x = 0.0;
  double center_y = 0.0;

  /// U P U* for diagonal U.
  CMatrix conjugate(const CMatrix& p) const;
};

GaugePhase flux_phase(const PhaseProfile& profile, double center_x, double center_y,
                      const LatticeGeometry& geom);

/// Check-U: base phases for y >= a, 1 below.
GaugePhase truncated_phase(const GaugePhase& base, int a);

/// x -> phi(arg(x, 1)) / 2 pi: 1 far left, 0 far right. The boundary switch
/// of the pulled gauge at unit scale.
double pulled_boundary_switch(const PhaseProfile& profile, double s);

/// Hat-U at scale a, flux centre at the origin. In scaled coordinates
/// (xi, eta) = r / a the phase is
///   w(eta) 2 pi chi(xi) + (1 - w(eta)) phi(arg(xi, eta)),
/// with chi the boundary switch above and w a switch with support [1/2, 2],
/// so rows y < a/2 carry exactly exp(2 pi i chi(x/a)).
GaugePhase pulled_phase(double a, const PhaseProfile& profile, const LatticeGeometry& geom);

/// The same construction evaluated at a real point.
cplx pulled_phase_at(double a, const PhaseProfile& profile, double x, double y);

struct BoundReport {
  PhaseKind kind = PhaseKind::full_U;
  /// Largest ratio of |U(r1) - U(r2)| to the applicable bound shape.
  double worst_constant = 0.0;
  std::pair<Eigen::Index, Eigen::Index> worst_pair{0, 0};
  std::size_t pairs = 0;
};

/// full_U: |dU| (1 + |r1 - c|) / |r1 - r2|;
/// hat_U:  |dU| (a + |r2|) / |r1 - r2|;
/// check_U: |dU| (1 + (|x2| - a - y2)_+)^k / (1 + |r1 - r2|)^k.
BoundReport phase_difference_bounds(const GaugePhase& gauge,
                                    const std::vector<std::pair<Eigen::Index, Eigen::Index>>& sample,
                                    int k = 2);

/// "x,y,re,im" header plus one row per site, in site order.
std::string phases_csv(const GaugePhase& u);

/// Number of sites where two gauges differ by more than tol.
std::size_t differing_sites(const GaugePhase& u1, const GaugePhase& u2, double tol = 0.0);

}  // namespace qhall
