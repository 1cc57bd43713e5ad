#include "qhall/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/LU>

namespace qhall {

double SpectralDecomposition::reconstruction_residual(const CMatrix& h) const {
  if (h.size() == 0) return 0.0;
  const CMatrix back = reconstruct(eigenvectors, eigenvalues);
  return (h - back).cwiseAbs().maxCoeff();
}

double SpectralDecomposition::orthonormality_residual() const {
  if (eigenvectors.size() == 0) return 0.0;
  const auto n = eigenvectors.cols();
  return (eigenvectors.adjoint() * eigenvectors - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
}

SpectralDecomposition decompose(const HermitianLatticeOperator& h) {
  EigenPairs e = hermitian_eigen(h.entries);
  return {h.geometry, std::move(e.values), std::move(e.vectors)};
}

HermitianLatticeOperator apply_function(const SpectralDecomposition& d,
                                        const std::function<double(double)>& f) {
  RVector w(d.eigenvalues.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = f(d.eigenvalues(i));
  return {d.geometry, hermitize(reconstruct(d.eigenvectors, w))};
}

HermitianLatticeOperator fermi_projection(const SpectralDecomposition& d, double mu,
                                          double gap_tolerance) {
  spectral_gap(d.eigenvalues, mu, gap_tolerance);
  return apply_function(d, [mu](double l) { return l <= mu ? 1.0 : 0.0; });
}

HermitianLatticeOperator fermi_projection(const HermitianLatticeOperator& h, double mu,
                                          double gap_tolerance) {
  return fermi_projection(decompose(h), mu, gap_tolerance);
}

HermitianLatticeOperator matrix_function(const SpectralDecomposition& d, const SwitchFunction& g) {
  return apply_function(d, [&g](double l) { return g(l); });
}

HermitianLatticeOperator matrix_function(const HermitianLatticeOperator& h, const SwitchFunction& g) {
  return matrix_function(decompose(h), g);
}

double idempotency_residual(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return (m * m - m).cwiseAbs().maxCoeff();
}

namespace {

// Least-squares slope of ys against xs.
double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

DecayProfile decay_profile(const HermitianLatticeOperator& t, DecayWeight weight,
                           const DecayOptions& options) {
  const LatticeGeometry& g = t.geometry;
  const Eigen::Index n = t.size();
  std::map<int, double> bins;
  for (Eigen::Index c = 0; c < n; ++c) {
    const Site sc = g.site(c);
    if (sc.y > options.y_limit) continue;
    for (Eigen::Index r = 0; r < n; ++r) {
      const Site sr = g.site(r);
      if (sr.y > options.y_limit) continue;
      int key = 0;
      switch (weight) {
        case DecayWeight::polynomial:
          key = static_cast<int>(std::lround(g.distance(r, c)));
          break;
        case DecayWeight::exponential_in_y:
          key = std::min(std::abs(sr.y), std::abs(sc.y));
          break;
        case DecayWeight::exponential_in_y1plusy2:
          key = std::abs(sr.y) + std::abs(sc.y);
          break;
      }
      double& slot = bins[key];
      slot = std::max(slot, std::abs(t.entries(r, c)));
    }
  }

  DecayProfile out;
  out.weight = weight;
  for (const auto& [k, v] : bins) {
    out.distance_bins.push_back(k);
    out.max_abs_kernel.push_back(v);
  }

  std::vector<std::size_t> populated;
  for (std::size_t i = 0; i < out.max_abs_kernel.size(); ++i) {
    if (out.max_abs_kernel[i] > 0.0) populated.push_back(i);
  }
  if (populated.size() < 4) {
    throw Error(ErrorKind::InsufficientRange, "fewer than 4 populated distance bins");
  }
  const auto m = populated.size();
  auto first = static_cast<std::size_t>(std::floor(options.fit_begin * static_cast<double>(m)));
  auto last = static_cast<std::size_t>(std::ceil(options.fit_end * static_cast<double>(m)));
  last = std::min(last, m);
  if (last < first + 3) {
    first = 0;
    last = m;
  }
  std::vector<double> xs, lx, ys;
  for (std::size_t i = first; i < last; ++i) {
    const auto b = populated[i];
    xs.push_back(out.distance_bins[b]);
    lx.push_back(std::log1p(static_cast<double>(out.distance_bins[b])));
    ys.push_back(std::log(out.max_abs_kernel[b]));
  }
  out.exponential_rate = -fit_slope(xs, ys);
  out.polynomial_order = -fit_slope(lx, ys);
  out.fit_first_bin = out.distance_bins[populated[first]];
  out.fit_last_bin = out.distance_bins[populated[last - 1]];
  return out;
}

std::pair<double, double> gershgorin_bounds(const CMatrix& h) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    const double radius = h.row(i).cwiseAbs().sum() - std::abs(h(i, i));
    lo = std::min(lo, h(i, i).real() - radius);
    hi = std::max(hi, h(i, i).real() + radius);
  }
  return {lo, hi};
}

namespace {

double spectral_distance(const HermitianLatticeOperator& h, std::complex<double> z) {
  const RVector ev = hermitian_eigenvalues(h.entries);
  double d = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < ev.size(); ++i) d = std::min(d, std::abs(z - ev(i)));
  return d;
}

}  // namespace

CTReport combes_thomas_check(const HermitianLatticeOperator& h, std::complex<double> z, double c) {
  if (!(c > 0.0)) throw Error(ErrorKind::InvalidArgument, "Combes-Thomas constant must be positive");
  CTReport rep;
  rep.z = z;
  rep.distance = spectral_distance(h, z);
  if (!(rep.distance > 0.0)) throw Error(ErrorKind::InvalidArgument, "z lies on the spectrum");
  rep.mu = c * rep.distance;
  rep.condition_sum = locality_sum(h, rep.mu);
  if (rep.condition_sum > 0.5 * rep.distance) {
    throw Error(ErrorKind::ConditionUnsatisfied,
                "locality sum " + std::to_string(rep.condition_sum) + " exceeds dist/2 = " +
                    std::to_string(0.5 * rep.distance));
  }
  const Eigen::Index n = h.size();
  const CMatrix shifted = h.entries - z * CMatrix::Identity(n, n);
  const CMatrix r = shifted.partialPivLu().inverse();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double bound = 2.0 / rep.distance * std::exp(-rep.mu * h.geometry.distance(i, j));
      rep.max_violation_ratio = std::max(rep.max_violation_ratio, std::abs(r(i, j)) / bound);
    }
  }
  return rep;
}

double maximal_ct_constant(const HermitianLatticeOperator& h, std::complex<double> z) {
  const double d = spectral_distance(h, z);
  auto ok = [&](double c) { return locality_sum(h, c * d) <= 0.5 * d; };
  double lo = 0.0;
  double hi = 1.0;
  while (ok(hi) && hi < 1e6) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace qhall
