#include "qhall/gauge.hpp"

#include <cmath>
#include <cstdio>
#include <functional>

#include <boost/math/quadrature/gauss.hpp>

namespace qhall {

namespace {

// Composite fixed Gauss rule; the integrands here are smooth switch shapes.
double integrate(const std::function<double(double)>& f, double a, double b) {
  if (!(b > a)) return 0.0;
  constexpr int panels = 16;
  const double h = (b - a) / panels;
  double acc = 0.0;
  for (int i = 0; i < panels; ++i) {
    acc += boost::math::quadrature::gauss<double, 20>::integrate(f, a + i * h, a + (i + 1) * h);
  }
  return acc;
}

double reduce_angle(double angle) {
  double t = std::fmod(angle, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  return t;
}

}  // namespace

PhaseProfile PhaseProfile::linear() { return PhaseProfile(); }

PhaseProfile PhaseProfile::smoothed_ramp(double lower, double upper, double smoothing) {
  if (!(smoothing > 0.0) || !(lower - smoothing >= 0.0) || !(upper + smoothing <= kTwoPi) ||
      !(lower + smoothing <= upper - smoothing)) {
    throw Error(ErrorKind::InvalidArgument, "ramp needs 0 <= lower - e < lower + e <= upper - e, upper + e <= 2 pi");
  }
  PhaseProfile p;
  p.kind_ = PhaseProfileKind::smoothed_ramp;
  p.lower_ = lower;
  p.upper_ = upper;
  p.smoothing_ = smoothing;
  p.mass_ = 1.0;
  const double e = smoothing;
  auto rho = [&p](double s) { return p.density(s); };
  p.mass_ = integrate(rho, lower - e, lower + e) + (upper - lower - 2 * e) +
            integrate(rho, upper - e, upper + e);
  return p;
}

std::pair<double, double> PhaseProfile::support_of_derivative() const {
  if (kind_ == PhaseProfileKind::linear) return {0.0, kTwoPi};
  return {lower_ - smoothing_, upper_ + smoothing_};
}

// (1 - g_lower(s)) g_upper(s) with switches of half-width e at both ends.
double PhaseProfile::density(double s) const {
  const double e = smoothing_;
  const SwitchFunction rise(lower_ - e, lower_ + e);
  const SwitchFunction fall(upper_ - e, upper_ + e);
  return (1.0 - rise(s)) * fall(s);
}

double PhaseProfile::operator()(double angle) const {
  const double t = reduce_angle(angle);
  if (kind_ == PhaseProfileKind::linear) return t;
  const double e = smoothing_;
  if (t <= lower_ - e) return 0.0;
  if (t >= upper_ + e) return kTwoPi;
  auto rho = [this](double s) { return density(s); };
  double acc = integrate(rho, lower_ - e, std::min(t, lower_ + e));
  if (t > lower_ + e) acc += std::min(t, upper_ - e) - (lower_ + e);
  if (t > upper_ - e) acc += integrate(rho, upper_ - e, t);
  return kTwoPi * acc / mass_;
}

CMatrix GaugePhase::conjugate(const CMatrix& p) const {
  if (p.rows() != phases.size() || p.cols() != phases.size()) {
    throw Error(ErrorKind::DimensionMismatch, "gauge and operator sizes differ");
  }
  CMatrix q = phases.asDiagonal() * p * phases.conjugate().asDiagonal();
  return hermitize(q);
}

GaugePhase flux_phase(const PhaseProfile& profile, double center_x, double center_y,
                      const LatticeGeometry& geom) {
  geom.validate();
  GaugePhase u;
  u.geometry = geom;
  u.kind = PhaseKind::full_U;
  u.center_x = center_x;
  u.center_y = center_y;
  u.phases.resize(geom.site_count());
  for (Eigen::Index k = 0; k < geom.site_count(); ++k) {
    const Site s = geom.site(k);
    const double dx = s.x - center_x;
    const double dy = s.y - center_y;
    if (dx == 0.0 && dy == 0.0) {
      u.phases(k) = 1.0;
      continue;
    }
    u.phases(k) = std::polar(1.0, profile(std::atan2(dy, dx)));
  }
  return u;
}

GaugePhase truncated_phase(const GaugePhase& base, int a) {
  if (base.kind != PhaseKind::full_U) {
    throw Error(ErrorKind::InvalidArgument, "truncation expects a full_U gauge");
  }
  if (a < 0) throw Error(ErrorKind::InvalidArgument, "truncation height must be >= 0");
  GaugePhase u = base;
  u.kind = PhaseKind::check_U;
  u.a = a;
  for (Eigen::Index k = 0; k < u.phases.size(); ++k) {
    if (u.geometry.site(k).y < a) u.phases(k) = 1.0;
  }
  return u;
}

double pulled_boundary_switch(const PhaseProfile& profile, double s) {
  return profile(std::atan2(1.0, s)) / kTwoPi;
}

cplx pulled_phase_at(double a, const PhaseProfile& profile, double x, double y) {
  if (!(a > 0.0)) throw Error(ErrorKind::InvalidArgument, "pull scale a must be positive");
  static const SwitchFunction blend(0.5, 2.0);
  const double xi = x / a;
  const double eta = y / a;
  const double w = blend(eta);
  double theta = 0.0;
  if (w > 0.0) theta += w * kTwoPi * pulled_boundary_switch(profile, xi);
  if (w < 1.0) theta += (1.0 - w) * profile(std::atan2(eta, xi));
  return std::polar(1.0, theta);
}

GaugePhase pulled_phase(double a, const PhaseProfile& profile, const LatticeGeometry& geom) {
  geom.validate();
  GaugePhase u;
  u.geometry = geom;
  u.kind = PhaseKind::hat_U;
  u.a = static_cast<int>(std::lround(a));
  u.phases.resize(geom.site_count());
  for (Eigen::Index k = 0; k < geom.site_count(); ++k) {
    const Site s = geom.site(k);
    u.phases(k) = pulled_phase_at(a, profile, s.x, s.y);
  }
  return u;
}

BoundReport phase_difference_bounds(const GaugePhase& gauge,
                                    const std::vector<std::pair<Eigen::Index, Eigen::Index>>& sample,
                                    int k) {
  if (sample.empty()) throw Error(ErrorKind::InvalidArgument, "empty sample");
  BoundReport rep;
  rep.kind = gauge.kind;
  const LatticeGeometry& g = gauge.geometry;
  for (const auto& [i1, i2] : sample) {
    ++rep.pairs;
    if (i1 == i2) continue;
    const Site s1 = g.site(i1);
    const Site s2 = g.site(i2);
    const double du = std::abs(gauge.phases(i1) - gauge.phases(i2));
    const double sep = std::hypot(s1.x - s2.x, s1.y - s2.y);
    double c = 0.0;
    switch (gauge.kind) {
      case PhaseKind::full_U:
        c = du * (1.0 + std::hypot(s1.x - gauge.center_x, s1.y - gauge.center_y)) / sep;
        break;
      case PhaseKind::hat_U:
        c = du * (gauge.a + std::hypot(s2.x, s2.y)) / sep;
        break;
      case PhaseKind::check_U: {
        const double excess = std::max(0.0, static_cast<double>(std::abs(s2.x) - gauge.a - s2.y));
        c = du * std::pow((1.0 + excess) / (1.0 + sep), k);
        break;
      }
    }
    if (c > rep.worst_constant) {
      rep.worst_constant = c;
      rep.worst_pair = {i1, i2};
    }
  }
  return rep;
}

std::string phases_csv(const GaugePhase& u) {
  std::string out = "x,y,re,im\n";
  char buf[96];
  for (Eigen::Index k = 0; k < u.phases.size(); ++k) {
    const Site s = u.geometry.site(k);
    std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", s.x, s.y, u.phases(k).real(), u.phases(k).imag());
    out += buf;
  }
  return out;
}

std::size_t differing_sites(const GaugePhase& u1, const GaugePhase& u2, double tol) {
  if (u1.phases.size() != u2.phases.size()) {
    throw Error(ErrorKind::DimensionMismatch, "gauge sizes differ");
  }
  std::size_t count = 0;
  for (Eigen::Index k = 0; k < u1.phases.size(); ++k) {
    if (std::abs(u1.phases(k) - u2.phases(k)) > tol) ++count;
  }
  return count;
}

}  // namespace qhall
