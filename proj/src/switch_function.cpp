#include "qhall/switch_function.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/binomial.hpp>

#include "qhall/dense.hpp"

namespace qhall {

Jet::Jet(int order, double value) : c_(static_cast<std::size_t>(order + 1), 0.0) {
  if (order < 0) throw Error(ErrorKind::InvalidArgument, "jet order must be >= 0");
  c_[0] = value;
}

Jet Jet::variable(int order, double at) {
  Jet j(order, at);
  if (order >= 1) j[1] = 1.0;
  return j;
}

double Jet::derivative(int k) const {
  return std::tgamma(static_cast<double>(k) + 1.0) * (*this)[k];
}

Jet Jet::operator+(const Jet& o) const {
  Jet r = *this;
  for (int k = 0; k <= order(); ++k) r[k] += o[k];
  return r;
}

Jet Jet::operator-(const Jet& o) const {
  Jet r = *this;
  for (int k = 0; k <= order(); ++k) r[k] -= o[k];
  return r;
}

Jet Jet::operator*(const Jet& o) const {
  Jet r(order());
  for (int k = 0; k <= order(); ++k) {
    double s = 0.0;
    for (int j = 0; j <= k; ++j) s += (*this)[j] * o[k - j];
    r[k] = s;
  }
  return r;
}

Jet Jet::operator/(const Jet& o) const {
  Jet r(order());
  for (int k = 0; k <= order(); ++k) {
    double s = (*this)[k];
    for (int j = 1; j <= k; ++j) s -= o[j] * r[k - j];
    r[k] = s / o[0];
  }
  return r;
}

Jet Jet::operator*(double s) const {
  Jet r = *this;
  for (auto& c : r.c_) c *= s;
  return r;
}

Jet Jet::operator+(double s) const {
  Jet r = *this;
  r[0] += s;
  return r;
}

Jet operator-(double s, const Jet& j) {
  Jet r = j * -1.0;
  r[0] += s;
  return r;
}

Jet exp(const Jet& a) {
  Jet e(a.order(), std::exp(a[0]));
  for (int k = 1; k <= a.order(); ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += j * a[j] * e[k - j];
    e[k] = s / k;
  }
  return e;
}

double bump(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  return std::exp(-1.0 / (u * (1.0 - u)));
}

namespace {

constexpr int kCells = 1024;

// Cumulative integral of the bump on a uniform grid of [0, 1/2].
const std::vector<double>& cumulative_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t(kCells / 2 + 1, 0.0);
    for (int i = 1; i <= kCells / 2; ++i) {
      t[i] = t[i - 1] + boost::math::quadrature::gauss<double, 30>::integrate(
                            bump, double(i - 1) / kCells, double(i) / kCells);
    }
    return t;
  }();
  return table;
}

// int_0^u bump for u in [0, 1/2]: table entry plus a short fixed Gauss rule.
double bump_cumulative(double u) {
  const auto& t = cumulative_table();
  const int i = std::min(kCells / 2, static_cast<int>(u * kCells));
  const double left = double(i) / kCells;
  if (!(u > left)) return t[i];
  return t[i] + boost::math::quadrature::gauss<double, 15>::integrate(bump, left, u);
}

}  // namespace

double bump_mass() {
  static const double z = 2.0 * cumulative_table().back();
  return z;
}

SwitchFunction::SwitchFunction(double lower, double upper, SwitchProfile profile, int order)
    : lower_(lower), upper_(upper), profile_(profile), order_(order) {
  if (!(lower < upper) || !std::isfinite(lower) || !std::isfinite(upper)) {
    throw Error(ErrorKind::InvalidArgument, "switch support needs lower < upper");
  }
  if (profile == SwitchProfile::high_order_smoothstep && order < 1) {
    throw Error(ErrorKind::InvalidArgument, "smoothstep order must be positive");
  }
}

double SwitchFunction::unit_value(double u) const {
  if (u <= 0.0) return 1.0;
  if (u >= 1.0) return 0.0;
  if (profile_ == SwitchProfile::smooth_bump_integral) {
    // integrate the short side for accuracy near both ends
    // the bump is symmetric about 1/2, so the short side is always a prefix
    if (u < 0.5) return 1.0 - bump_cumulative(u) / bump_mass();
    return bump_cumulative(1.0 - u) / bump_mass();
  }
  return 1.0 - unit_derivative_jet(u, 0)[0];
}

// Jet in u of the rising unit step for smoothstep, or of the bump density
// for the bump-integral profile.
Jet SwitchFunction::unit_derivative_jet(double u, int n) const {
  const Jet uj = Jet::variable(n, u);
  if (profile_ == SwitchProfile::smooth_bump_integral) {
    const double v = u * (1.0 - u);
    if (u <= 0.0 || u >= 1.0 || v < 1e-3) return Jet(n);
    return exp(Jet(n, -1.0) / (uj * (1.0 - uj)));
  }
  // S_k(u) = u^{k+1} sum_m C(k+m, m) C(2k+1, k-m) (-u)^m
  const unsigned k = static_cast<unsigned>(order_);
  Jet poly(n);
  for (int m = static_cast<int>(k); m >= 0; --m) {
    const unsigned mu = static_cast<unsigned>(m);
    const double coeff = boost::math::binomial_coefficient<double>(k + mu, mu) *
                         boost::math::binomial_coefficient<double>(2 * k + 1, k - mu) *
                         (m % 2 == 0 ? 1.0 : -1.0);
    poly = poly * uj + coeff;
  }
  Jet power(n, 1.0);
  for (unsigned i = 0; i <= k; ++i) power = power * uj;
  return poly * power;
}

double SwitchFunction::operator()(double x) const {
  return unit_value((x - lower_) / (upper_ - lower_));
}

Jet SwitchFunction::jet(double x, int n) const {
  const double w = upper_ - lower_;
  const double u = (x - lower_) / w;
  Jet out(n, unit_value(u));
  if (n == 0 || u <= 0.0 || u >= 1.0) return out;
  if (profile_ == SwitchProfile::smooth_bump_integral) {
    // g^(k)(x) = -b^(k-1)(u) / (Z w^k); in Taylor coefficients
    // g_k = -B_{k-1} / (k Z w^k)
    const Jet b = unit_derivative_jet(u, n - 1);
    double wk = 1.0;
    for (int k = 1; k <= n; ++k) {
      wk *= w;
      out[k] = -b[k - 1] / (k * bump_mass() * wk);
    }
  } else {
    const Jet s = unit_derivative_jet(u, n);
    double wk = 1.0;
    for (int k = 1; k <= n; ++k) {
      wk *= w;
      out[k] = -s[k] / wk;
    }
  }
  return out;
}

double SwitchFunction::derivative(double x, int k) const {
  if (k < 0) throw Error(ErrorKind::InvalidArgument, "derivative order must be >= 0");
  if (k == 0) return (*this)(x);
  return jet(x, k).derivative(k);
}

SwitchFunction SwitchFunction::rescaled(double a) const {
  if (!(a > 0.0)) throw Error(ErrorKind::InvalidArgument, "rescaling factor must be positive");
  return SwitchFunction(a * lower_, a * upper_, profile_, order_);
}

std::string SwitchFunction::fingerprint() const {
  char buf[96];
  if (profile_ == SwitchProfile::smooth_bump_integral) {
    std::snprintf(buf, sizeof buf, "bump[%.6g,%.6g]", lower_, upper_);
  } else {
    std::snprintf(buf, sizeof buf, "smoothstep%d[%.6g,%.6g]", order_, lower_, upper_);
  }
  return buf;
}

}  // namespace qhall
