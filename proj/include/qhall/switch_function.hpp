// Smooth monotone switch functions: 1 left of the support interval, 0 right
// of it. Derivatives of any order are obtained from truncated Taylor series.
#pragma once

#include <string>
#include <vector>

namespace qhall {

/// Truncated Taylor series c[0] + c[1] h + ... + c[n] h^n around a point.
class Jet {
 public:
  explicit Jet(int order, double value = 0.0);
  static Jet variable(int order, double at);

  int order() const { return static_cast<int>(c_.size()) - 1; }
  double operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }
  double& operator[](int k) { return c_[static_cast<std::size_t>(k)]; }
  /// k-th derivative at the expansion point.
  double derivative(int k) const;

  Jet operator+(const Jet& o) const;
  Jet operator-(const Jet& o) const;
  Jet operator*(const Jet& o) const;
  Jet operator/(const Jet& o) const;
  Jet operator*(double s) const;
  Jet operator+(double s) const;
  friend Jet operator-(double s, const Jet& j);
  friend Jet exp(const Jet& j);

 private:
  std::vector<double> c_;
};

enum class SwitchProfile { smooth_bump_integral, high_order_smoothstep };

class SwitchFunction {
 public:
  SwitchFunction(double lower, double upper,
                 SwitchProfile profile = SwitchProfile::smooth_bump_integral, int order = 3);

  double lower() const { return lower_; }
  double upper() const { return upper_; }
  SwitchProfile profile() const { return profile_; }
  int order() const { return order_; }

  double operator()(double x) const;
  /// k-th derivative, k >= 0.
  double derivative(double x, int k = 1) const;
  /// Taylor coefficients g^(k)(x)/k! for k = 0..n.
  Jet jet(double x, int n) const;

  /// x -> g(x/a); support scales to [a lower, a upper].
  SwitchFunction rescaled(double a) const;
  std::string fingerprint() const;

 private:
  double unit_value(double u) const;
  Jet unit_derivative_jet(double u, int n) const;

  double lower_;
  double upper_;
  SwitchProfile profile_;
  int order_;
};

/// exp(-1/(u(1-u))) on (0,1), zero elsewhere, and its integral over [0,1].
double bump(double u);
double bump_mass();

}  // namespace qhall
