#include <doctest.h>

#include <cmath>

#include "qhall/dense.hpp"
#include "qhall/switch_function.hpp"

using namespace qhall;

// reference values computed with mpmath at 30 digits
constexpr double kBumpMass = 0.00702985840660965623924127053035;
constexpr double kTailFrom03 = 0.920935093501876931346069189818;  // int_0.3^1 bump / Z

TEST_CASE("bump mass and interior value against high-precision quadrature") {
  CHECK(bump_mass() == doctest::Approx(kBumpMass).epsilon(1e-14));
  const SwitchFunction g(0.0, 1.0);
  CHECK(g(0.3) == doctest::Approx(kTailFrom03).epsilon(1e-13));
  CHECK(g(0.7) == doctest::Approx(1.0 - kTailFrom03).epsilon(1e-12));
  CHECK(bump(0.0) == 0.0);
  CHECK(bump(0.5) == doctest::Approx(std::exp(-4.0)));
}

TEST_CASE("switch limits, monotonicity and reflection symmetry") {
  const SwitchFunction g(-1.9, -0.85);
  CHECK(g(-5.0) == 1.0);
  CHECK(g(-1.9) == 1.0);
  CHECK(g(-0.85) == 0.0);
  CHECK(g(3.0) == 0.0);
  CHECK(g(0.5 * (-1.9 - 0.85)) == doctest::Approx(0.5).epsilon(1e-14));
  double prev = 1.0;
  for (int i = 0; i <= 400; ++i) {
    const double x = -2.0 + 1.3 * i / 400.0;
    const double v = g(x);
    CHECK(v <= prev + 1e-15);
    CHECK(v + g(-1.9 - 0.85 - x) == doctest::Approx(1.0).epsilon(1e-13));
    prev = v;
  }
}

TEST_CASE("derivatives against finite differences") {
  for (SwitchProfile prof : {SwitchProfile::smooth_bump_integral, SwitchProfile::high_order_smoothstep}) {
    const SwitchFunction g(-1.0, 2.0, prof, 3);
    for (double x : {-0.6, 0.1, 0.5, 1.2, 1.7}) {
      const double h = 1e-4;
      const double d1 = (g(x + h) - g(x - h)) / (2 * h);
      CHECK(g.derivative(x, 1) == doctest::Approx(d1).epsilon(1e-6));
      const double d2 = (g.derivative(x + h, 1) - g.derivative(x - h, 1)) / (2 * h);
      CHECK(g.derivative(x, 2) == doctest::Approx(d2).epsilon(1e-5));
      const double d3 = (g.derivative(x + h, 2) - g.derivative(x - h, 2)) / (2 * h);
      CHECK(g.derivative(x, 3) == doctest::Approx(d3).epsilon(1e-4));
      const Jet j = g.jet(x, 3);
      CHECK(j[0] == g(x));
      CHECK(j.derivative(2) == doctest::Approx(g.derivative(x, 2)));
    }
    CHECK(g.derivative(-1.5, 1) == 0.0);
    CHECK(g.derivative(2.5, 2) == 0.0);
  }
}

TEST_CASE("smoothstep order 3 is the closed-form septic") {
  const SwitchFunction g(0.0, 1.0, SwitchProfile::high_order_smoothstep, 3);
  for (double u : {0.1, 0.25, 0.5, 0.8}) {
    const double s = 35 * std::pow(u, 4) - 84 * std::pow(u, 5) + 70 * std::pow(u, 6) - 20 * std::pow(u, 7);
    CHECK(g(u) == doctest::Approx(1.0 - s).epsilon(1e-14));
  }
  // derivatives up to order 3 vanish at both ends
  for (int k = 1; k <= 3; ++k) {
    CHECK(std::abs(g.derivative(1e-9, k)) < 1e-6);
    CHECK(std::abs(g.derivative(1.0 - 1e-9, k)) < 1e-6);
  }
}

TEST_CASE("rescaling and validation") {
  const SwitchFunction g(0.5, 2.0);
  const SwitchFunction ga = g.rescaled(4.0);
  CHECK(ga.lower() == 2.0);
  CHECK(ga.upper() == 8.0);
  CHECK(ga(5.0) == doctest::Approx(g(1.25)));
  CHECK(g.fingerprint() != ga.fingerprint());
  CHECK_THROWS_AS(SwitchFunction(1.0, 1.0), Error);
  CHECK_THROWS_AS(SwitchFunction(0.0, 1.0, SwitchProfile::high_order_smoothstep, 0), Error);
}

TEST_CASE("jet arithmetic") {
  const Jet x = Jet::variable(4, 0.3);
  const Jet e = exp(x * 2.0);
  for (int k = 0; k <= 4; ++k) CHECK(e.derivative(k) == doctest::Approx(std::pow(2.0, k) * std::exp(0.6)));
  const Jet r = Jet(4, 1.0) / (1.0 - x);  // 1/(1-x), k-th derivative k!/(1-x)^{k+1}
  for (int k = 0; k <= 4; ++k)
    CHECK(r.derivative(k) == doctest::Approx(std::tgamma(k + 1.0) / std::pow(0.7, k + 1)));
}
