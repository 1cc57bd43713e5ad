#include <doctest.h>

#include <cmath>
#include <random>

#include "qhall/conductance.hpp"
#include "qhall/identities.hpp"
#include "qhall/schatten.hpp"
#include "qhall/spectral.hpp"

using namespace qhall;

TEST_CASE("Schatten norms of simple operators") {
  CHECK(schatten_norm(CMatrix::Identity(7, 7), 1.0) == doctest::Approx(7.0));
  CVector u = CVector::Random(9);
  u.normalize();
  const CMatrix r1 = u * u.adjoint();
  for (double p : {1.0, 1.5, 2.0, 3.0}) CHECK(schatten_norm(r1, p) == doctest::Approx(1.0));
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  CMatrix m(10, 10);
  for (Eigen::Index j = 0; j < 10; ++j)
    for (Eigen::Index i = 0; i < 10; ++i) m(i, j) = cplx(nd(rng), nd(rng));
  CHECK(schatten_norm(m, 2.0) == doctest::Approx(m.norm()).epsilon(1e-12));
}

TEST_CASE("row-shift bound") {
  const LatticeGeometry g = LatticeGeometry::plane_window(5, 2, 3);
  HermitianLatticeOperator d{g, CMatrix::Zero(25, 25)};
  for (Eigen::Index i = 0; i < 25; ++i) d.entries(i, i) = 0.1 * (i - 12);
  for (double p : {1.0, 2.0, 3.0}) {
    const SchattenReport r = rowshift_bound(d, p);
    double lp = 0.0;
    for (Eigen::Index i = 0; i < 25; ++i) lp += std::pow(std::abs(d.entries(i, i).real()), p);
    CHECK(r.bound_value == doctest::Approx(std::pow(lp, 1.0 / p)));
    CHECK(r.ratio == doctest::Approx(1.0).epsilon(1e-12));
  }

  std::mt19937_64 rng(12);
  std::normal_distribution<double> nd;
  for (int k = 0; k < 20; ++k) {
    HermitianLatticeOperator b{g, CMatrix::Zero(25, 25)};
    for (Eigen::Index i = 0; i < 25; ++i)
      for (Eigen::Index j = 0; j < 25; ++j)
        if (g.distance(i, j) <= 2.0) b.entries(i, j) = cplx(nd(rng), nd(rng));
    for (double p : {1.0, 2.0, 3.0}) {
      const SchattenReport r = rowshift_bound(b, p);
      CHECK(r.norm_value == doctest::Approx(schatten_norm(b.entries, p)));
      CHECK(r.ratio <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("f_t perturbation inequalities") {
  const std::vector<double> ts{0.1, 1.0, 10.0, 100.0, 1e4};
  std::mt19937_64 rng(8);
  const CMatrix zero = CMatrix::Zero(30, 30);
  const FtPerturbationReport z = ft_perturbation_checks(zero, zero, ts);
  for (const auto& row : z.rows) {
    CHECK(row.norm_lhs == 0.0);
    CHECK(row.norm_rhs == 0.0);
    CHECK(row.lipschitz_lhs == 0.0);
  }
  for (int k = 0; k < 20; ++k) {
    const CMatrix x = random_hermitian(30, rng);
    const CMatrix y = random_hermitian(30, rng);
    const FtPerturbationReport r = ft_perturbation_checks(x, y, ts);
    CHECK(r.norm_bound_holds());
    CHECK(r.lipschitz_holds());
    CHECK(r.trace_norm_difference == doctest::Approx(schatten_norm(x - y, 1.0)));
    CHECK(r.rows.back().trace_limit_residual < 1e-3 * r.trace_norm_difference);
    const auto same = ft_perturbation_checks(x, x, ts);
    for (const auto& row : same.rows) CHECK(row.lipschitz_lhs < 1e-12);
  }
}

TEST_CASE("Hoelder inequality") {
  std::mt19937_64 rng(10);
  for (int k = 0; k < 10; ++k) {
    const auto [lhs, rhs] = holder_check(random_hermitian(20, rng), random_hermitian(20, rng));
    CHECK(lhs <= rhs * (1.0 + 1e-12));
  }
}

TEST_CASE("power-law fits") {
  const PowerFit f = fit_power_law({8, 16, 32}, {3.0 * std::pow(8, -0.5), 3.0 * std::pow(16, -0.5),
                                                 3.0 * std::pow(32, -0.5)});
  CHECK(f.exponent == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(f.prefactor == doctest::Approx(3.0).epsilon(1e-12));
  CHECK_THROWS_AS(fit_power_law({1.0}, {1.0}), Error);
  CHECK_THROWS_AS(fit_power_law({1.0, 2.0}, {1.0, 0.0}), Error);
}

TEST_CASE("boundary strip norms") {
  ModelSpec s;
  s.flux_numerator = 1;
  s.flux_denominator = 3;
  const auto bulk = build_bulk_hamiltonian(s, LatticeGeometry::plane_window(24, 1, 12));
  const HalfPlaneRestriction hp = restrict_half_plane(bulk);
  const HermitianLatticeOperator gp = matrix_function(hp.hamiltonian, SwitchFunction(-1.9, -0.85));
  const ProjectionPair pair = make_pair(gp, pulled_phase(4.0, PhaseProfile::smoothed_ramp(), hp.hamiltonian.geometry));
  const BoundaryNorms zero = boundary_norms(pair, 4, 0, false);
  CHECK(zero.strip_trace_norm == 0.0);
  CHECK(zero.strip_hs_norm == 0.0);
  const BoundaryNorms b2 = boundary_norms(pair, 4, 2, true);
  CHECK(b2.strip_hs_norm > 0.0);
  CHECK(b2.strip_hs_norm <= b2.strip_trace_norm + 1e-12);
  CHECK(std::isfinite(b2.restricted_pp));
}
