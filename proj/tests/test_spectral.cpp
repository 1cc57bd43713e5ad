#include <doctest.h>

#include <cmath>

#include <Eigen/LU>

#include "qhall/lattice.hpp"
#include "qhall/spectral.hpp"

using namespace qhall;

namespace {

ModelSpec hofstadter(long p, long q) {
  ModelSpec s;
  s.flux_numerator = p;
  s.flux_denominator = q;
  return s;
}

HermitianLatticeOperator diag2() {
  HermitianLatticeOperator h{LatticeGeometry::plane_window(2, 0, 1), CMatrix::Zero(2, 2)};
  h.entries(0, 0) = -1.0;
  h.entries(1, 1) = 1.0;
  return h;
}

}  // namespace

TEST_CASE("Fermi projection of diag(-1, 1) at mu = 0") {
  const HermitianLatticeOperator p = fermi_projection(diag2(), 0.0);
  CHECK(std::abs(p.entries(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(p.entries(1, 1)) < 1e-15);
  CHECK(std::abs(p.entries(0, 1)) < 1e-15);
  CHECK_THROWS_AS(fermi_projection(diag2(), 1.0), Error);
}

TEST_CASE("Hofstadter Fermi projections fill one and two thirds") {
  const auto h = build_bulk_hamiltonian(hofstadter(1, 3), LatticeGeometry::torus(24, 24));
  const SpectralDecomposition d = decompose(h);
  CHECK(d.reconstruction_residual(h.entries) < 1e-11);
  CHECK(d.orthonormality_residual() < 1e-11);
  const Eigen::Index n = h.size();
  const GapReport g1 = gap_above_filling(d.eigenvalues, n / 3);
  const GapReport g2 = gap_above_filling(d.eigenvalues, 2 * n / 3);
  const HermitianLatticeOperator p1 = fermi_projection(d, g1.mu);
  const HermitianLatticeOperator p2 = fermi_projection(d, g2.mu);
  CHECK(std::abs(p1.entries.trace().real() - n / 3.0) < 1e-9);
  CHECK(std::abs(p2.entries.trace().real() - 2.0 * n / 3.0) < 1e-9);
  CHECK(idempotency_residual(p1.entries) < 1e-10);
  CHECK(hermiticity_defect(p1.entries) == 0.0);

  // g with supp g' in the gap reproduces the sharp projection
  const SwitchFunction g(g1.lower + 0.05, g1.upper - 0.05);
  const HermitianLatticeOperator gp = matrix_function(d, g);
  CHECK((gp.entries - p1.entries).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("matrix_function of a constant and of a polynomial") {
  const auto h = build_bulk_hamiltonian(hofstadter(1, 4), LatticeGeometry::torus(8, 8));
  const SpectralDecomposition d = decompose(h);
  const auto [lo, hi] = gershgorin_bounds(h.entries);
  const SwitchFunction one(hi + 1.0, hi + 2.0);
  CHECK((matrix_function(d, one).entries - CMatrix::Identity(h.size(), h.size())).cwiseAbs().maxCoeff() <
        1e-12);
  const CMatrix& m = h.entries;
  const CMatrix poly = m * m * m - 2.0 * m + 0.5 * CMatrix::Identity(h.size(), h.size());
  const auto viaspec = apply_function(d, [](double x) { return x * x * x - 2.0 * x + 0.5; });
  CHECK((viaspec.entries - poly).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(lo <= d.eigenvalues(0));
  CHECK(hi >= d.eigenvalues(d.eigenvalues.size() - 1));
}

TEST_CASE("half-plane switch has spectrum strictly inside (0, 1)") {
  const auto bulk = build_bulk_hamiltonian(hofstadter(1, 3), LatticeGeometry::plane_window(24, 1, 12));
  const HalfPlaneRestriction hp = restrict_half_plane(bulk);
  const SwitchFunction g(-1.9, -0.85);
  const HermitianLatticeOperator gh = matrix_function(hp.hamiltonian, g);
  const RVector e = hermitian_eigenvalues(gh.entries);
  CHECK(e(0) > -1e-12);
  CHECK(e(e.size() - 1) < 1.0 + 1e-12);
  int interior = 0;
  for (Eigen::Index i = 0; i < e.size(); ++i)
    if (e(i) > 0.05 && e(i) < 0.95) ++interior;
  CHECK(interior > 0);
  CHECK(idempotency_residual(gh.entries) > 1e-3);
}

TEST_CASE("decay profile on an exactly exponential kernel") {
  const LatticeGeometry g = LatticeGeometry::plane_window(30, 0, 1);
  HermitianLatticeOperator t{g, CMatrix::Zero(30, 30)};
  for (Eigen::Index i = 0; i < 30; ++i)
    for (Eigen::Index j = 0; j < 30; ++j) t.entries(i, j) = std::exp(-0.5 * g.distance(i, j));
  const DecayProfile p = decay_profile(t, DecayWeight::polynomial);
  CHECK(p.exponential_rate == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p.fit_first_bin < p.fit_last_bin);

  HermitianLatticeOperator id{g, CMatrix::Identity(30, 30)};
  CHECK_THROWS_AS(decay_profile(id, DecayWeight::polynomial), Error);
}

TEST_CASE("gapped Fermi projection decays exponentially") {
  const auto h = build_bulk_hamiltonian(hofstadter(1, 3), LatticeGeometry::torus(18, 18));
  const SpectralDecomposition d = decompose(h);
  const GapReport gap = gap_above_filling(d.eigenvalues, h.size() / 3);
  const DecayProfile p = decay_profile(fermi_projection(d, gap.mu), DecayWeight::polynomial);
  CHECK(p.exponential_rate > 0.1);
}

TEST_CASE("Combes-Thomas bound against a direct resolvent") {
  const auto h = build_bulk_hamiltonian(hofstadter(1, 3), LatticeGeometry::torus(12, 12));
  const RVector e = hermitian_eigenvalues(h.entries);
  const GapReport gap = gap_above_filling(e, h.size() / 3);

  for (std::complex<double> z : {std::complex<double>(gap.mu, 0.5), std::complex<double>(gap.mu, 0.0),
                                 std::complex<double>(e(0) - 80.0, 0.0)}) {
    const double cmax = maximal_ct_constant(h, z);
    REQUIRE(cmax > 0.0);
    const CTReport rep = combes_thomas_check(h, z, 0.9 * cmax);
    CHECK(rep.condition_sum <= 0.5 * rep.distance);
    CHECK(rep.max_violation_ratio <= 1.0);

    // independent check of the reported ratio
    const CMatrix r = (h.entries - z * CMatrix::Identity(h.size(), h.size())).inverse();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < h.size(); ++i)
      for (Eigen::Index j = 0; j < h.size(); ++j)
        worst = std::max(worst, std::abs(r(i, j)) /
                                    ((2.0 / rep.distance) * std::exp(-rep.mu * h.geometry.distance(i, j))));
    CHECK(rep.max_violation_ratio == doctest::Approx(worst).epsilon(1e-8));
  }
  // far from the spectrum the bound has a large margin
  const CTReport far = combes_thomas_check(h, {e(0) - 80.0, 0.0}, 1e-3);
  CHECK(far.max_violation_ratio < 0.6);
  CHECK_THROWS_AS(combes_thomas_check(h, {gap.mu, 0.01}, 100.0), Error);
}
