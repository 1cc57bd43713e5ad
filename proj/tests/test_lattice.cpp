#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "qhall/lattice.hpp"

using namespace qhall;

namespace {

ModelSpec hofstadter(long p, long q, double w = 0.0, std::uint64_t seed = 0) {
  ModelSpec s;
  s.flux_numerator = p;
  s.flux_denominator = q;
  s.disorder_amplitude = w;
  s.disorder_seed = seed;
  return s;
}

// Fourier transform in y: for each ky the torus block is an L-site ring in x
// with on-site -2t cos(ky + 2 pi p x / q).
std::vector<double> harper_spectrum(long p, long q, int L) {
  std::vector<double> out;
  for (int l = 0; l < L; ++l) {
    const double ky = kTwoPi * l / L;
    CMatrix h = CMatrix::Zero(L, L);
    for (int x = 0; x < L; ++x) {
      h(x, x) = -2.0 * std::cos(ky + kTwoPi * p * x / q);
      h(x, (x + 1) % L) += -1.0;
      h((x + 1) % L, x) += -1.0;
    }
    const RVector e = hermitian_eigenvalues(h);
    out.insert(out.end(), e.data(), e.data() + e.size());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("geometry indexing round trip and minimum image") {
  const LatticeGeometry g = LatticeGeometry::torus(6, 4);
  for (Eigen::Index k = 0; k < g.site_count(); ++k) CHECK(g.index(g.site(k)) == k);
  const Eigen::Index a = g.index({g.min_x(), 0});
  const Eigen::Index b = g.index({g.max_x(), 0});
  CHECK(g.distance(a, b) == doctest::Approx(1.0));
  CHECK_THROWS_AS(g.index({100, 0}), Error);

  const LatticeGeometry w = LatticeGeometry::plane_window(6, 3, 3);
  CHECK(w.min_y() == -3);
  CHECK(w.max_y() == 2);
  CHECK(w.distance(w.index({w.min_x(), 0}), w.index({w.max_x(), 0})) == doctest::Approx(5.0));
}

TEST_CASE("zero flux on 4x4 open window is the hopping Laplacian") {
  const LatticeGeometry g = LatticeGeometry::plane_window(4, 2, 2);
  const HermitianLatticeOperator h = build_bulk_hamiltonian(hofstadter(0, 1), g);
  for (Eigen::Index i = 0; i < h.size(); ++i) {
    CHECK(h.entries(i, i) == cplx(0.0, 0.0));
    for (Eigen::Index j = 0; j < h.size(); ++j) {
      const auto [dx, dy] = g.displacement(i, j);
      const cplx expected = (std::abs(dx) + std::abs(dy) == 1) ? cplx(-1.0, 0.0) : cplx(0.0, 0.0);
      CHECK(h.entries(i, j) == expected);
    }
  }
}

TEST_CASE("torus spectrum matches the Harper decomposition") {
  const int L = 12;
  const HermitianLatticeOperator h = build_bulk_hamiltonian(hofstadter(1, 3), LatticeGeometry::torus(L, L));
  CHECK(hermiticity_defect(h.entries) == 0.0);
  const RVector e = hermitian_eigenvalues(h.entries);
  const std::vector<double> oracle = harper_spectrum(1, 3, L);
  REQUIRE(oracle.size() == static_cast<std::size_t>(e.size()));
  double worst = 0.0;
  for (Eigen::Index i = 0; i < e.size(); ++i) worst = std::max(worst, std::abs(e(i) - oracle[i]));
  CHECK(worst < 1e-10);
}

TEST_CASE("1/3 flux with periodic x has three bands and two open gaps") {
  const HermitianLatticeOperator h =
      build_bulk_hamiltonian(hofstadter(1, 3), LatticeGeometry::torus(24, 24));
  const RVector e = hermitian_eigenvalues(h.entries);
  const Eigen::Index n = e.size();
  const double band = e(n - 1) - e(0);
  const GapReport g1 = gap_above_filling(e, n / 3);
  const GapReport g2 = gap_above_filling(e, 2 * n / 3);
  CHECK(g1.width() > 0.1 * band);
  CHECK(g2.width() > 0.1 * band);
  CHECK(g1.states_below == n / 3);
  // every other consecutive spacing is far smaller than the gaps
  double largest_other = 0.0;
  for (Eigen::Index i = 1; i < n; ++i)
    if (i != n / 3 && i != 2 * n / 3) largest_other = std::max(largest_other, e(i) - e(i - 1));
  CHECK(largest_other < 0.2 * g1.width());
}

TEST_CASE("magnetic translation by q commutes with the clean Hamiltonian") {
  const LatticeGeometry g = LatticeGeometry::torus(12, 6);
  const HermitianLatticeOperator h = build_bulk_hamiltonian(hofstadter(1, 3), g);
  CMatrix t = CMatrix::Zero(h.size(), h.size());
  for (Eigen::Index k = 0; k < h.size(); ++k) {
    const Site s = g.site(k);
    const int nx = (s.x + g.origin_x + 3) % g.width_x - g.origin_x;
    t(g.index({nx, s.y}), k) = 1.0;
  }
  CHECK((t * h.entries - h.entries * t).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("disorder is deterministic in the seed") {
  const LatticeGeometry g = LatticeGeometry::torus(6, 6);
  const auto h1 = build_bulk_hamiltonian(hofstadter(1, 3, 0.3, 42), g);
  const auto h2 = build_bulk_hamiltonian(hofstadter(1, 3, 0.3, 42), g);
  const auto h3 = build_bulk_hamiltonian(hofstadter(1, 3, 0.3, 43), g);
  CHECK(h1.entries == h2.entries);
  CHECK(h1.entries != h3.entries);
  CHECK(h1.entries.diagonal().real().cwiseAbs().maxCoeff() <= 0.3);
}

TEST_CASE("model validation") {
  CHECK_THROWS_AS(hofstadter(1, 0).reduced(), Error);
  const ModelSpec r = hofstadter(2, -6).reduced();
  CHECK(r.flux_numerator == -1);
  CHECK(r.flux_denominator == 3);
  CHECK_THROWS_AS(build_bulk_hamiltonian(hofstadter(1, 3), LatticeGeometry::torus(8, 6)), Error);
  CHECK_THROWS_AS(LatticeGeometry::plane_window(0, 2, 2), Error);
}

TEST_CASE("Dirichlet restriction of a zero-flux window spanning y in [-3, 2]") {
  const auto bulk = build_bulk_hamiltonian(hofstadter(0, 1), LatticeGeometry::plane_window(6, 3, 3));
  const HalfPlaneRestriction hp = restrict_half_plane(bulk);
  CHECK(hp.hamiltonian.geometry.width_x == 6);
  CHECK(hp.hamiltonian.geometry.height_y == 3);
  CHECK(hp.hamiltonian.geometry.domain_kind == DomainKind::half_plane);

  const LatticeGeometry& bg = bulk.geometry;
  const LatticeGeometry& hg = hp.hamiltonian.geometry;
  // H is the y >= 0 block of H_B
  for (Eigen::Index r = 0; r < hg.site_count(); ++r)
    for (Eigen::Index c = 0; c < hg.site_count(); ++c)
      CHECK(hp.hamiltonian.entries(r, c) == bulk.entries(bg.index(hg.site(r)), bg.index(hg.site(c))));
  // E = -H_B on hops from y >= 0 into y < 0, zero elsewhere
  const CMatrix e(hp.edge.entries);
  for (Eigen::Index r = 0; r < bg.site_count(); ++r) {
    for (Eigen::Index c = 0; c < hg.site_count(); ++c) {
      const Site sr = bg.site(r);
      const cplx expected = sr.y < 0 ? -bulk.entries(r, bg.index(hg.site(c))) : cplx(0.0, 0.0);
      CHECK(e(r, c) == expected);
    }
  }
  // range-1 hopping: E lives only on row y = -1
  for (std::size_t slot = 0; slot < hp.edge.row_sum_by_y.size(); ++slot) {
    const int y = static_cast<int>(slot) + bg.min_y();
    if (y == -1) {
      CHECK(hp.edge.row_sum_by_y[slot] == doctest::Approx(1.0));
    } else {
      CHECK(hp.edge.row_sum_by_y[slot] == 0.0);
    }
  }
}

TEST_CASE("Hofstadter edge term decay constant is at least mu0") {
  const auto bulk = build_bulk_hamiltonian(hofstadter(1, 3), LatticeGeometry::plane_window(12, 6, 6));
  const HalfPlaneRestriction hp = restrict_half_plane(bulk, 1.0);
  CHECK(hp.edge.decay_constant >= 1.0);
  CHECK(hp.edge.bound_constant_mu0 == doctest::Approx(std::exp(1.0)));
  CHECK_THROWS_AS(restrict_half_plane(build_bulk_hamiltonian(hofstadter(1, 3),
                                                             LatticeGeometry::plane_window(6, 0, 4))),
                  Error);
}

TEST_CASE("locality sums") {
  HermitianLatticeOperator d{LatticeGeometry::torus(4, 4), CMatrix::Zero(16, 16)};
  d.entries.diagonal().setConstant(2.0);
  CHECK(verify_locality(d, 1.0).supremum == 0.0);

  // nearest neighbour, every site has four neighbours on a torus
  const auto h = build_bulk_hamiltonian(hofstadter(1, 3), LatticeGeometry::torus(6, 6));
  const LocalityReport rep = verify_locality(h, 1.0);
  CHECK(rep.supremum == doctest::Approx(4.0 * (std::exp(1.0) - 1.0)).epsilon(1e-14));
  CHECK(rep.pass);
  CHECK(locality_sum(h, 1.0) == doctest::Approx(rep.supremum));

  // banded random operator against a brute-force double loop
  const LatticeGeometry g = LatticeGeometry::plane_window(5, 2, 3);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> nd;
  HermitianLatticeOperator b{g, CMatrix::Zero(g.site_count(), g.site_count())};
  for (Eigen::Index i = 0; i < g.site_count(); ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      const Site si = g.site(i), sj = g.site(j);
      if (std::abs(si.x - sj.x) > 3 || std::abs(si.y - sj.y) > 3) continue;
      const cplx v = i == j ? cplx(nd(rng), 0.0) : cplx(nd(rng), nd(rng));
      b.entries(i, j) = v;
      b.entries(j, i) = std::conj(v);
    }
  double brute = 0.0;
  for (Eigen::Index i = 0; i < g.site_count(); ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < g.site_count(); ++j) {
      if (i == j) continue;
      const Site si = g.site(i), sj = g.site(j);
      const double dist = std::sqrt(double((si.x - sj.x) * (si.x - sj.x) + (si.y - sj.y) * (si.y - sj.y)));
      row += std::abs(b.entries(i, j)) * (std::exp(0.7 * dist) - 1.0);
    }
    brute = std::max(brute, row);
  }
  CHECK(verify_locality(b, 0.7).supremum == doctest::Approx(brute).epsilon(1e-12));
  CHECK_FALSE(verify_locality(b, 0.7, 1e-3).pass);
}

TEST_CASE("spectral gap reports") {
  RVector e(2);
  e << -1.0, 1.0;
  const GapReport g = spectral_gap(e, 0.0);
  CHECK(g.lower == -1.0);
  CHECK(g.upper == 1.0);
  CHECK(g.states_below == 1);
  CHECK(g.contains(-0.5, 0.5));
  CHECK_FALSE(g.contains(-1.5, 0.5));
  CHECK_THROWS_AS(spectral_gap(e, 1.0), Error);
  try {
    spectral_gap(e, 1.0);
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::GapClosed);
  }

  const auto h = build_bulk_hamiltonian(hofstadter(1, 3), LatticeGeometry::torus(24, 24));
  const RVector ev = hermitian_eigenvalues(h.entries);
  const GapReport lower = gap_above_filling(ev, ev.size() / 3);
  const GapReport at_mu = spectral_gap(h, lower.mu);
  CHECK(at_mu.width() > 0.1 * (ev(ev.size() - 1) - ev(0)));
}
