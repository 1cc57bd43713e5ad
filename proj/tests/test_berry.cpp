#include <doctest.h>

#include <algorithm>
#include <array>
#include <cstdlib>
#include <vector>

#include "qhall/berry.hpp"

using namespace qhall;

namespace {

ModelSpec hofstadter(long p, long q) {
  ModelSpec s;
  s.flux_numerator = p;
  s.flux_denominator = q;
  return s;
}

// Hall integer of r filled bands: r = q s + p t with |t| <= q / 2
long diophantine(long p, long q, long r) {
  for (long t = -q / 2; t <= q / 2; ++t)
    if (((r - p * t) % q) == 0) return t;
  return 1000;
}

}  // namespace

TEST_CASE("Chern numbers follow the Diophantine equation with one global sign") {
  int sign = 0;
  const std::vector<std::array<long, 3>> cases{{1, 3, 1}, {1, 3, 2}, {1, 4, 1}, {1, 4, 3},
                                               {1, 5, 1}, {1, 5, 2}, {2, 5, 1}, {2, 5, 2}};
  for (const auto& [p, q, r] : cases) {
    const ChernResult c = fhs_chern_number(hofstadter(p, q), static_cast<int>(r), 24);
    const long t = diophantine(p, q, r);
    REQUIRE(t != 1000);
    CHECK(std::abs(c.raw - c.chern) < 1e-6);
    CHECK(c.min_gap > 0.0);
    CHECK(std::abs(c.chern) == std::abs(t));
    const int s = c.chern == t ? 1 : -1;
    if (sign == 0) sign = s;
    CHECK(s == sign);
  }
}

TEST_CASE("Bloch spectrum reproduces the torus spectrum") {
  const int L = 12;
  const ModelSpec s = hofstadter(1, 3);
  std::vector<double> bloch;
  for (int j = 0; j < L / 3; ++j)
    for (int l = 0; l < L; ++l) {
      const RVector e = hermitian_eigenvalues(bloch_hamiltonian(s, kTwoPi * j / L, kTwoPi * l / L));
      bloch.insert(bloch.end(), e.data(), e.data() + e.size());
    }
  std::sort(bloch.begin(), bloch.end());
  const RVector torus = hermitian_eigenvalues(build_bulk_hamiltonian(s, LatticeGeometry::torus(L, L)).entries);
  REQUIRE(static_cast<Eigen::Index>(bloch.size()) == torus.size());
  for (Eigen::Index i = 0; i < torus.size(); ++i) CHECK(bloch[i] == doctest::Approx(torus(i)).epsilon(1e-10));
}

TEST_CASE("argument validation") {
  CHECK_THROWS_AS(fhs_chern_number(hofstadter(1, 3), 0), Error);
  CHECK_THROWS_AS(fhs_chern_number(hofstadter(1, 3), 3), Error);
  CHECK_THROWS_AS(fhs_chern_number(hofstadter(1, 3), 1, 2), Error);
}
