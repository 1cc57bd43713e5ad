#include <doctest.h>

#include <random>

#include "qhall/identities.hpp"

using namespace qhall;

TEST_CASE("general identities on seeded random Hermitian pairs") {
  std::mt19937_64 rng(20240101);
  for (int i = 0; i < 100; ++i) {
    const CMatrix p = random_hermitian(20, rng);
    const CMatrix q = random_hermitian(20, rng);
    const IdentityReport rep = algebraic_identity_suite(p, q);
    CHECK_FALSE(rep.inputs_are_projections);
    CHECK(rep.pass(1e-10));
    for (const auto& r : rep.residuals) {
      if (r.tag.rfind("proj_", 0) == 0) {
        CHECK_FALSE(r.applicable);
      } else {
        CHECK(r.applicable);
      }
    }
  }
}

TEST_CASE("projection identities on random projection pairs") {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 100; ++i) {
    const CMatrix p = random_projection(20, 7, rng);
    const CMatrix q = random_projection(20, 9, rng);
    const IdentityReport rep = algebraic_identity_suite(p, q);
    CHECK(rep.inputs_are_projections);
    CHECK(rep.pass(1e-10));
    for (const auto& r : rep.residuals) CHECK(r.applicable);
  }
}

TEST_CASE("projection-only identities fail for generic Hermitian input") {
  std::mt19937_64 rng(5);
  const IdentityReport rep = algebraic_identity_suite(random_hermitian(20, rng), random_hermitian(20, rng));
  double commute = 0.0;
  for (const auto& r : rep.residuals)
    if (r.tag == "proj_A2_commutes_P") commute = r.residual;
  CHECK(commute > 1e-3);
}

TEST_CASE("P = Q reduces every identity to zero") {
  std::mt19937_64 rng(9);
  const CMatrix p = random_projection(16, 5, rng);
  const IdentityReport rep = algebraic_identity_suite(p, p);
  for (const auto& r : rep.residuals) CHECK(r.residual < 1e-13);
}

TEST_CASE("random generators") {
  std::mt19937_64 rng(3);
  const CMatrix h = random_hermitian(30, rng);
  CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() == 0.0);
  const RVector e = hermitian_eigenvalues(h);
  CHECK(std::max(std::abs(e(0)), std::abs(e(29))) == doctest::Approx(1.0).epsilon(1e-12));
  const CMatrix p = random_projection(30, 11, rng);
  CHECK((p * p - p).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(p.trace().real() == doctest::Approx(11.0));
  CHECK(ft_scalar_identity_residual() < 1e-12);
  CHECK_THROWS_AS(algebraic_identity_suite(CMatrix::Zero(3, 3), CMatrix::Zero(4, 4)), Error);
}
