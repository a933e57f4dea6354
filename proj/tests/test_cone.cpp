#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "micz/cone.hpp"
#include "support.hpp"

#include <cmath>

using namespace micz;

TEST_CASE("sigma elements") {
  SUBCASE("k=1") {
    const AlgElement sp = sigma_plus(1);
    CHECK(sp.coeff(1, 2) == doctest::Approx(1.0));
    const AlgElement sm = sigma_minus(1);
    CHECK((sm + sp).max_abs() == doctest::Approx(0.0));  // sigma_- = -sigma_+ at k=1
  }
  SUBCASE("k=2") {
    const AlgElement sm = sigma_minus(2);
    CHECK(sm.coeff(1, 2) == doctest::Approx(1.0));
    CHECK(sm.coeff(3, 4) == doctest::Approx(-1.0));
    CHECK(sm.coeff(1, 3) == doctest::Approx(0.0));
  }
  SUBCASE("norm squared is k") {
    for (int k : {1, 2, 3, 4})
      CHECK(invariant_metric(sigma_plus(k), sigma_plus(k)) == doctest::Approx(k));
  }
}

TEST_CASE("casimir examples") {
  CHECK(casimir_Q(sigma_plus(2)) == doctest::Approx(1.0));
  CHECK(casimir_Q(AlgElement::zero(3)) == doctest::Approx(0.0));
}

TEST_CASE("cone membership") {
  SUBCASE("sigma points and zero lie on the cone") {
    for (int k : {1, 2, 3}) {
      CHECK(cone_membership(sigma_plus(k), 1e-12));
      CHECK(cone_membership(sigma_minus(k), 1e-12));
      CHECK(cone_membership(AlgElement::zero(k), 1e-12));
    }
  }
  SUBCASE("unequal Cartan coefficients fail") {
    AlgElement xi(2);
    xi.add_coeff(1, 2, 1.0);
    xi.add_coeff(3, 4, 2.0);
    CHECK_FALSE(cone_membership(xi, 1e-6));
    // residual criterion: x_j^2 = (x_1^2 + x_2^2)/k fails, 1 vs 5/2
    CHECK(cone_residual(xi) > 0.2);
  }
  SUBCASE("invariance under coadjoint action and positive scaling") {
    auto rng = testing::make_rng(21);
    for (int k : {2, 3}) {
      for (int trial = 0; trial < 10; ++trial) {
        const AlgElement xi = testing::random_cone_xi(k, rng);
        CHECK(cone_membership(xi, 1e-10));
        const GroupElement g = random_rotation(k, rng());
        CHECK(cone_membership(coadjoint_act(g, xi), 1e-10));
        CHECK(cone_membership(3.7 * xi, 1e-10));
        const AlgElement off = sample_off_cone(k, rng());
        CHECK_FALSE(cone_membership(off, 1e-4));
        CHECK_FALSE(cone_membership(coadjoint_act(g, off), 1e-4));
      }
    }
  }
}

TEST_CASE("pfaffian separates the two cone components") {
  for (int k : {1, 2, 3, 4}) {
    CHECK(pfaffian(sigma_plus(k).to_matrix()) == doctest::Approx(1.0));
    CHECK(pfaffian(sigma_minus(k).to_matrix()) == doctest::Approx(-1.0));
  }
  // det(g) = 1 preserves the sign along the orbit
  auto rng = testing::make_rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    const GroupElement g = random_rotation(2, rng());
    CHECK(pfaffian(coadjoint_act(g, sigma_plus(2)).to_matrix()) > 0.0);
    CHECK(pfaffian(coadjoint_act(g, sigma_minus(2)).to_matrix()) < 0.0);
  }
}

TEST_CASE("charge values") {
  CHECK(charge(AlgElement::zero(2)) == doctest::Approx(0.0));
  for (int k : {1, 2, 3}) {
    const double sqrtk = std::sqrt(static_cast<double>(k));
    CHECK(charge(sigma_plus(k)) == doctest::Approx(sqrtk));
    CHECK(charge(sigma_minus(k)) == doctest::Approx(-sqrtk));
    CHECK(charge(2.5 * sigma_plus(k)) == doctest::Approx(2.5 * sqrtk));
  }
  SUBCASE("k=1 special case: charge is gamma_12") {
    AlgElement xi(1);
    xi.add_coeff(1, 2, -0.75);
    CHECK(charge(xi) == doctest::Approx(-0.75));
  }
  SUBCASE("off-cone points are rejected") {
    AlgElement xi(2);
    xi.add_coeff(1, 2, 1.0);
    xi.add_coeff(3, 4, 2.0);
    CHECK_THROWS_AS(charge(xi), std::domain_error);
  }
}

TEST_CASE("charge is invariant along orbits") {
  auto rng = testing::make_rng(23);
  for (int k : {1, 2, 3}) {
    for (int trial = 0; trial < 8; ++trial) {
      const AlgElement xi = testing::random_cone_xi(k, rng);
      const double mu = charge(xi);
      const GroupElement g = random_rotation(k, rng());
      CHECK(charge(coadjoint_act(g, xi)) == doctest::Approx(mu).epsilon(1e-10));
      // k Q = mu^2
      CHECK(k * casimir_Q(xi) == doctest::Approx(mu * mu).epsilon(1e-10));
    }
  }
}

TEST_CASE("sample_orbit_point") {
  SUBCASE("mu = 0 gives the origin") {
    const ConePoint p = sample_orbit_point(3, 0.0, 17);
    CHECK(p.xi.max_abs() == 0.0);
    CHECK(p.mu == 0.0);
  }
  SUBCASE("deterministic, on-cone, right charge") {
    for (int k : {1, 2, 3}) {
      const double mu = 0.5 * std::sqrt(static_cast<double>(k));
      const ConePoint a = sample_orbit_point(k, mu, 5);
      const ConePoint b = sample_orbit_point(k, mu, 5);
      CHECK((a.xi - b.xi).max_abs() == 0.0);
      CHECK(cone_membership(a.xi, 1e-10));
      CHECK(charge(a.xi) == doctest::Approx(mu).epsilon(1e-10));
      CHECK(charge(sample_orbit_point(k, -mu, 5).xi) == doctest::Approx(-mu).epsilon(1e-10));
    }
  }
  SUBCASE("mu = sqrt(k) gives |xi|^2 = k, Q = 1") {
    const ConePoint p = sample_orbit_point(2, std::sqrt(2.0), 123);
    CHECK(p.xi.squared_norm() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(casimir_Q(p.xi) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("distinct seeds, same invariants") {
    const ConePoint a = sample_orbit_point(2, 1.0, 1);
    const ConePoint b = sample_orbit_point(2, 1.0, 2);
    CHECK((a.xi - b.xi).max_abs() > 1e-3);
    CHECK(charge(a.xi) == doctest::Approx(charge(b.xi)).epsilon(1e-10));
    CHECK(casimir_Q(a.xi) == doctest::Approx(casimir_Q(b.xi)).epsilon(1e-10));
  }
  SUBCASE("positive and negative components never mix") {
    auto rng = testing::make_rng(24);
    for (int trial = 0; trial < 10; ++trial) {
      const double mu = 0.3 + trial * 0.1;
      CHECK(charge(sample_orbit_point(2, mu, rng()).xi) > 0.0);
      CHECK(charge(sample_orbit_point(2, -mu, rng()).xi) < 0.0);
    }
  }
}
