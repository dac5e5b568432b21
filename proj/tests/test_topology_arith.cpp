#include <doctest.h>

#include <cmath>

#include "conekit/errors.hpp"
#include "conekit/topology_arith.hpp"

using namespace conekit;

TEST_CASE("rational arithmetic") {
  CHECK(Rational(4, 6) == Rational(2, 3));
  CHECK(Rational(3, -6) == Rational(-1, 2));
  CHECK(Rational(-1, 2).str() == "-1/2");
  CHECK(Rational(6, 3).is_integer());
  CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
  CHECK(Rational(2, 3) * Rational(3, 4) == Rational(1, 2));
  CHECK(Rational::parse("10/4") == Rational(5, 2));
  CHECK(Rational::parse("-7") == Rational(-7));
  CHECK_THROWS_AS(Rational(1, 0), std::domain_error);
  CHECK_THROWS_AS(Rational(1) / Rational(0), std::domain_error);
  CHECK_THROWS_AS(Rational::parse("x/2"), std::invalid_argument);
  CHECK(Rational(1, 3).to_double() == doctest::Approx(1.0 / 3));
}

TEST_CASE("periods") {
  const BaseManifold cp1 = fubini_study_base(1);
  SUBCASE("CP1, p = 2, k = 3") {
    const ChernData c = periods({1, 2, 2, 3, ResolutionCase::SmallResolutionI, 0}, cp1);
    CHECK(c.fibre_period == Rational(2));
    REQUIRE(c.base_periods.size() == 1);
    CHECK(c.base_periods[0] == Rational(3));
    CHECK(c.ell_coefficient == Rational(1, 3));
    REQUIRE(c.exponents.size() == 2);
    CHECK(c.exponents[0].second == Rational(3, 2));
    CHECK(c.exponents[1].second == Rational(1, 2));
  }
  SUBCASE("product base carries one period per factor") {
    const BaseManifold b = product_base({2, 2});
    const ChernData c = periods({2, 2, 2, 3, ResolutionCase::SmallResolutionI, 0}, b);
    REQUIRE(c.base_periods.size() == 2);
    CHECK(c.base_periods[0] == Rational(3));
    CHECK(c.base_periods[1] == Rational(3));
  }
  SUBCASE("p = 1 has fibre period 1") {
    const ChernData c = periods({2, 3, 1, 2, ResolutionCase::SmallResolutionI, 0}, fubini_study_base(2));
    CHECK(c.fibre_period == Rational(1));
  }
  SUBCASE("mismatched base index") {
    CHECK_THROWS_AS(periods({2, 3, 1, 2, ResolutionCase::SmallResolutionI, 0}, cp1), PreconditionError);
  }
}

TEST_CASE("fibre flux quadrature reproduces the fibre period") {
  for (const FamilyParams fp : {FamilyParams{1, 2, 2, 3, ResolutionCase::SmallResolutionI, 0},
                                FamilyParams{1, 2, 3, 4, ResolutionCase::SmallResolutionII, 0},
                                FamilyParams{1, 2, 3, 5, ResolutionCase::Canonical, 2},
                                FamilyParams{2, 3, 1, 2, ResolutionCase::SmallResolutionI, 0}}) {
    const RootSolution rs = solve_family(fp);
    const double x = rs.branch == Branch::XMinus ? rs.x_star - 0.7 : rs.x_star + 0.7;
    const FluxQuadrature q = fibre_flux(fp, rs, x);
    CHECK(std::abs(q.integral - q.exact) < 1e-9);
    CHECK(std::abs(q.period - fp.p) < 1e-11);
  }
  // ∫₀¹ 3t² dt
  CHECK(adaptive_simpson([](double t) { return 3 * t * t; }, 0.0, 1.0, 1e-12) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(adaptive_simpson([](double t) { return std::exp(t); }, 0.0, 2.0, 1e-12) ==
        doctest::Approx(std::exp(2.0) - 1).epsilon(1e-11));
}

TEST_CASE("small resolution I bundles") {
  SUBCASE("p = 1, I = 3, k = 2: m = 1") {
    const BundleExponents b = small_res_bundles({2, 3, 1, 2, ResolutionCase::SmallResolutionI, 0});
    CHECK(b.m == 1);
    CHECK(b.first == Rational(1, 3));
    CHECK(b.second == Rational(2, 3));
  }
  SUBCASE("p = 2, I = 2, k = 3") {
    const BundleExponents b = small_res_bundles({1, 2, 2, 3, ResolutionCase::SmallResolutionI, 0});
    CHECK(b.first == Rational(3, 2));
    CHECK(b.second == Rational(1, 2));
    CHECK(b.m == 0);
  }
  SUBCASE("exponents always add up to p") {
    for (const auto& fp : enumerate_families(1, 2, 10))
      if (fp.kind == ResolutionCase::SmallResolutionI) {
        const BundleExponents b = small_res_bundles(fp);
        CHECK(b.first + b.second == Rational(fp.p));
      }
  }
  SUBCASE("wrong case") {
    CHECK_THROWS_AS(small_res_bundles({1, 2, 3, 4, ResolutionCase::SmallResolutionII, 0}), PreconditionError);
  }
}

TEST_CASE("weighted projective line") {
  CHECK(wcp_chern(2, 1) == Rational(2));
  CHECK(wcp_chern(3, 2) == Rational(3, 2));
  CHECK(wcp_chern(FamilyParams{1, 2, 3, 4, ResolutionCase::SmallResolutionII, 0}) == Rational(3, 2));
  CHECK_THROWS_AS(wcp_chern(3, 3), AdmissibilityError);
  CHECK_THROWS_AS(wcp_chern(3, 0), AdmissibilityError);
  // Chern number equals the orbifold Euler characteristic, and is symmetric in d ↔ p − d.
  for (int p = 2; p <= 50; ++p)
    for (int d = 1; d < p; ++d) {
      CHECK(wcp_chern(p, d) == wcp_orbifold_euler(p, d));
      CHECK(wcp_chern(p, d) == wcp_chern(p, p - d));
      CHECK(wcp_chern(p, d) == Rational(1, d) + Rational(1, p - d));
    }
}

TEST_CASE("canonical resolution degrees") {
  const BaseManifold cp1 = fubini_study_base(1);
  SUBCASE("CP1, p = 2, k = 3, r = 1") {
    const CanonicalDegrees c = canonical_orbifold_degrees({1, 2, 2, 3, ResolutionCase::Canonical, 1}, cp1);
    CHECK(c.sigma_pairing == Rational(-1));
    CHECK(c.deg1 == Rational(-3));
    CHECK(c.deg2 == Rational(-1));
    CHECK(c.fano);
    CHECK(c.divisor_relation == Rational(-1));
    CHECK(c.orbifold_divisor_coefficient == Rational(-2));
    CHECK(c.orbifold_first_coefficient == Rational(1));
    CHECK(c.orbifold_second_coefficient == Rational(3));
  }
  SUBCASE("both expressions for the orbifold canonical class agree") {
    for (int d = 2; d <= 4; ++d)
      for (const auto& fp : enumerate_families(d - 1, d, 8))
        if (fp.kind == ResolutionCase::Canonical) {
          const BaseManifold b = product_base({d});
          const CanonicalDegrees c = canonical_orbifold_degrees(fp, b);
          CHECK(c.canonical_orbifold.d1 == c.canonical_orbifold_via_d2.d1);
          CHECK(c.canonical_orbifold.k == c.canonical_orbifold_via_d2.k);
          CHECK(c.canonical_orbifold.d1 == c.orbifold_divisor_coefficient);
          CHECK(c.canonical_orbifold.k == c.orbifold_first_coefficient);
          CHECK(c.fano == (fp.k < fp.p * fp.fano_index));
        }
  }
  SUBCASE("m = 0 and non-canonical families are rejected") {
    CHECK_THROWS_AS(canonical_orbifold_degrees({1, 2, 2, 2, ResolutionCase::Canonical, 1}, cp1), AdmissibilityError);
    CHECK_THROWS_AS(canonical_orbifold_degrees({1, 2, 2, 3, ResolutionCase::SmallResolutionI, 0}, cp1),
                    PreconditionError);
  }
}
