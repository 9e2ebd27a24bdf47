#include <doctest.h>

#include <numbers>

#include "vdlab/errors.hpp"
#include "vdlab/zeros.hpp"

using namespace vdlab;

TEST_SUITE("zeros") {
  TEST_CASE("polynomial with a double root") {
    const auto z = count_zeros(Expression::parse("(z - 1)^2*(z + 3)"), 2.0);
    REQUIRE(z.size() == 1);
    CHECK(z[0].multiplicity == 2);
    CHECK(std::abs(z[0].location - cplx(1.0)) < 1e-9);
    CHECK(total_multiplicity(count_zeros(Expression::parse("(z - 1)^2*(z + 3)"), 4.0)) == 3);
  }

  TEST_CASE("exp(z) - 1 in |z| < 7") {
    const auto z = count_zeros(Expression::parse("exp(z) - 1"), 7.0);
    REQUIRE(z.size() == 3);
    std::vector<cplx> want{{0.0, -2 * std::numbers::pi}, 0.0, {0.0, 2 * std::numbers::pi}};
    for (const auto& w : want) {
      bool hit = false;
      for (const auto& x : z) hit = hit || (std::abs(x.location - w) < 1e-9 && x.multiplicity == 1);
      CHECK(hit);
    }
  }

  TEST_CASE("multiplicities from the winding number") {
    const auto z = count_zeros(Expression::parse("(exp(z) - 1)^3*(z - 0.5)"), 1.0);
    CHECK(total_multiplicity(z) == 4);
    CHECK(winding_number(analytic(Expression::parse("(exp(z) - 1)^3*(z - 0.5)")), 0.0, 1.0) == 4);
  }

  TEST_CASE("zero-free and degenerate inputs") {
    CHECK(count_zeros(Expression::parse("exp(z)"), 5.0).empty());
    CHECK_THROWS_AS(count_zeros(Expression::parse("z - 2"), 2.0), BoundaryZeroError);
    CHECK_THROWS_AS(count_zeros(Expression::parse("z - z"), 2.0), DomainError);
  }

  TEST_CASE("Aberth roots of a known polynomial") {
    // (z - 1)(z + 2i)(z - 3) = z^3 + (-4 + 2i) z^2 + (3 - 8i) z + 6i
    const std::vector<cplx> c{{0, 6}, {3, -8}, {-4, 2}, {1, 0}};
    const auto roots = polynomial_roots(c);
    CHECK(total_multiplicity(roots) == 3);
    for (cplx w : {cplx(1), cplx(0, -2), cplx(3)}) {
      bool hit = false;
      for (const auto& x : roots) hit = hit || std::abs(x.location - w) < 1e-10;
      CHECK(hit);
    }
  }
}
