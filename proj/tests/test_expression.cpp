#include <doctest.h>

#include "vdlab/errors.hpp"
#include "vdlab/expression.hpp"

using namespace vdlab;

TEST_SUITE("expression") {
  TEST_CASE("parse, print, parse round-trip") {
    const char* texts[] = {"z",
                           "1 + 2*z - z^3",
                           "exp(z)/(1 + z^2)",
                           "log(2 + z)*exp(-z)",
                           "0.1*z + 3.000000000000001",
                           "(w1 - w2^2)/w1",
                           "i*z - (2.5 + 1e-300*i)",
                           "exp(2*z)*w3",
                           "-(z - 1)^2*(z + 3)",
                           "1/3*z"};
    for (const char* t : texts) {
      CAPTURE(t);
      const Expression e = Expression::parse(t);
      const std::string printed = e.to_string();
      const Expression again = Expression::parse(printed);
      CHECK(structurally_equal(e, again));
      CHECK(again.to_string() == printed);
    }
  }

  TEST_CASE("round-trip keeps every bit of a literal") {
    const double v = 0.1 + 0.2;
    const Expression e = Expression::constant(v);
    const Expression back = Expression::parse(e.to_string());
    CHECK(back.value(0.0).real() == v);
  }

  TEST_CASE("parse errors carry the column of the bad token") {
    try {
      Expression::parse("z +* 2");
      FAIL("no error");
    } catch (const ParseError& p) {
      CHECK(p.column() == 4);
    }
    CHECK_THROWS_AS(Expression::parse("exp(z"), ParseError);
    CHECK_THROWS_AS(Expression::parse("z^1.5"), ParseError);
    CHECK_THROWS_AS(Expression::parse("sin(z)"), ParseError);
  }

  TEST_CASE("evaluation and polynomial view") {
    const Expression e = Expression::parse("(z - 1)^2*(z + 3)");
    CHECK(std::abs(e.value(2.0) - cplx(5.0)) < 1e-15);
    const auto p = e.as_polynomial_in_z();
    REQUIRE(p);
    REQUIRE(p->size() == 4);
    CHECK(std::abs((*p)[0] - cplx(3.0)) < 1e-15);
    CHECK(std::abs((*p)[3] - cplx(1.0)) < 1e-15);
    CHECK_FALSE(Expression::parse("exp(z)").as_polynomial_in_z());
    const Expression q = Expression::parse("w0*w2 - w1^2");
    CHECK(q.max_w_index() == 2);
    CHECK_FALSE(q.uses_z());
  }

  TEST_CASE("substitution") {
    const Expression q = Expression::parse("w0*w1 + w1^2");
    const std::vector<Expression> comps{Expression::parse("1"), Expression::parse("exp(z)")};
    const Expression s = q.substitute(nullptr, comps);
    const cplx z{0.3, 0.7};
    CHECK(std::abs(s.value(z) - (std::exp(z) + std::exp(2.0 * z))) < 1e-13);
  }
}
