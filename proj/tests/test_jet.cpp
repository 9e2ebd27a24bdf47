#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "vdlab/expression.hpp"
#include "vdlab/nevanlinna.hpp"

using namespace vdlab;

using oracle::relative_error;
using oracle::stencil_derivative;

TEST_SUITE("jet") {
  TEST_CASE("jet battery against finite differences, orders <= 6") {
    for (const auto& c : oracle::jet_battery()) {
      CAPTURE(c.text);
      const Expression e = Expression::parse(c.text);
      const Jet j = e.eval(Jet::variable(c.z0, 6));
      auto f = [&](cplx z) { return e.value(z); };
      for (int k = 0; k <= 6; ++k) {
        CAPTURE(k);
        CHECK(relative_error(j.derivative_value(k), stencil_derivative(f, c.z0, k)) <= 1e-6);
      }
    }
  }

  TEST_CASE("curve jet of (1, z^2, exp z) at 1") {
    const auto F = ProjectiveCurve::parse(std::vector<std::string>{"1", "z^2", "exp(z)"});
    const auto jets = F.jet(1.0, 3);
    for (std::size_t a = 0; a < jets.size(); ++a) {
      const Expression& e = F.components()[a];
      for (int k = 0; k <= 3; ++k)
        CHECK(relative_error(jets[a].derivative_value(k), stencil_derivative([&](cplx z) { return e.value(z); }, 1.0, k)) <=
              1e-6);
    }
  }

  TEST_CASE("arithmetic identities") {
    const Jet x = Jet::variable({0.3, 0.2}, 8);
    const Jet one(1.0, 8);
    const Jet a = exp(log(one + x));
    for (int k = 0; k <= 8; ++k) CHECK(std::abs(a[k] - (one + x)[k]) < 1e-14);
    const Jet q = (x * x + one) / (x * x + one);
    CHECK(std::abs(q[0] - 1.0) < 1e-15);
    for (int k = 1; k <= 8; ++k) CHECK(std::abs(q[k]) < 1e-14);
    CHECK(x.derivative().order() == 7);
    CHECK_THROWS_AS(Jet(0.0, kMaxJetOrder + 1), DomainError);
  }

  TEST_CASE("division by a vanishing jet is singular") {
    const Jet x = Jet::variable(0.0, 3);
    CHECK_THROWS_AS(Jet(1.0, 3) / x, SingularPointError);
    CHECK_THROWS_AS(log(x), SingularPointError);
  }

  TEST_CASE("composition matches direct evaluation") {
    const Expression inner = Expression::parse("z^2 + 1");
    const Expression outer = Expression::parse("exp(z)");
    const cplx z0{0.4, -0.3};
    const Jet in = inner.eval(Jet::variable(z0, 6));
    const Jet composed = compose(outer.eval(Jet::variable(in.value(), 6)), in);
    const Jet direct = Expression::parse("exp(z^2 + 1)").eval(Jet::variable(z0, 6));
    for (int k = 0; k <= 6; ++k) CHECK(std::abs(composed[k] - direct[k]) < 1e-12 * std::max(1.0, std::abs(direct[k])));
  }
}
