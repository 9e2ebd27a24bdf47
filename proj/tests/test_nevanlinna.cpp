#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "vdlab/errors.hpp"
#include "vdlab/nevanlinna.hpp"

using namespace vdlab;

namespace {

ProjectiveCurve curve(std::vector<std::string> c) { return ProjectiveCurve::parse(c); }

}  // namespace

TEST_SUITE("nevanlinna") {
  TEST_CASE("Fubini-Study density closed forms") {
    CHECK(std::abs(fs_pullback_density(curve({"1", "z"}), 0.0) - 1 / std::numbers::pi) < 1e-15);
    CHECK(std::abs(fs_pullback_density(curve({"1", "z^2"}), 1.0) - 1 / std::numbers::pi) < 1e-15);
    const cplx z{0.3, -1.2};
    const double r2 = std::norm(z);
    CHECK(std::abs(fs_pullback_density(curve({"1", "z"}), z) - 1 / (std::numbers::pi * (1 + r2) * (1 + r2))) < 1e-15);
  }

  TEST_CASE("T for (1:z) matches the closed form") {
    const auto g = default_grid();
    const auto T = characteristic(curve({"1", "z"}), 1, g);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(T[i] - 0.5 * std::log((1 + g[i] * g[i]) / 2)) < 1e-9);
    CHECK(std::abs(characteristic(curve({"1", "z"}), 1, std::vector<double>{10.0})[0] - 0.5 * std::log(50.5)) < 1e-9);
  }

  TEST_CASE("T agrees with the Cartan-type oracle") {
    const std::vector<double> g{1.5, 3.0, 6.0};
    for (auto c : {std::vector<std::string>{"1", "z", "exp(z)"}, {"1 + z", "z^2 - 2", "exp(z/2)"}, {"1", "z^3"}}) {
      const auto f = curve(c);
      const auto T = characteristic(f, 1, g);
      for (std::size_t i = 0; i < g.size(); ++i) {
        CAPTURE(f.to_string());
        CAPTURE(g[i]);
        CHECK(std::abs(T[i] - oracle::cartan_T([&](cplx z) { return f.values(z); }, g[i])) < 1e-7 * std::max(1.0, T[i]));
      }
    }
  }

  TEST_CASE("T is nondecreasing and linear in d") {
    const auto f = curve({"1", "z", "exp(z)"});
    const auto g = default_grid();
    const auto T1 = characteristic(f, 1, g), T3 = characteristic(f, 3, g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(T3[i] == doctest::Approx(3 * T1[i]).epsilon(1e-14));
      if (i) CHECK(T1[i] >= T1[i - 1]);
    }
  }

  TEST_CASE("proximity closed forms and positivity") {
    const auto f = curve({"1", "z"});
    const auto g = default_grid();
    const auto m1 = proximity(f, Divisor::parse("w1", 1), g);
    const auto m0 = proximity(f, Divisor::parse("w0", 1), g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double r = g[i];
      CHECK(std::abs(m1[i] - (0.5 * std::log(1 + r * r) - std::log(r))) < 1e-9);
      CHECK(std::abs(m0[i] - 0.5 * std::log(1 + r * r)) < 1e-9);
      if (i) CHECK(m1[i] < m1[i - 1]);
    }
    const auto e = curve({"1", "z", "exp(z)"});
    for (const char* q : {"w2", "w0 + w1", "w1*w2 - w0^2"}) {
      const auto m = proximity(e, Divisor::parse(q, 2), g);
      for (double v : m.values()) CHECK(v >= 0.0);
    }
  }

  TEST_CASE("counting function: closed forms and additivity") {
    const auto g = default_grid();
    const auto N1 = counting(curve({"1", "z"}), Divisor::parse("w1", 1), g);
    const auto N2 = counting(curve({"1", "z^2"}), Divisor::parse("w1", 1), g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(std::abs(N1[i] - std::log(g[i])) < 1e-12);
      CHECK(std::abs(N2[i] - 2 * std::log(g[i])) < 1e-12);
    }
    // N(D1 + D2) = N(D1) + N(D2) for the product divisor.
    const auto f = curve({"1", "z", "exp(z)"});
    const auto a = counting(f, Divisor::parse("w2 - 2*w0", 2), g);
    const auto b = counting(f, Divisor::parse("w1 - 3*w0", 2), g);
    const auto ab = counting(f, Divisor::parse("(w2 - 2*w0)*(w1 - 3*w0)", 2), g);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(ab[i] - a[i] - b[i]) < 1e-9);
  }

  TEST_CASE("FMT residual") {
    const auto g = default_grid();
    const auto R = fmt_residual(curve({"1", "z"}), Divisor::parse("w1", 1), g);
    for (double v : R.residual.values()) CHECK(std::abs(v + 0.5 * std::log(2.0)) < 1e-9);
    const auto E = fmt_residual(curve({"1", "z", "exp(z)"}), Divisor::parse("w2", 2), g);
    CHECK(E.residual.spread() < 1e-6);
  }

  TEST_CASE("Jensen residuals") {
    CHECK(std::abs(jensen_check(Expression::parse("z^2 - 1"), 4.0, 2.0)) < 1e-10);
    CHECK(std::abs(jensen_check(Expression::parse("z"), std::exp(1.0), 1.0)) < 1e-12);
    CHECK(std::abs(jensen_check(Expression::parse("exp(z)"), 5.0, 1.0)) < 1e-12);
  }

  TEST_CASE("calculus lemma diagnostic for constant density") {
    const std::vector<double> g{2.0, 4.0, 8.0};
    const auto rep = calculus_lemma_diagnostic([](cplx) { return 1.0; }, g, 1.0);
    REQUIRE(rep.rows.size() == 3);
    for (const auto& row : rep.rows) {
      CHECK(std::abs(row.circle_mean - 1.0) < 1e-12);
      CHECK(std::abs(row.T - (row.r * row.r - 1) / 2) < 1e-9 * row.T);
      CHECK(row.ratio == 0.0);
    }
    CHECK(calculus_lemma_diagnostic([](cplx) { return 1.0; }, std::vector<double>{}, 1.0).rows.empty());
  }

  TEST_CASE("input validation") {
    CHECK_THROWS_AS(curve({"1", "w1"}), DomainError);
    CHECK_THROWS_AS(curve({"1", "2"}), DomainError);
    CHECK_NOTHROW(ProjectiveCurve::parse(std::vector<std::string>{"1", "2"}, true));
    CHECK_THROWS_AS(Divisor::parse("w0 + w1^2", 1), DomainError);
    CHECK_THROWS_AS(checked_grid(std::vector<double>{0.5, 2.0}), DomainError);
    CHECK_THROWS_AS(checked_grid(std::vector<double>{2.0, 2.0}), DomainError);
    CHECK_THROWS_AS(curve({"1", "z"}).chart_jet(0.0, 1, 1), ChartError);
  }

  TEST_CASE("serial and parallel quadrature agree bit for bit") {
    const auto f = curve({"1", "z", "exp(z)"});
    QuadratureOptions s, p;
    s.exec = Exec::Serial;
    p.exec = Exec::Parallel;
    const auto g = default_grid();
    CHECK(std::ranges::equal(characteristic(f, 1, g, s).values(), characteristic(f, 1, g, p).values()));
    CHECK(std::ranges::equal(proximity(f, Divisor::parse("w2", 2), g, s).values(),
                             proximity(f, Divisor::parse("w2", 2), g, p).values()));
  }
}
