#include <doctest.h>

#include <random>

#include "vdlab/errors.hpp"
#include "vdlab/jacobian.hpp"

using namespace vdlab;

namespace {

ProjectiveCurve affine(std::vector<std::string> c) {
  c.insert(c.begin(), "1");
  return ProjectiveCurve::parse(c);
}

FieldSpec spec(std::vector<std::vector<std::string>> fields, const std::string& t = "1") {
  std::vector<MeromorphicVectorField> v;
  for (const auto& f : fields) v.push_back(MeromorphicVectorField::parse(f));
  const int n = static_cast<int>(fields.front().size());
  return FieldSpec(v, PoleSection::parse(t, n));
}

ExteriorElement<Jet> random_phi(int n, std::mt19937& rng) {
  std::normal_distribution<double> g;
  ExteriorElement<Jet> phi(n, n - 1);
  for (const auto& idx : enumerate_multiindices(n, n - 1)) phi.set(idx, Jet(cplx(g(rng), g(rng)), 0));
  return phi;
}

}  // namespace

TEST_SUITE("jacobian") {
  TEST_CASE("lifted field value") {
    const auto f = affine({"z", "exp(z)"});
    const auto phi = lift_field(spec({{"w1", "0"}}), f, 1.0, 0);
    CHECK(std::abs(phi.coefficient_or(MultiIndex(2, {1}), Jet(0.0, 0)).value() - 1.0) < 1e-15);
  }

  TEST_CASE("Jacobian of coordinate fields") {
    const auto S = spec({{"0", "1"}});
    for (cplx z : {cplx(0), cplx(1), cplx(0.3, -2)}) {
      CHECK(std::abs(jacobian_scalar(affine({"z", "exp(z)"}), S, z).value() - 1.0) < 1e-14);
      CHECK(std::abs(jacobian_scalar(affine({"z^2", "exp(z)"}), S, z).value() - 2.0 * z) < 1e-14);
    }
  }

  TEST_CASE("formula and wedge routes agree and are linear in phi") {
    std::mt19937 rng(5);
    const auto f = affine({"z^2 + 1", "exp(z)", "z*exp(-z)"});
    for (int trial = 0; trial < 50; ++trial) {
      const cplx z{std::normal_distribution<double>()(rng), std::normal_distribution<double>()(rng)};
      const auto a = random_phi(3, rng), b = random_phi(3, rng);
      const cplx s{0.7, -1.1};
      ExteriorElement<Jet> combo(3, 2);
      for (const auto& idx : enumerate_multiindices(3, 2))
        combo.set(idx, Jet(s * a.coefficient_or(idx, Jet(0.0, 0)).value() + b.coefficient_or(idx, Jet(0.0, 0)).value(), 0));
      const cplx wa = jacobian_scalar(f, a, z).value(), wb = jacobian_scalar(f, b, z).value();
      const cplx wc = jacobian_scalar(f, combo, z).value();
      CHECK(std::abs(wc - (s * wa + wb)) < 1e-11 * (1 + std::abs(wc)));
      CHECK(std::abs(wa - jacobian_wedge(f, a, z).value()) < 1e-12 * (1 + std::abs(wa)));
    }
  }

  TEST_CASE("pole clearing") {
    CHECK_THROWS_AS(verify_pole_clearing(spec({{"1/w1", "0"}})), DomainError);
    CHECK_NOTHROW(verify_pole_clearing(spec({{"1/w1", "0"}}, "w1")));
    CHECK_THROWS_AS(PoleSection::parse("w1 + 1", 2), DomainError);
  }

  TEST_CASE("one-term Schwarz case and the random bound") {
    ExteriorElement<cplx> phi(3, 2);
    phi.set(MultiIndex(3, {1, 3}), cplx(2.0, 1.0));
    const std::vector<cplx> A{0.5, cplx(1.0, 2.0), -1.0};
    const auto r = g_ratio_frame(phi, A);
    double u = 0.0;
    for (cplx a : A) u += std::norm(a);
    CHECK(std::abs(r.g - std::abs(phi.coefficient_or(MultiIndex(3, {1, 3}), 0.0)) * std::abs(A[1]) / std::sqrt(u)) < 1e-15);
    CHECK(r.g <= r.phi_norm);
    const auto eq = g_ratio_frame(phi, std::vector<cplx>{0.0, 3.0, 0.0});
    CHECK(std::abs(eq.g - eq.phi_norm) < 1e-15);

    std::mt19937 rng(17);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 2000; ++trial) {
      ExteriorElement<cplx> p(4, 3);
      for (const auto& idx : enumerate_multiindices(4, 3)) p.set(idx, cplx(g(rng), g(rng)));
      const std::vector<cplx> a{{g(rng), g(rng)}, {g(rng), g(rng)}, {g(rng), g(rng)}, {g(rng), g(rng)}};
      const auto res = g_ratio_frame(p, a, 0.5 + std::abs(g(rng)));
      REQUIRE(res.g <= res.phi_norm * (1 + 1e-14));
    }
    CHECK_THROWS_AS(g_ratio_frame(phi, std::vector<cplx>{0.0, 0.0, 0.0}), DegenerateError);
  }

  TEST_CASE("g bounded by the field norm along curves") {
    const auto S = spec({{"0", "1"}});
    for (cplx z : {cplx(0), cplx(1), cplx(0, 1)}) {
      const auto r = g_ratio(affine({"z", "exp(z)"}), S, z);
      CHECK(r.g <= r.phi_norm + 1e-12);
    }
    CHECK(g_ratio(affine({"z^2", "exp(z)"}), S, 0.0).g == 0.0);
  }

  TEST_CASE("effectivity") {
    const std::vector<cplx> samples{0.5, cplx(0, 1), -1.0};
    const auto yes = effectivity_test(affine({"z", "exp(z)"}), spec({{"0", "1"}}), samples);
    CHECK(yes.effective);
    CHECK(yes.witness.has_value());
    CHECK_FALSE(effectivity_test(affine({"z", "2*z"}), spec({{"1", "2"}}), samples).effective);
  }

  TEST_CASE("effective multi-index from a probe") {
    const std::vector<MeromorphicVectorField> coords{MeromorphicVectorField::parse(std::vector<std::string>{"1", "0"}),
                                                     MeromorphicVectorField::parse(std::vector<std::string>{"0", "1"})};
    const auto t = PoleSection::unit(2);
    CHECK(find_effective_multiindex(affine({"z", "exp(z)"}), coords, t, 0.0) == MultiIndex(2, {2}));
    CHECK(find_effective_multiindex(affine({"exp(z)", "z"}), coords, t, 0.0) == MultiIndex(2, {1}));
  }

  TEST_CASE("ramification counting") {
    const std::vector<double> g{1.0, 1.5, 2.5, 4.0};
    const auto S = spec({{"0", "1"}});
    const auto none = ramification(affine({"z", "exp(z)"}), S, g);
    for (double v : none.values()) CHECK(v == 0.0);
    const auto origin = ramification(affine({"z^2", "exp(z)"}), S, g);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(origin[i] - std::log(g[i])) < 1e-12);
    const auto shifted = ramification(affine({"(z - 2)^2", "exp(z)"}), S, g);
    for (std::size_t i = 0; i < g.size(); ++i)
      CHECK(std::abs(shifted[i] - (g[i] < 2 ? 0.0 : std::log(g[i] / 2))) < 1e-9);
    CHECK_THROWS_AS(ramification(affine({"z", "2*z"}), spec({{"1", "2"}}), g), DegenerateError);
  }

  TEST_CASE("SMT identity is flat") {
    const auto g = geometric_grid(2.0, 64.0, 6);
    const auto S = spec({{"0", "1"}});
    CHECK(smt_identity_residual(affine({"z", "exp(z)"}), S, g).residual.spread() < 1e-6);
    CHECK(smt_identity_residual(affine({"z^2", "exp(z)"}), S, g).residual.spread() < 1e-6);
  }

  TEST_CASE("first integrals") {
    const std::vector<cplx> s{0.0, 1.0, 2.0, cplx(0.5, 1.5)};
    CHECK(first_integral_check(affine({"z", "z^2"}), Expression::parse("w2 - w1^2"), s) == 0.0);
    CHECK(first_integral_check(affine({"exp(z)", "exp(2*z)"}), Expression::parse("w2/w1^2"), s) <= 1e-12);
    CHECK(first_integral_check(affine({"z", "exp(z)"}), Expression::parse("w2 - w1^2"), s) > 1.0);
  }
}
