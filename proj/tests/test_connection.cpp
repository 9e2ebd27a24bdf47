#include <doctest.h>

#include "vdlab/connection.hpp"
#include "vdlab/errors.hpp"

using namespace vdlab;

namespace {

ProjectiveCurve affine(std::vector<std::string> c) {
  c.insert(c.begin(), "1");
  return ProjectiveCurve::parse(c);
}

}  // namespace

TEST_SUITE("connection") {
  TEST_CASE("flat covariant jets are plain derivatives") {
    const auto f = affine({"z", "z^2", "exp(z)"});
    const auto D = MeromorphicConnection::flat(3);
    for (cplx z : {cplx(0.3, 0.1), cplx(-1.0, 2.0)}) {
      const auto rows = covariant_jets(f, D, 3, z);
      const cplx e = std::exp(z);
      const std::vector<std::vector<cplx>> want{{1.0, 2.0 * z, e}, {0.0, 2.0, e}, {0.0, 0.0, e}};
      for (int j = 0; j < 3; ++j)
        for (int a = 0; a < 3; ++a) CHECK(std::abs(rows[j][a] - want[j][a]) <= 1e-12 * std::max(1.0, std::abs(want[j][a])));
    }
    const auto rows = covariant_jets(affine({"z", "exp(z)"}), MeromorphicConnection::flat(2), 3, 0.0);
    CHECK(rows[0] == std::vector<cplx>{1.0, 1.0});
    CHECK(rows[1] == std::vector<cplx>{0.0, 1.0});
    CHECK(rows[2] == std::vector<cplx>{0.0, 1.0});
  }

  TEST_CASE("one-dimensional Christoffel symbol") {
    MeromorphicConnection D(1, PoleSection::unit(1));
    D.set(1, 1, 1, "2.5");
    const auto rows = covariant_jets(affine({"z"}), D, 2, 0.7);
    CHECK(std::abs(rows[1][0] - 2.5) < 1e-15);
  }

  TEST_CASE("Wronskians") {
    const auto D = MeromorphicConnection::flat(2);
    for (cplx z : membership_samples()) {
      CHECK(std::abs(autoparallel_wronskian(affine({"z", "3*z - 2"}), D, z)) <= 1e-12);
      CHECK(autoparallel_wronskian(affine({"z", "z^2"}), D, z) == cplx(2.0));
      CHECK(std::abs(autoparallel_wronskian(affine({"z", "exp(z)"}), D, z) - std::exp(z)) < 1e-12 * std::abs(std::exp(z)));
    }
  }

  TEST_CASE("a repeated covariant row gives an exact zero") {
    const auto rows = covariant_jet_series(affine({"z^2", "exp(z)"}), MeromorphicConnection::flat(2), 2, {0.4, 0.9}, 0);
    const auto v = ExteriorElement<Jet>::from_vector(rows[1]);
    const auto w = wedge(v, v);
    for (const auto& [idx, c] : w.coefficients()) CHECK(c.value() == cplx(0.0));
  }

  TEST_CASE("autoparallel verdict survives affine reparametrization") {
    MeromorphicConnection D(2, PoleSection::parse("w1", 2));
    D.set(1, 1, 1, "1/w1");
    D.set(2, 1, 2, "1/w1");
    auto verdict = [&](const ProjectiveCurve& f) {
      double m = 0.0;
      for (cplx z : membership_samples()) m = std::max(m, std::abs(autoparallel_wronskian(f, D, z)));
      return m <= 1e-12;
    };
    CHECK(verdict(affine({"z", "3*z"})) == verdict(affine({"2*z + 1", "6*z + 3"})));
    CHECK(verdict(affine({"z", "z^2"})) == verdict(affine({"2*z + 1", "(2*z + 1)^2"})));
    CHECK_FALSE(verdict(affine({"z", "z^2"})));
  }

  TEST_CASE("pole clearing and uncleared poles") {
    MeromorphicConnection bad(2, PoleSection::unit(2));
    bad.set(1, 1, 1, "1/(w1 - 1)");
    CHECK_THROWS_AS(verify_pole_clearing(bad), DomainError);
    MeromorphicConnection good(2, PoleSection::parse("w1 - w0", 2));
    good.set(1, 1, 1, "1/(w1 - 1)");
    CHECK_NOTHROW(verify_pole_clearing(good));
    CHECK_THROWS_AS(bad.set(1, 1, 1, "z"), DomainError);
  }

  TEST_CASE("membership and the autoparallel branch") {
    const auto f = affine({"0", "exp(z)"});
    const auto m = pole_membership(f, PoleSection::parse("w1", 2), membership_samples());
    CHECK(m.contained);
    for (double v : m.value) CHECK(v == 0.0);
    CHECK_THROWS_AS(siu_smt_residual(affine({"z", "2*z + 1"}), MeromorphicConnection::flat(2), default_grid()),
                    DegenerateError);
    const auto S = siu_smt_residual(affine({"z", "exp(z)"}), MeromorphicConnection::flat(2), geometric_grid(2, 64, 6));
    CHECK(std::isfinite(S.bound));
    CHECK_FALSE(S.membership.contained);
  }
}
