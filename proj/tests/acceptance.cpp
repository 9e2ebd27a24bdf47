// One line per acceptance criterion; exit status 1 if any criterion fails.

#include <boost/rational.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "vdlab/connection.hpp"
#include "vdlab/errors.hpp"
#include "vdlab/experiment.hpp"
#include "vdlab/jacobian.hpp"
#include "vdlab/nevanlinna.hpp"

using namespace vdlab;
namespace fs = std::filesystem;

#ifndef VDLAB_CONFIG_DIR
#define VDLAB_CONFIG_DIR "configs"
#endif

namespace {

struct Verdict {
  Verdict() { note << std::boolalpha; }
  bool pass = true;
  std::ostringstream note;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      note << " [failed: " << what << "]";
    }
  }
};

std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

ProjectiveCurve curve(std::vector<std::string> c) { return ProjectiveCurve::parse(c); }

ProjectiveCurve affine(std::vector<std::string> c) {
  c.insert(c.begin(), "1");
  return ProjectiveCurve::parse(c);
}

FieldSpec coordinate_field(int n, int j) {
  std::vector<std::string> comps(static_cast<std::size_t>(n), "0");
  comps[static_cast<std::size_t>(j) - 1] = "1";
  return FieldSpec({MeromorphicVectorField::parse(comps)}, PoleSection::unit(n));
}

ExperimentConfig shipped(const std::string& name) {
  return parse_config(fs::path(VDLAB_CONFIG_DIR) / "acceptance" / (name + ".cfg"));
}

fs::path out_root() {
  const fs::path p = fs::temp_directory_path() / "vdlab-acceptance";
  fs::create_directories(p);
  return p;
}

std::vector<double> half_power_grid() {
  std::vector<double> g;
  for (int k = 2; k <= 14; ++k) g.push_back(std::pow(2.0, k / 2.0));
  return g;
}

Verdict criterion1() {
  Verdict v;
  const auto g = half_power_grid();
  const auto line = fmt_residual(curve({"1", "z"}), Divisor::parse("w1", 1), g);
  double dev = 0.0;
  for (double x : line.residual.values()) dev = std::max(dev, std::abs(x + 0.5 * std::log(2.0)));
  const auto e = fmt_residual(curve({"1", "z", "exp(z)"}), Divisor::parse("w2", 2), g);
  v.note << "(1:z) max |res + log2/2| = " << g6(dev) << " (<= 1e-3); (1:z:e^z) spread = " << g6(e.residual.spread())
         << " (<= 0.01)";
  v.require(dev <= 1e-3, "(1:z) residual");
  v.require(e.residual.spread() <= 0.01, "(1:z:e^z) spread");
  return v;
}

Verdict criterion2() {
  Verdict v;
  const std::vector<double> g{1000.0};
  const char* comps[] = {"z", "z^2", "z^3"};
  for (int d = 1; d <= 3; ++d) {
    const double T = characteristic(curve({"1", comps[d - 1]}), 1, g)[0];
    const double ratio = T / std::log(1000.0);
    const double rel = std::abs(ratio - d) / d;
    v.note << (d > 1 ? "; " : "") << "d=" << d << " T/log r = " << g6(ratio) << " (rel " << g6(rel) << ")";
    v.require(rel <= 0.02, "d=" + std::to_string(d) + " outside 2%");
  }
  return v;
}

Verdict criterion3() {
  Verdict v;
  struct P {
    const char* g;
    double s;
    std::vector<double> r;
  };
  const std::vector<P> polys{{"z^2 - 1", 2, {3, 4, 6, 8}},
                             {"(z - 1)^2*(z + 3)", 0.5, {2, 4, 8}},
                             {"z^6 - 2*z + 1", 0.5, {1.7, 3, 5}},
                             {"z^4 + z + 5", 0.5, {1.2, 2.5, 4}},
                             {"(z - 0.5 - 0.5*i)*(z + 2*i)^2*(z - 3)", 0.25, {1, 2.5, 3.5, 6}}};
  double worst = 0.0;
  for (const auto& p : polys) {
    const Expression e = Expression::parse(p.g);
    const auto coeffs = e.as_polynomial_in_z();
    v.require(coeffs && coeffs->size() <= 7, std::string(p.g) + " degree");
    for (double r : p.r) worst = std::max(worst, std::abs(jensen_check(e, r, p.s)));
  }
  v.require(worst <= 1e-8, "polynomial residual");
  const Expression ex = Expression::parse("exp(z)");
  double harmonic = 0.0;
  for (double r : {2.0, 4.0, 8.0}) harmonic = std::max(harmonic, std::abs(jensen_check(ex, r, 1.0)));
  const bool zero_free = count_zeros(ex, 8.0).empty();
  v.note << "five polynomials max |res| = " << g6(worst) << " (<= 1e-8); exp(z): no zeros = " << zero_free
         << ", max |res| = " << g6(harmonic);
  v.require(zero_free && harmonic <= 1e-12, "exp(z) harmonic structure");
  return v;
}

Verdict criterion4() {
  Verdict v;
  int configs = 0;
  for (const char* name : {"thm24-quadratic", "thm24-exp", "thm24-shifted"}) {
    const auto c = shipped(name);
    v.require(c.curve->dimension() == 2, std::string(name) + " not in P^2");
    const FieldSpec spec(c.fields, *c.pole);
    const double R = c.grid.back();
    const auto a = count_zeros(jacobian_function(*c.curve, spec), R);
    const auto b = count_zeros(jacobian_wedge_function(*c.curve, spec), R);
    bool match = a.size() == b.size();
    for (std::size_t i = 0; match && i < a.size(); ++i)
      match = a[i].multiplicity == b[i].multiplicity && std::abs(a[i].location - b[i].location) <= 1e-9;
    v.require(match, std::string(name) + " zero lists differ");
    v.note << (configs++ ? "; " : "") << name << ": " << total_multiplicity(a) << " zero(s) both routes";
  }
  return v;
}

Verdict criterion5() {
  Verdict v;
  int i = 0;
  for (const char* name : {"thm25-exp", "thm25-quadratic", "thm25-euler", "thm25-space"}) {
    const auto c = shipped(name);
    const auto r = run_experiment(c, out_root() / name);
    v.require(r.status == Status::Pass && c.sample_count == 1000, name);
    v.note << (i++ ? "; " : "") << name << " max(g - |phi|) = " << g6(r.max.value_or(NAN));
  }
  v.note << " (slack 1e-9, 1000 points each)";
  return v;
}

Verdict criterion6() {
  Verdict v;
  const auto g = geometric_grid(2.0, 64.0, 11);
  const char* first[] = {"z", "z^2"};
  for (int k = 0; k < 2; ++k) {
    const auto f = affine({first[k], "exp(z)"});
    const auto S = smt_identity_residual(f, coordinate_field(2, 2), g);
    v.note << (k ? "; " : "") << "(" << first[k] << ", e^z) identity spread " << g6(S.residual.spread());
    v.require(S.residual.spread() <= 0.1, "identity spread");
  }
  for (int k = 0; k < 2; ++k) {
    const auto f = affine({first[k], "exp(z)"});
    const auto I = smt_inequality(f, coordinate_field(2, 2), default_grid(), 1.0);
    v.note << "; (" << first[k] << ", e^z) bound " << g6(I.bound) << ", exceptional fraction "
           << g6(I.exceptional_fraction());
    v.require(std::isfinite(I.bound), "bound not finite");
    v.require(I.exceptional_fraction() <= 0.05, "exceptional set above 5% of the grid");
  }
  return v;
}

Verdict criterion7() {
  Verdict v;
  long cases = 0;
  for (int n = 1; n <= 8; ++n)
    for (int k = 1; k <= n; ++k)
      for (const auto& lam : enumerate_multiindices(n, k)) {
        const std::vector<int> l(lam.entries().begin(), lam.entries().end());
        const auto diff = oracle::set_difference(n, l);
        const MultiIndex perp = complement(lam);
        std::vector<int> cat = diff;
        cat.insert(cat.end(), l.begin(), l.end());
        const bool ok = std::vector<int>(perp.entries().begin(), perp.entries().end()) == diff &&
                        perm_sign(perp, lam) == oracle::parity_by_cycles(cat);
        if (!ok) v.require(false, "n=" + std::to_string(n) + " " + lam.to_string());
        ++cases;
      }
  using Q = boost::rational<long long>;
  std::mt19937 rng(20240601);
  std::uniform_int_distribution<int> num(-9, 9), den(1, 7), keep(0, 2), dim(2, 5);
  auto random_element = [&](int n, int k) {
    ExteriorElement<Q> e(n, k);
    for (const auto& s : oracle::subsets(n, k))
      if (keep(rng)) e.set(MultiIndex(n, s), Q(num(rng), den(rng)));
    return e;
  };
  int bad = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = dim(rng);
    const int q = std::uniform_int_distribution<int>(1, n - 1)(rng);
    ExteriorElement<Q> alpha(n, n);
    const Q top(num(rng), den(rng));
    alpha.set(MultiIndex::full(n), top);
    const auto xi = random_element(n, q), theta = random_element(n, n - q);
    Q rhs(0);
    for (const auto& [m, cm] : theta.coefficients())
      for (const auto& [l, cl] : xi.coefficients()) {
        std::vector<int> cat(m.entries().begin(), m.entries().end());
        cat.insert(cat.end(), l.entries().begin(), l.entries().end());
        rhs += Q(oracle::bubble_sign(cat)) * cm * cl * top;
      }
    if (pair(interior_product(alpha, xi), theta, Q(0)) != rhs) ++bad;
  }
  v.require(bad == 0, std::to_string(bad) + " pairing mismatches");
  v.note << cases << " multi-indices (n <= 8) match the parity and set-difference oracles; pairing identity exact on "
         << 10000 - bad << "/10000 rational instances";
  return v;
}

Verdict criterion8() {
  Verdict v;
  double worst = 0.0;
  for (const auto& c : oracle::jet_battery()) {
    const Expression e = Expression::parse(c.text);
    const Jet j = e.eval(Jet::variable(c.z0, 6));
    for (int k = 0; k <= 6; ++k)
      worst = std::max(worst, oracle::relative_error(j.derivative_value(k),
                                                     oracle::stencil_derivative([&](cplx z) { return e.value(z); }, c.z0, k)));
  }
  v.note << oracle::jet_battery().size() << " expressions, orders 0..6, max relative error " << g6(worst)
         << " (<= 1e-6)";
  v.require(worst <= 1e-6, "jet battery");
  return v;
}

Verdict criterion9() {
  Verdict v;
  const auto f = affine({"z", "z^2", "exp(z)"});
  double flat = 0.0;
  for (cplx z : membership_samples()) {
    const auto rows = covariant_jets(f, MeromorphicConnection::flat(3), 3, z);
    for (int k = 0; k < 3; ++k) {
      const auto J = f.chart_jet(z, 3, 0);
      for (int a = 0; a < 3; ++a)
        flat = std::max(flat, oracle::relative_error(rows[k][a], J[a + 1].derivative_value(k + 1)));
    }
  }
  std::mt19937 rng(3);
  std::normal_distribution<double> g;
  double line = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const cplx a{g(rng), g(rng)}, b{g(rng), g(rng)};
    const auto L = ProjectiveCurve({Expression::constant(1.0), Expression::z(),
                                    Expression::constant(a) * Expression::z() + Expression::constant(b)});
    for (cplx z : membership_samples())
      line = std::max(line, std::abs(autoparallel_wronskian(L, MeromorphicConnection::flat(2), z)));
  }
  bool two = true;
  for (cplx z : membership_samples())
    two = two && autoparallel_wronskian(affine({"z", "z^2"}), MeromorphicConnection::flat(2), z) == cplx(2.0);
  const auto siu = run_experiment(shipped("siu-residual-exp"), out_root() / "siu-residual-exp");
  const auto mem = run_experiment(shipped("siu-residual-contained"), out_root() / "siu-residual-contained");
  v.note << "flat jets max rel err " << g6(flat) << "; lines max |W| " << g6(line) << "; (z, z^2) W == 2: " << two
         << "; siu (z, e^z) bound " << g6(siu.max.value_or(NAN)) << " [" << status_name(siu.status)
         << "]; t = w1 containment [" << status_name(mem.status) << "]";
  v.require(flat <= 1e-12, "flat jets");
  v.require(line <= 1e-12, "line Wronskian");
  v.require(two, "(z, z^2) Wronskian");
  v.require(siu.status == Status::Pass && siu.max && std::isfinite(*siu.max), "siu residual");
  v.require(mem.status == Status::Pass, "membership report");
  return v;
}

Verdict criterion10() {
  Verdict v;
  const auto samples = membership_samples();
  const double a = first_integral_check(affine({"z", "z^2"}), Expression::parse("w2 - w1^2"), samples);
  const double b = first_integral_check(affine({"exp(z)", "exp(2*z)"}), Expression::parse("w2/w1^2"), samples);
  const std::vector<cplx> control_samples{0.0, 1.0, 2.0};
  const double c = first_integral_check(affine({"z", "exp(z)"}), Expression::parse("w2 - w1^2"), control_samples);
  v.note << "(z, z^2) deviation " << g6(a) << "; (e^z, e^2z) " << g6(b) << "; control (z, e^z) " << g6(c);
  v.require(a == 0.0, "(z, z^2) not exactly 0");
  v.require(b <= 1e-12, "(e^z, e^2z)");
  v.require(c > 1.0, "control");
  return v;
}

}  // namespace

int main() {
  using Fn = Verdict (*)();
  const Fn criteria[] = {criterion1, criterion2, criterion3, criterion4, criterion5,
                         criterion6, criterion7, criterion8, criterion9, criterion10};
  const char* titles[] = {"FMT flatness",
                          "degree recovery",
                          "Jensen residuals",
                          "Jacobian zeros, formula vs wedge",
                          "g <= |phi| at random points",
                          "SMT identity and inequality",
                          "combinatorics oracles",
                          "jet engine vs finite differences",
                          "connection machinery",
                          "first-integral check"};
  int failed = 0;
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < 10; ++i) {
    Verdict v;
    try {
      v = criteria[i]();
    } catch (const std::exception& e) {
      v.pass = false;
      v.note << "error: " << e.what();
    }
    failed += v.pass ? 0 : 1;
    std::printf("criterion %2d %s: %s: %s\n", i + 1, v.pass ? "PASS" : "FAIL", titles[i], v.note.str().c_str());
    std::fflush(stdout);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d of 10 criteria pass (%.1f s)\n", 10 - failed, secs);
  return failed == 0 ? 0 : 1;
}
