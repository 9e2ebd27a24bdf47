#include "vdlab/connection.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "vdlab/errors.hpp"

namespace vdlab {

MeromorphicConnection::MeromorphicConnection(int n, PoleSection t, int chart) : n_(n), t_(std::move(t)), chart_(chart) {
  if (n < 1) throw DomainError("MeromorphicConnection: dimension must be >= 1");
  if (t_.ambient() != n) throw DomainError("MeromorphicConnection: pole section dimension differs");
  if (chart < 0 || chart > n) throw DomainError("MeromorphicConnection: chart index out of range");
}

void MeromorphicConnection::set(int a, int b, int c, Expression gamma) {
  for (int i : {a, b, c})
    if (i < 1 || i > n_) throw DomainError("MeromorphicConnection::set: index out of range");
  if (gamma.uses_z()) throw DomainError("MeromorphicConnection: symbols must not depend on z");
  if (gamma.max_w_index() > n_) throw DomainError("MeromorphicConnection: coordinate index beyond w" + std::to_string(n_));
  gamma_.insert_or_assign({a, b, c}, std::move(gamma));
}

std::vector<Jet> MeromorphicConnection::contract(std::span<const Jet> w, std::span<const Jet> u,
                                                 std::span<const Jet> v) const {
  const int order = std::min({w[1].order(), u[0].order(), v[0].order()});
  std::vector<Jet> out(static_cast<std::size_t>(n_), Jet(0.0, order));
  const Jet z(0.0, w[1].order());
  for (const auto& [idx, g] : gamma_) {
    Jet value;
    try {
      value = g.eval(z, w);
    } catch (const SingularPointError&) {
      std::vector<cplx> wv;
      for (const auto& j : w) wv.push_back(j.value());
      if (std::abs(t_.value(wv, chart_)) > 1e-8)
        throw DegenerateError("connection has a pole off the divisor of t");
      throw;
    }
    const auto a = static_cast<std::size_t>(idx[0]) - 1;
    out[a] = out[a] + value * u[static_cast<std::size_t>(idx[1]) - 1] * v[static_cast<std::size_t>(idx[2]) - 1];
  }
  return out;
}

void verify_pole_clearing(const MeromorphicConnection& D, int samples, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const int n = D.ambient();
  std::vector<cplx> w(static_cast<std::size_t>(n) + 1, 1.0);
  for (int s = 0; s < samples; ++s) {
    for (int k = 1; k <= n; ++k) w[static_cast<std::size_t>(k)] = {u(rng), u(rng)};
    const cplx tv = D.pole_section().value(w, D.chart());
    for (const auto& [idx, g] : D.symbols()) {
      try {
        if (!std::isfinite(std::abs(tv * g.value(0.0, w))))
          throw DomainError("pole section does not clear the connection poles");
      } catch (const SingularPointError&) {
        if (std::abs(tv) > 1e-8) throw DomainError("pole section does not clear the connection poles");
      }
    }
  }
  std::vector<Expression> symbols;
  for (const auto& [idx, g] : D.symbols()) symbols.push_back(g);
  probe_polar_sets(D.pole_section(), D.chart(), symbols, rng);
}

std::vector<std::vector<Jet>> covariant_jet_series(const ProjectiveCurve& f, const MeromorphicConnection& D, int k,
                                                   cplx z, int order) {
  if (f.dimension() != D.ambient()) throw DomainError("covariant_jets: curve and connection dimensions differ");
  if (k < 1) throw DomainError("covariant_jets: k must be >= 1");
  if (order + k > kMaxJetOrder) throw DomainError("covariant_jets: jet order too high");
  const auto w = f.chart_jet(z, order + k, D.chart());
  const Jet t = D.pole_section().eval(w, D.chart());
  std::vector<Jet> fp;
  for (std::size_t a = 1; a < w.size(); ++a) fp.push_back(w[a].derivative());
  std::vector<std::vector<Jet>> out{fp};
  for (int j = 1; j < k; ++j) {
    const auto& cur = out.back();
    const auto corr = D.contract(w, fp, cur);
    std::vector<Jet> next;
    for (std::size_t a = 0; a < cur.size(); ++a) next.push_back(t * (cur[a].derivative() + corr[a]));
    out.push_back(std::move(next));
  }
  for (auto& row : out)
    for (auto& c : row) c = c.truncated(order);
  return out;
}

std::vector<std::vector<cplx>> covariant_jets(const ProjectiveCurve& f, const MeromorphicConnection& D, int k, cplx z) {
  std::vector<std::vector<cplx>> out;
  for (const auto& row : covariant_jet_series(f, D, k, z, 0)) {
    std::vector<cplx> v;
    for (const auto& c : row) v.push_back(c.value());
    out.push_back(std::move(v));
  }
  return out;
}

Jet wronskian_jet(const ProjectiveCurve& f, const MeromorphicConnection& D, cplx z, int order) {
  const int n = D.ambient();
  const auto rows = covariant_jet_series(f, D, n, z, order);
  std::vector<ExteriorElement<Jet>> factors;
  for (const auto& r : rows) factors.push_back(ExteriorElement<Jet>::from_vector(r));
  return wedge_all<Jet>(factors).coefficient_or(MultiIndex::full(n), Jet(0.0, order));
}

cplx autoparallel_wronskian(const ProjectiveCurve& f, const MeromorphicConnection& D, cplx z) {
  return wronskian_jet(f, D, z, 0).value();
}

AnalyticFn wronskian_function(const ProjectiveCurve& f, const MeromorphicConnection& D) {
  return [f, D](cplx z, int order) { return wronskian_jet(f, D, z, order); };
}

std::string MembershipReport::text() const {
  std::ostringstream s;
  for (std::size_t i = 0; i < z.size(); ++i) {
    s << format_double(z[i].real()) << (z[i].imag() < 0 ? "-" : "+") << format_double(std::abs(z[i].imag())) << "i, "
      << format_double(value[i]) << '\n';
  }
  return s.str();
}

MembershipReport pole_membership(const ProjectiveCurve& f, const PoleSection& t, std::span<const cplx> samples,
                                 int chart) {
  MembershipReport rep;
  rep.contained = !samples.empty();
  for (cplx z : samples) {
    const auto w = f.chart_jet(z, 0, chart);
    std::vector<cplx> wv;
    for (const auto& j : w) wv.push_back(j.value());
    const double v = std::abs(t.value(wv, chart));
    rep.z.push_back(z);
    rep.value.push_back(v);
    rep.contained = rep.contained && v < 1e-12;
  }
  return rep;
}

std::vector<cplx> membership_samples() {
  std::vector<cplx> s;
  for (double r : {1.0, 2.0})
    for (int k = 0; k < 8; ++k) s.push_back(std::polar(r, 2.0 * 3.141592653589793 * (k + 0.25) / 8));
  return s;
}

SiuResidual siu_smt_residual(const ProjectiveCurve& f, const MeromorphicConnection& D, std::span<const double> r_grid,
                             const QuadratureOptions& options, RunLog* log) {
  auto grid = checked_grid(r_grid);
  const int n = D.ambient();
  const int p = D.pole_section().degree();
  SiuResidual out{GrowthTable("T", {}, {}), GrowthTable("N_ram", {}, {}), GrowthTable("lhs", {}, {}),
                  GrowthTable("ratio_log", {}, {}), 0.0,
                  pole_membership(f, D.pole_section(), membership_samples(), D.chart())};

  bool autoparallel = true;
  for (cplx z : membership_samples()) {
    const auto rows = covariant_jets(f, D, n, z);
    double scale = 1.0;
    for (const auto& r : rows) {
      double s = 0.0;
      for (cplx c : r) s += std::abs(c);
      scale *= s;
    }
    const double w = std::abs(autoparallel_wronskian(f, D, z));
    if (w > 1e-12 * scale && w > 0.0) {
      autoparallel = false;
      break;
    }
  }
  if (autoparallel) throw DegenerateError("curve is autoparallel: the covariant Wronskian vanishes at every sample");

  std::vector<double> N(grid.size(), 0.0);
  if (!grid.empty()) {
    double t = grid.back();
    ZeroList zeros;
    for (int attempt = 0;; ++attempt) {
      try {
        zeros = count_zeros(wronskian_function(f, D), t);
        break;
      } catch (const BoundaryZeroError&) {
        if (attempt == 4) throw;
        t += 1e-6 * grid.back();
      }
    }
    if (t != grid.back() && log) log->add(radius_note("siu-residual", grid.back(), t));
    for (std::size_t i = 0; i < grid.size(); ++i) N[i] = integrated_count(zeros, grid[i]);
  }
  const GrowthTable T = characteristic(f, 1, grid, options);
  const double k_coeff = -(n + 1) - 0.5 * n * (n - 1) * p;
  std::vector<double> lhs(grid.size()), ratio(grid.size());
  double bound = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    lhs[i] = k_coeff * T[i] + N[i];
    ratio[i] = T[i] > 1.0 ? lhs[i] / std::log(T[i]) : std::numeric_limits<double>::quiet_NaN();
    if (T[i] > 1.0) bound = std::max(bound, ratio[i]);
  }
  out.T = T;
  out.N_ram = GrowthTable("N_ram", grid, std::move(N));
  out.lhs = GrowthTable("lhs", grid, std::move(lhs));
  out.ratio_log = GrowthTable("ratio_log", grid, std::move(ratio));
  out.bound = std::isfinite(bound) ? bound : std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace vdlab
