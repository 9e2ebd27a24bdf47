#include "vdlab/nevanlinna.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "vdlab/errors.hpp"

namespace vdlab {

namespace {
constexpr double kPi = std::numbers::pi;
}  // namespace

std::vector<double> checked_grid(std::span<const double> r_grid) {
  std::vector<double> g(r_grid.begin(), r_grid.end());
  if (!g.empty() && g.front() < 1.0) throw DomainError("radius grid must start at r >= 1");
  for (std::size_t i = 1; i < g.size(); ++i)
    if (!(g[i] > g[i - 1])) throw DomainError("radius grid must be strictly increasing");
  return g;
}

std::string radius_note(const char* what, double r, double used) {
  std::ostringstream s;
  s << what << ": radius " << format_double(r) << " perturbed to " << format_double(used);
  return s.str();
}

namespace {

double finite_or_singular(double v, const char* what) {
  if (!std::isfinite(v)) throw SingularPointError(what, "");
  return v;
}

}  // namespace

std::vector<Jet> curve_jet(std::span<const Expression> components, cplx z0, int order) {
  const Jet z = Jet::variable(z0, order);
  std::vector<Jet> out;
  out.reserve(components.size());
  for (const auto& c : components) out.push_back(c.eval(z));
  return out;
}

double log_norm(std::span<const cplx> v) {
  double scale = 0.0;
  for (cplx c : v) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) return -std::numeric_limits<double>::infinity();
  double s = 0.0;
  for (cplx c : v) s += std::norm(c / scale);
  return std::log(scale) + 0.5 * std::log(s);
}

double perturbed_circle_mean(const std::function<double(cplx)>& f, double r, const CircleOptions& options,
                             const char* what, RunLog& log) {
  double used = r;
  for (int attempt = 0;; ++attempt) {
    try {
      const double m = circle_mean(f, 0.0, used, options).mean;
      if (used != r) log.add(radius_note(what, r, used));
      return m;
    } catch (const SingularPointError&) {
      if (attempt == 4) throw;
      used += 1e-6 * r;
    } catch (const ChartError&) {
      if (attempt == 4) throw;
      used += 1e-6 * r;
    }
  }
}

ProjectiveCurve::ProjectiveCurve(std::vector<Expression> components, bool declared_constant)
    : components_(std::move(components)), constant_(declared_constant) {
  if (components_.size() < 2) throw DomainError("ProjectiveCurve: need at least two components");
  bool any_z = false;
  for (const auto& c : components_) {
    if (c.max_w_index() >= 0) throw DomainError("ProjectiveCurve: components may only depend on z");
    any_z = any_z || c.uses_z();
  }
  if (!any_z && !declared_constant)
    throw DomainError("ProjectiveCurve: all components are constant; declare the curve constant");
  if (!any_z) constant_ = true;
}

ProjectiveCurve ProjectiveCurve::parse(std::span<const std::string> components, bool declared_constant) {
  std::vector<Expression> e;
  for (const auto& s : components) e.push_back(Expression::parse(s));
  return ProjectiveCurve(std::move(e), declared_constant);
}

std::vector<Jet> ProjectiveCurve::jet(cplx z, int order) const {
  auto j = curve_jet(components_, z, order);
  bool all_zero = true;
  for (const auto& c : j) all_zero = all_zero && c.value() == cplx(0.0);
  if (all_zero) throw ConfigError("non-reduced representation: all components vanish at z = " + format_double(z.real()) +
                                  (z.imag() < 0 ? "" : "+") + format_double(z.imag()) + "i");
  return j;
}

std::vector<cplx> ProjectiveCurve::values(cplx z) const {
  std::vector<cplx> v;
  v.reserve(components_.size());
  for (const auto& j : jet(z, 0)) v.push_back(j.value());
  return v;
}

std::vector<Jet> ProjectiveCurve::chart_jet(cplx z, int order, int chart) const {
  const int n = dimension();
  if (chart < 0 || chart > n) throw DomainError("chart index out of range");
  const auto F = jet(z, order);
  if (std::abs(F[static_cast<std::size_t>(chart)].value()) < 1e-12)
    throw ChartError("curve leaves the affine chart w" + std::to_string(chart) + " != 0");
  std::vector<Jet> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  out.emplace_back(1.0, order);
  for (int j = 0; j <= n; ++j)
    if (j != chart) out.push_back(F[static_cast<std::size_t>(j)] / F[static_cast<std::size_t>(chart)]);
  return out;
}

ProjectiveCurve ProjectiveCurve::exponential_lift() const {
  const Expression e = exp(Expression::z());
  std::vector<Expression> lifted;
  for (const auto& c : components_) lifted.push_back(c.substitute(&e, {}));
  return ProjectiveCurve(std::move(lifted), constant_);
}

std::string ProjectiveCurve::to_string() const {
  std::string s = "(";
  for (std::size_t i = 0; i < components_.size(); ++i) s += (i ? " : " : "") + components_[i].to_string();
  return s + ")";
}

Divisor::Divisor(Expression q, int n) : q_(std::move(q)), n_(n) {
  if (n < 1) throw DomainError("Divisor: ambient dimension must be >= 1");
  if (q_.uses_z()) throw DomainError("Divisor: Q must not depend on z");
  if (q_.max_w_index() > n) throw DomainError("Divisor: Q uses a coordinate beyond w" + std::to_string(n));
  const auto poly = q_.as_polynomial();
  if (!poly) throw DomainError("Divisor: Q is not a polynomial");
  bool first = true;
  for (const auto& [mono, c] : *poly) {
    if (c == cplx(0.0)) continue;
    int deg = 0;
    for (std::size_t k = 1; k < mono.size(); ++k) deg += mono[k];
    if (first) degree_ = deg;
    else if (deg != degree_) throw DomainError("Divisor: Q is not homogeneous");
    first = false;
    c_q_ += std::abs(c);
  }
  if (first) throw DomainError("Divisor: Q is identically zero");
  if (degree_ < 1) throw DomainError("Divisor: Q must have degree >= 1");
}

Divisor Divisor::parse(const std::string& q, int n) { return Divisor(Expression::parse(q), n); }

Expression Divisor::pullback(const ProjectiveCurve& f) const {
  if (f.dimension() != n_) throw DomainError("Divisor and curve live in different projective spaces");
  return q_.substitute(nullptr, f.components());
}

double fs_pullback_density(const ProjectiveCurve& f, cplx z) {
  const auto F = f.jet(z, 1);
  double scale = 0.0;
  for (const auto& j : F) scale = std::max(scale, std::abs(j.value()));
  std::vector<cplx> v, d;
  for (const auto& j : F) {
    v.push_back(j.value() / scale);
    d.push_back(j[1] / scale);
  }
  // Lagrange identity: ||v||^2 ||d||^2 - |<v, d>|^2 = sum_{j<k} |v_j d_k - v_k d_j|^2.
  double num = 0.0, nv = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    nv += std::norm(v[j]);
    for (std::size_t k = j + 1; k < v.size(); ++k) num += std::norm(v[j] * d[k] - v[k] * d[j]);
  }
  return num / (kPi * nv * nv);
}

AreaProfile area_profile(const std::function<double(cplx)>& density, std::span<const double> r_grid,
                         const QuadratureOptions& options) {
  AreaProfile p;
  if (r_grid.empty()) return p;
  std::vector<double> breaks{0.5, 1.0};
  for (double r : r_grid)
    if (r > 1.0) breaks.push_back(r);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  p.nodes = radial_nodes(breaks, options.points_per_panel, 0.5, options.panel_ratio);
  p.means = radial_profile(density, p.nodes, options.circle, options.exec);
  return p;
}

GrowthTable characteristic(const ProjectiveCurve& f, int d, std::span<const double> r_grid,
                           const QuadratureOptions& options) {
  auto grid = checked_grid(r_grid);
  std::vector<double> values(grid.size(), 0.0);
  if (!f.is_constant() && d != 0) {
    const AreaProfile p = area_profile([&f](cplx z) { return fs_pullback_density(f, z); }, grid, options);
    for (std::size_t i = 0; i < grid.size(); ++i) values[i] = d * p.nested(grid[i]);
  }
  return {"T", std::move(grid), std::move(values)};
}

GrowthTable proximity(const ProjectiveCurve& f, const Divisor& D, std::span<const double> r_grid,
                      const QuadratureOptions& options, RunLog* log) {
  if (f.dimension() != D.ambient()) throw DomainError("Divisor and curve live in different projective spaces");
  auto grid = checked_grid(r_grid);
  const double log_c = std::log(D.coefficient_norm());
  const int d = D.degree();
  const Expression& q = D.polynomial();
  auto integrand = [&](cplx z) {
    const auto F = f.values(z);
    const double log_q = std::log(std::abs(q.value(z, F)));
    return finite_or_singular(d * log_norm(F) + log_c - log_q, "Q(F) vanishes at a quadrature node");
  };
  // Q(F) identically zero: every probe vanishes relative to the normalisation.
  bool inside = true;
  for (int k = 0; k < 8 && inside; ++k) {
    const cplx z = std::polar(1.0 + 0.37 * k, 0.61 + 1.3 * k);
    const auto F = f.values(z);
    inside = std::abs(q.value(z, F)) <= 1e-13 * D.coefficient_norm() * std::exp(d * log_norm(F));
  }
  if (inside) throw DegenerateError("curve lies in the divisor: Q(F) vanishes identically");

  std::vector<RunLog> logs(grid.size());
  std::vector<double> values(grid.size());
  for_each_index(grid.size(), options.exec, [&](std::size_t i) {
    values[i] = perturbed_circle_mean(integrand, grid[i], options.circle, "proximity", logs[i]);
  });
  if (log)
    for (const auto& l : logs) log->append(l);
  return {"m", std::move(grid), std::move(values)};
}

double integrated_count(const ZeroList& zeros, double r, double lower) {
  double s = 0.0;
  for (const auto& z : zeros) {
    const double a = std::abs(z.location);
    if (a < r) s += z.multiplicity * std::log(r / std::max(lower, a));
  }
  return s;
}

GrowthTable counting(const ProjectiveCurve& f, const Divisor& D, std::span<const double> r_grid, RunLog* log,
                     ZeroList* zeros_out) {
  auto grid = checked_grid(r_grid);
  std::vector<double> values(grid.size(), 0.0);
  if (grid.empty()) return {"N", std::move(grid), std::move(values)};
  const Expression g = D.pullback(f);
  bool vanishes = true;
  for (int k = 0; k < 8 && vanishes; ++k) {
    const cplx z = std::polar(1.0 + 0.37 * k, 0.61 + 1.3 * k);
    const auto F = f.values(z);
    vanishes = std::abs(g.value(z)) <= 1e-13 * D.coefficient_norm() * std::exp(D.degree() * log_norm(F));
  }
  if (vanishes) throw DegenerateError("curve lies in the divisor: Q(F) vanishes identically");

  double t = grid.back();
  ZeroList zeros;
  for (int attempt = 0;; ++attempt) {
    try {
      zeros = count_zeros(g, t);
      break;
    } catch (const BoundaryZeroError&) {
      if (attempt == 4) throw;
      t += 1e-6 * grid.back();
    }
  }
  if (t != grid.back() && log) log->add(radius_note("counting", grid.back(), t));
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = integrated_count(zeros, grid[i]);
  if (zeros_out) *zeros_out = std::move(zeros);
  return {"N", std::move(grid), std::move(values)};
}

FmtResult fmt_residual(const ProjectiveCurve& f, const Divisor& D, std::span<const double> r_grid,
                       const QuadratureOptions& options, RunLog* log) {
  GrowthTable T = characteristic(f, D.degree(), r_grid, options);
  GrowthTable m = proximity(f, D, r_grid, options, log);
  GrowthTable N = counting(f, D, r_grid, log);
  GrowthTable res = (T - m - N).relabeled("residual");
  return {std::move(T), std::move(m), std::move(N), std::move(res)};
}

double jensen_check(const Expression& g, double r, double s, const CircleOptions& options) {
  if (!(s > 0.0) || !(r > s)) throw DomainError("jensen_check: need 0 < s < r");
  const ZeroList zeros = count_zeros(g, r);
  for (const auto& z : zeros)
    if (std::abs(std::abs(z.location) - s) <= 1e-9 * s)
      throw BoundaryZeroError("zero on the inner circle |z| = " + format_double(s));
  auto log_abs = [&g](cplx z) { return finite_or_singular(std::log(std::abs(g.value(z))), "g vanishes on the circle"); };
  const double outer = circle_mean(log_abs, 0.0, r, options).mean;
  const double inner = circle_mean(log_abs, 0.0, s, options).mean;
  return (outer - inner) - integrated_count(zeros, r, s);
}

double flagged_log_measure(std::span<const double> r_grid, const std::vector<bool>& flagged) {
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < r_grid.size(); ++i)
    if (flagged[i]) m += std::log(r_grid[i + 1] / r_grid[i]);
  return m;
}

CalculusLemmaReport calculus_lemma_diagnostic(const std::function<double(cplx)>& kappa,
                                              std::span<const double> r_grid, double delta,
                                              const QuadratureOptions& options) {
  CalculusLemmaReport rep;
  const auto grid = checked_grid(r_grid);
  if (grid.empty()) return rep;
  const AreaProfile p = area_profile([&kappa](cplx z) { return kappa(z) / kPi; }, grid, options);
  const auto circle = map_indices<double>(grid.size(), options.exec, [&](std::size_t i) {
    return circle_mean(kappa, 0.0, grid[i], options.circle).mean;
  });
  auto log_plus = [](double x) { return x > 1.0 ? std::log(x) : 0.0; };
  std::vector<bool> flagged;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CalculusLemmaRow row{};
    row.r = grid[i];
    row.circle_mean = circle[i];
    row.T = p.nested(grid[i]);
    row.dT = p.disk(grid[i]) / grid[i];
    const double num = log_plus(row.circle_mean);
    const double den = log_plus(row.T) + log_plus(std::log(row.r));
    row.ratio = den > 0.0 ? num / den : (num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    row.below_threshold = row.T <= 1.0;
    row.borel_violation = !row.below_threshold && row.dT > row.T * std::pow(std::log(row.T), 1.0 + delta);
    flagged.push_back(row.borel_violation);
    rep.max_ratio = std::max(rep.max_ratio, row.ratio);
    rep.rows.push_back(row);
  }
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (flagged[i]) rep.exceptional_measure += grid[i + 1] - grid[i];
  rep.exceptional_log_measure = flagged_log_measure(grid, flagged);
  rep.grid_log_measure = std::log(grid.back() / grid.front());
  return rep;
}

}  // namespace vdlab
