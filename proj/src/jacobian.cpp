#include "vdlab/jacobian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "vdlab/errors.hpp"

namespace vdlab {

namespace {

bool identically_zero(const Expression& e) {
  const auto p = e.as_polynomial();
  if (!p) return false;
  return std::all_of(p->begin(), p->end(), [](const auto& kv) { return kv.second == cplx(0.0); });
}

// Homogeneous coordinates with x_chart = 1 from chart coordinates w_1..w_n.
template <typename T>
std::vector<T> homogeneous(std::span<const T> w, int chart, const T& one) {
  const int n = static_cast<int>(w.size()) - 1;
  std::vector<T> x;
  x.reserve(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) {
    if (j < chart) x.push_back(w[static_cast<std::size_t>(j) + 1]);
    else if (j == chart) x.push_back(one);
    else x.push_back(w[static_cast<std::size_t>(j)]);
  }
  return x;
}

int order_of(const ExteriorElement<Jet>& phi) {
  int order = kMaxJetOrder;
  for (const auto& [idx, c] : phi.coefficients()) order = std::min(order, c.order());
  return phi.empty() ? 0 : order;
}

// Solves V b = y by Gaussian elimination with partial pivoting; nullopt if
// a pivot falls below 1e-12 of the largest entry of V.
std::optional<std::vector<cplx>> solve(std::vector<std::vector<cplx>> V, std::vector<cplx> y) {
  const std::size_t n = y.size();
  double scale = 0.0;
  for (const auto& row : V)
    for (cplx c : row) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) return std::nullopt;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(V[i][k]) > std::abs(V[piv][k])) piv = i;
    if (std::abs(V[piv][k]) < 1e-12 * scale) return std::nullopt;
    std::swap(V[k], V[piv]);
    std::swap(y[k], y[piv]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const cplx m = V[i][k] / V[k][k];
      for (std::size_t j = k; j < n; ++j) V[i][j] -= m * V[k][j];
      y[i] -= m * y[k];
    }
  }
  std::vector<cplx> b(n);
  for (std::size_t k = n; k-- > 0;) {
    cplx s = y[k];
    for (std::size_t j = k + 1; j < n; ++j) s -= V[k][j] * b[j];
    b[k] = s / V[k][k];
  }
  return b;
}

// Coefficients B with f'(z) = sum_i B_i X_i(f(z)).
std::vector<cplx> frame_coefficients(const ProjectiveCurve& f, std::span<const MeromorphicVectorField> fields,
                                     cplx z) {
  const int chart = fields.front().chart();
  const auto w = chart_point(f, z, 0, chart);
  std::vector<cplx> wv;
  for (const auto& j : w) wv.push_back(j.value());
  const auto fp = tangent_jets(f, z, 0, chart);
  const std::size_t n = fields.size();
  std::vector<std::vector<cplx>> V(n, std::vector<cplx>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = fields[i].values(wv);
    for (std::size_t a = 0; a < n; ++a) V[a][i] = x[a];
  }
  std::vector<cplx> y;
  for (const auto& j : fp) y.push_back(j.value());
  auto b = solve(std::move(V), std::move(y));
  if (!b) throw DegenerateError("fields are not linearly independent at the probe");
  return *b;
}

const std::vector<cplx> kEffectivitySamples{{0.3, 0.2}, {1.1, -0.7}, {-0.9, 1.3}, {2.1, 0.4},
                                             {-1.7, -1.1}, {0.05, 2.6}, {3.2, -2.3}, {-0.4, -0.35}};

}  // namespace

MeromorphicVectorField::MeromorphicVectorField(std::vector<Expression> components, int chart)
    : components_(std::move(components)), chart_(chart) {
  const int n = ambient();
  if (n < 1) throw DomainError("MeromorphicVectorField: no components");
  if (chart < 0 || chart > n) throw DomainError("MeromorphicVectorField: chart index out of range");
  for (const auto& c : components_) {
    if (c.uses_z()) throw DomainError("MeromorphicVectorField: components must not depend on z");
    if (c.max_w_index() > n) throw DomainError("MeromorphicVectorField: coordinate index beyond w" + std::to_string(n));
  }
  if (std::all_of(components_.begin(), components_.end(), identically_zero))
    throw DomainError("MeromorphicVectorField: all components vanish identically");
}

MeromorphicVectorField MeromorphicVectorField::parse(std::span<const std::string> components, int chart) {
  std::vector<Expression> e;
  for (const auto& s : components) e.push_back(Expression::parse(s));
  return MeromorphicVectorField(std::move(e), chart);
}

std::vector<Jet> MeromorphicVectorField::eval(std::span<const Jet> w) const {
  const Jet z(0.0, w[1].order());
  std::vector<Jet> out;
  out.reserve(components_.size());
  for (const auto& c : components_) out.push_back(c.eval(z, w));
  return out;
}

std::vector<cplx> MeromorphicVectorField::values(std::span<const cplx> w) const {
  std::vector<cplx> out;
  out.reserve(components_.size());
  for (const auto& c : components_) out.push_back(c.value(0.0, w));
  return out;
}

PoleSection::PoleSection(Expression t, int n) : t_(std::move(t)), n_(n) {
  if (n < 1) throw DomainError("PoleSection: ambient dimension must be >= 1");
  if (t_.uses_z()) throw DomainError("PoleSection: t must not depend on z");
  if (t_.max_w_index() > n) throw DomainError("PoleSection: coordinate index beyond w" + std::to_string(n));
  const auto poly = t_.as_polynomial();
  if (!poly) throw DomainError("PoleSection: t is not a polynomial");
  bool first = true;
  for (const auto& [mono, c] : *poly) {
    if (c == cplx(0.0)) continue;
    int deg = 0;
    for (std::size_t k = 1; k < mono.size(); ++k) deg += mono[k];
    if (first) degree_ = deg;
    else if (deg != degree_) throw DomainError("PoleSection: t is not homogeneous");
    first = false;
    c_t_ += std::abs(c);
  }
  if (first) throw DomainError("PoleSection: t is identically zero");
}

PoleSection PoleSection::parse(const std::string& t, int n) { return PoleSection(Expression::parse(t), n); }

Jet PoleSection::eval(std::span<const Jet> w, int chart) const {
  const int order = w[1].order();
  const auto x = homogeneous<Jet>(w, chart, Jet(1.0, order));
  return t_.eval(Jet(0.0, order), x);
}

cplx PoleSection::value(std::span<const cplx> w, int chart) const {
  const auto x = homogeneous<cplx>(w, chart, cplx(1.0));
  return t_.value(0.0, x);
}

double log_frame_norm_sq(const PoleSection& t, std::span<const cplx> F, int chart) {
  const double p = t.degree();
  const double lc = std::log(std::abs(F[static_cast<std::size_t>(chart)]));
  return 2.0 * p * (lc - log_norm(F)) - 2.0 * std::log(t.coefficient_norm());
}

FieldSpec::FieldSpec(std::vector<MeromorphicVectorField> fs, PoleSection section)
    : fields(std::move(fs)), t(std::move(section)) {
  if (fields.empty()) throw DomainError("FieldSpec: no fields");
  const int n = fields.front().ambient();
  for (const auto& x : fields) {
    if (x.ambient() != n) throw DomainError("FieldSpec: fields live in different dimensions");
    if (x.chart() != fields.front().chart()) throw DomainError("FieldSpec: fields use different charts");
  }
  if (t.ambient() != n) throw DomainError("FieldSpec: pole section dimension differs from the fields");
  if (degree() > n) throw DomainError("FieldSpec: more fields than the dimension");
}

namespace {

void collect_denominators(const ExprNode& node, std::vector<Expression>& out) {
  if (node.op == Op::Div) out.emplace_back(node.rhs);
  if (node.op == Op::Pow && node.index < 0) out.emplace_back(node.lhs);
  if (node.lhs) collect_denominators(*node.lhs, out);
  if (node.rhs) collect_denominators(*node.rhs, out);
}

}  // namespace

void probe_polar_sets(const PoleSection& t, int chart, std::span<const Expression> exprs, std::mt19937_64& rng) {
  const int n = t.ambient();
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
  std::vector<Expression> denominators;
  for (const auto& e : exprs) collect_denominators(e.root(), denominators);
  auto size_near = [&](std::vector<cplx> w, int j, cplx root, double eps, double theta) {
    w[static_cast<std::size_t>(j)] = root + std::polar(eps, theta);
    const cplx tv = t.value(w, chart);
    double m = 0.0;
    for (const auto& e : exprs) {
      try {
        m = std::max(m, std::abs(tv * e.value(0.0, w)));
      } catch (const SingularPointError&) {
        return std::numeric_limits<double>::infinity();
      }
    }
    return m;
  };
  for (const auto& d : denominators) {
    for (int j = 1; j <= n; ++j) {
      for (int trial = 0; trial < 3; ++trial) {
        std::vector<cplx> w(static_cast<std::size_t>(n) + 1, 1.0);
        std::vector<Expression> reps(static_cast<std::size_t>(n) + 1, Expression::constant(1.0));
        for (int k = 1; k <= n; ++k) {
          w[static_cast<std::size_t>(k)] = {u(rng), u(rng)};
          reps[static_cast<std::size_t>(k)] = k == j ? Expression::z() : Expression::constant(w[static_cast<std::size_t>(k)]);
        }
        const auto poly = d.substitute(nullptr, reps).as_polynomial_in_z();
        if (!poly || poly->size() < 2) continue;
        const double theta = angle(rng);
        for (const auto& root : polynomial_roots(*poly)) {
          const double far = size_near(w, j, root.location, 1e-3, theta);
          const double near = size_near(w, j, root.location, 1e-6, theta);
          if (!(near <= 100.0 * std::max(1.0, far)))
            throw DomainError("pole section does not clear the poles along " + d.to_string() + " = 0");
        }
      }
    }
  }
}

void verify_pole_clearing(const FieldSpec& spec, int samples, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const int n = spec.ambient();
  std::vector<cplx> w(static_cast<std::size_t>(n) + 1, 1.0);
  for (int s = 0; s < samples; ++s) {
    for (int k = 1; k <= n; ++k) w[static_cast<std::size_t>(k)] = {u(rng), u(rng)};
    const cplx tv = spec.t.value(w, spec.chart());
    for (const auto& x : spec.fields) {
      try {
        for (cplx c : x.values(w))
          if (!std::isfinite(std::abs(tv * c))) throw DomainError("pole section does not clear the field poles");
      } catch (const SingularPointError&) {
        if (std::abs(tv) > 1e-8) throw DomainError("pole section does not clear the field poles");
      }
    }
  }
  for (const auto& x : spec.fields) probe_polar_sets(spec.t, spec.chart(), x.components(), rng);
}

std::vector<Jet> chart_point(const ProjectiveCurve& f, cplx z, int order, int chart) {
  return f.chart_jet(z, order, chart);
}

std::vector<Jet> tangent_jets(const ProjectiveCurve& f, cplx z, int order, int chart) {
  const auto w = f.chart_jet(z, order + 1, chart);
  std::vector<Jet> d;
  d.reserve(w.size() - 1);
  for (std::size_t k = 1; k < w.size(); ++k) d.push_back(w[k].derivative());
  return d;
}

ExteriorElement<Jet> lift_field(const FieldSpec& spec, const ProjectiveCurve& f, cplx z, int order) {
  if (f.dimension() != spec.ambient()) throw DomainError("lift_field: curve and fields live in different dimensions");
  const auto w = chart_point(f, z, order, spec.chart());
  std::vector<ExteriorElement<Jet>> factors;
  for (const auto& x : spec.fields) {
    const auto comps = x.eval(w);
    factors.push_back(ExteriorElement<Jet>::from_vector(comps));
  }
  return spec.t.eval(w, spec.chart()) * wedge_all<Jet>(factors);
}

Jet jacobian_scalar(const ProjectiveCurve& f, const ExteriorElement<Jet>& phi, cplx z, int chart) {
  const int n = f.dimension();
  if (phi.ambient() != n || phi.degree() != n - 1) throw DomainError("jacobian_scalar: phi must have degree n - 1");
  const int order = order_of(phi);
  const auto fp = tangent_jets(f, z, order, chart);
  Jet W(0.0, order);
  for (const auto& [lambda, c] : phi.coefficients()) {
    const MultiIndex perp = complement(lambda);
    const Jet term = c * fp[static_cast<std::size_t>(perp[0]) - 1];
    W = perm_sign(perp, lambda) > 0 ? W + term : W - term;
  }
  return W;
}

Jet jacobian_scalar(const ProjectiveCurve& f, const FieldSpec& spec, cplx z, int order) {
  return jacobian_scalar(f, lift_field(spec, f, z, order), z, spec.chart());
}

Jet jacobian_wedge(const ProjectiveCurve& f, const ExteriorElement<Jet>& phi, cplx z, int chart) {
  const int n = f.dimension();
  if (phi.ambient() != n || phi.degree() != n - 1) throw DomainError("jacobian_wedge: phi must have degree n - 1");
  const int order = order_of(phi);
  const auto fp = tangent_jets(f, z, order, chart);
  const auto Z = wedge(ExteriorElement<Jet>::from_vector(fp), phi);
  return Z.coefficient_or(MultiIndex::full(n), Jet(0.0, order));
}

Jet jacobian_wedge(const ProjectiveCurve& f, const FieldSpec& spec, cplx z, int order) {
  return jacobian_wedge(f, lift_field(spec, f, z, order), z, spec.chart());
}

AnalyticFn jacobian_function(const ProjectiveCurve& f, const FieldSpec& spec) {
  return [f, spec](cplx z, int order) { return jacobian_scalar(f, spec, z, order); };
}

AnalyticFn jacobian_wedge_function(const ProjectiveCurve& f, const FieldSpec& spec) {
  return [f, spec](cplx z, int order) { return jacobian_wedge(f, spec, z, order); };
}

Effectivity effectivity_test(const ProjectiveCurve& f, const FieldSpec& spec, std::span<const cplx> samples) {
  Effectivity e;
  for (cplx z : samples) {
    const auto phi = lift_field(spec, f, z, 0);
    const auto fp = tangent_jets(f, z, 0, spec.chart());
    double scale = 0.0, phi_abs = 0.0;
    for (const auto& j : fp) scale += std::abs(j.value());
    for (const auto& [idx, c] : phi.coefficients()) phi_abs += std::abs(c.value());
    const double w = std::abs(jacobian_scalar(f, phi, z, spec.chart()).value());
    e.max_abs = std::max(e.max_abs, w);
    if (!e.effective && w > 1e-12 * scale * phi_abs && w > 0.0) {
      e.effective = true;
      e.witness = z;
    }
  }
  return e;
}

MultiIndex find_effective_multiindex(const ProjectiveCurve& f, std::span<const MeromorphicVectorField> fields,
                                     const PoleSection& t, cplx probe) {
  const int n = f.dimension();
  if (static_cast<int>(fields.size()) != n) throw DomainError("find_effective_multiindex: need n fields");
  const auto B = frame_coefficients(f, fields, probe);
  double best = 0.0;
  for (cplx b : B) best = std::max(best, std::abs(b));
  if (best == 0.0) throw DegenerateError("degenerate probe: f' vanishes");
  std::vector<int> ties;
  for (int i = 0; i < n; ++i)
    if (std::abs(B[static_cast<std::size_t>(i)]) >= (1.0 - 1e-9) * best) ties.push_back(i);
  int iota = ties.front();
  if (ties.size() > 1) {
    // Prefer the coefficient that stays largest on a small circle around the probe.
    std::vector<double> floor(ties.size(), std::numeric_limits<double>::infinity());
    for (int k = 0; k < 16; ++k) {
      const cplx z = probe + std::polar(1e-2, 2.0 * std::numbers::pi * k / 16);
      const auto Bz = frame_coefficients(f, fields, z);
      for (std::size_t i = 0; i < ties.size(); ++i)
        floor[i] = std::min(floor[i], std::abs(Bz[static_cast<std::size_t>(ties[i])]));
    }
    iota = ties[static_cast<std::size_t>(std::max_element(floor.begin(), floor.end()) - floor.begin())];
  }
  const MultiIndex lambda = complement(MultiIndex(n, {iota + 1}));
  const FieldSpec spec = select_fields(fields, t, lambda);
  const cplx probe_only[] = {probe};
  if (!effectivity_test(f, spec, probe_only).effective)
    throw DegenerateError("degenerate probe: no multi-index is effective here");
  return lambda;
}

FieldSpec select_fields(std::span<const MeromorphicVectorField> fields, const PoleSection& t,
                        const MultiIndex& lambda) {
  std::vector<MeromorphicVectorField> chosen;
  for (int j : lambda.entries()) chosen.push_back(fields[static_cast<std::size_t>(j) - 1]);
  return FieldSpec(std::move(chosen), t);
}

GRatio g_ratio_frame(const ExteriorElement<cplx>& phi_frame, std::span<const cplx> A, double sigma_norm) {
  const int n = static_cast<int>(A.size());
  if (phi_frame.ambient() != n || phi_frame.degree() != n - 1) throw DomainError("g_ratio_frame: phi must have degree n - 1");
  double u = 0.0;
  for (cplx a : A) u += std::norm(a);
  if (!(u > 1e-300)) throw DegenerateError("stationary point: f' vanishes in the frame");
  cplx S = 0.0;
  double phi_sq = 0.0;
  for (const auto& [lambda, c] : phi_frame.coefficients()) {
    const MultiIndex perp = complement(lambda);
    const cplx term = c * A[static_cast<std::size_t>(perp[0]) - 1];
    S += perm_sign(perp, lambda) > 0 ? term : -term;
    phi_sq += std::norm(c);
  }
  return {std::abs(S) * sigma_norm / std::sqrt(u), sigma_norm * std::sqrt(phi_sq)};
}

GRatio g_ratio(const ProjectiveCurve& f, const FieldSpec& spec, cplx z) {
  const int n = f.dimension();
  if (spec.degree() != n - 1) throw DomainError("g_ratio: phi must have degree n - 1");
  const int chart = spec.chart();
  const auto w = chart_point(f, z, 1, chart);
  std::vector<cplx> wv, fp;
  double s = 1.0;
  for (int k = 1; k <= n; ++k) {
    wv.push_back(w[static_cast<std::size_t>(k)].value());
    fp.push_back(w[static_cast<std::size_t>(k)][1]);
    s += std::norm(wv.back());
  }
  // Fubini-Study matrix G_{jk} = delta_{jk} / s - conj(w_j) w_k / s^2 and its Cholesky factor G = L L^H.
  const auto N = static_cast<std::size_t>(n);
  std::vector<std::vector<cplx>> G(N, std::vector<cplx>(N)), L(N, std::vector<cplx>(N, 0.0));
  for (std::size_t j = 0; j < N; ++j)
    for (std::size_t k = 0; k < N; ++k) G[j][k] = (j == k ? 1.0 / s : 0.0) - std::conj(wv[j]) * wv[k] / (s * s);
  for (std::size_t j = 0; j < N; ++j) {
    double d = G[j][j].real();
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(L[j][k]);
    L[j][j] = std::sqrt(d);
    for (std::size_t i = j + 1; i < N; ++i) {
      cplx v = G[i][j];
      for (std::size_t k = 0; k < j; ++k) v -= L[i][k] * std::conj(L[j][k]);
      L[i][j] = v / L[j][j];
    }
  }
  // Unitary coframe psi_a = sum_j L_{ja} dw_j: tangent coefficients A_a = sum_j L_{ja} f'_j,
  // and d/dw_j has frame coordinates given by row j of L.
  std::vector<cplx> A(N, 0.0);
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t j = 0; j < N; ++j) A[a] += L[j][a] * fp[j];
  std::vector<ExteriorElement<cplx>> rows;
  for (std::size_t j = 0; j < N; ++j) rows.push_back(ExteriorElement<cplx>::from_vector(L[j]));

  const auto phi = lift_field(spec, f, z, 0);
  ExteriorElement<cplx> phi_frame(n, n - 1);
  for (const auto& [lambda, c] : phi.coefficients()) {
    std::vector<ExteriorElement<cplx>> factors;
    for (int j : lambda.entries()) factors.push_back(rows[static_cast<std::size_t>(j) - 1]);
    phi_frame = phi_frame + c.value() * wedge_all<cplx>(factors);
  }
  const auto F = f.values(z);
  const double sigma = std::exp(0.5 * log_frame_norm_sq(spec.t, F, chart));
  return g_ratio_frame(phi_frame, A, sigma);
}

GrowthTable ramification(const ProjectiveCurve& f, const FieldSpec& spec, std::span<const double> r_grid,
                         RunLog* log, ZeroList* zeros_out) {
  auto grid = checked_grid(r_grid);
  if (spec.degree() != f.dimension() - 1) throw DomainError("ramification: phi must have degree n - 1");
  if (!effectivity_test(f, spec, kEffectivitySamples).effective)
    throw DegenerateError("ineffective field: the Jacobian section vanishes at every sample");
  std::vector<double> values(grid.size(), 0.0);
  if (grid.empty()) return {"N_ram", std::move(grid), std::move(values)};
  const AnalyticFn W = jacobian_function(f, spec);
  double t = grid.back();
  ZeroList zeros;
  for (int attempt = 0;; ++attempt) {
    try {
      zeros = count_zeros(W, t);
      break;
    } catch (const BoundaryZeroError&) {
      if (attempt == 4) throw;
      t += 1e-6 * grid.back();
    }
  }
  if (t != grid.back() && log) log->add(radius_note("ramification", grid.back(), t));
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = integrated_count(zeros, grid[i]);
  if (zeros_out) *zeros_out = std::move(zeros);
  return {"N_ram", std::move(grid), std::move(values)};
}

namespace {

// (1/2) log xi = (1/2) log rho(f) + (1/2) log ||sigma_f||^2 + log |W|.
double half_log_xi(const ProjectiveCurve& f, const FieldSpec& spec, cplx z) {
  const int n = f.dimension();
  const int chart = spec.chart();
  const auto F = f.values(z);
  const double log_rho = 2.0 * (n + 1) * (std::log(std::abs(F[static_cast<std::size_t>(chart)])) - log_norm(F));
  const double log_W = std::log(std::abs(jacobian_scalar(f, spec, z, 0).value()));
  const double v = 0.5 * log_rho + 0.5 * log_frame_norm_sq(spec.t, F, chart) + log_W;
  if (!std::isfinite(v)) throw SingularPointError("Jacobian section vanishes at a quadrature node", "");
  return v;
}

}  // namespace

SmtIdentity smt_identity_residual(const ProjectiveCurve& f, const FieldSpec& spec, std::span<const double> r_grid,
                                  const QuadratureOptions& options, RunLog* log) {
  auto grid = checked_grid(r_grid);
  const int n = f.dimension();
  const int p = spec.t.degree();
  GrowthTable N = ramification(f, spec, grid, log);
  GrowthTable T = characteristic(f, 1, grid, options);
  std::vector<RunLog> logs(grid.size());
  std::vector<double> lhs(grid.size());
  for_each_index(grid.size(), options.exec, [&](std::size_t i) {
    lhs[i] = perturbed_circle_mean([&](cplx z) { return half_log_xi(f, spec, z); }, grid[i], options.circle,
                                   "smt-identity", logs[i]);
  });
  if (log)
    for (const auto& l : logs) log->append(l);
  GrowthTable L("lhs", grid, std::move(lhs));
  GrowthTable R = (static_cast<double>(-(n + 1 + p)) * T + N).relabeled("rhs");
  GrowthTable res = (L - R).relabeled("residual");
  return {T.relabeled("T"), N, L, R, res};
}

SmtInequality smt_inequality(const ProjectiveCurve& f, const FieldSpec& spec, std::span<const double> r_grid,
                             double delta, const QuadratureOptions& options, RunLog* log) {
  auto grid = checked_grid(r_grid);
  const int n = f.dimension();
  const int p = spec.t.degree();
  GrowthTable N = ramification(f, spec, grid, log);
  const AreaProfile prof = area_profile([&f](cplx z) { return fs_pullback_density(f, z); }, grid, options);
  const std::size_t m = grid.size();
  std::vector<double> T(m), dT(m), lhs(m), rl(m), rlp(m);
  SmtInequality out{GrowthTable("T", {}, {}), N, GrowthTable("lhs", {}, {}), GrowthTable("ratio_log", {}, {}),
                    GrowthTable("ratio_log_plus", {}, {}), {}, {}, {}, 0.0, 0.0, 0.0, 0.0, 0.0};
  auto log_plus = [](double x) { return x > 1.0 ? std::log(x) : 0.0; };
  const double nan = std::numeric_limits<double>::quiet_NaN();
  double bound = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i) {
    T[i] = prof.nested(grid[i]);
    dT[i] = prof.disk(grid[i]) / grid[i];
    lhs[i] = -static_cast<double>(n + 1 + p) * T[i] + N[i];
    const bool below = T[i] <= 1.0;
    const bool exc = !below && dT[i] > T[i] * std::pow(std::log(T[i]), 1.0 + delta);
    rl[i] = below ? nan : lhs[i] / std::log(T[i]);
    const double den = log_plus(T[i]) + log_plus(std::log(grid[i]));
    rlp[i] = den > 0.0 ? lhs[i] / den : 0.0;
    out.below_threshold.push_back(below);
    out.borel_violation.push_back(exc);
    out.exceptional.push_back(below || exc);
    if (!below && !exc) bound = std::max(bound, rl[i]);
  }
  out.T = GrowthTable("T", grid, std::move(T));
  out.lhs = GrowthTable("lhs", grid, std::move(lhs));
  out.ratio_log = GrowthTable("ratio_log", grid, std::move(rl));
  out.ratio_log_plus = GrowthTable("ratio_log_plus", grid, std::move(rlp));
  out.bound = std::isfinite(bound) ? bound : nan;
  out.exceptional_log_measure = flagged_log_measure(grid, out.exceptional);
  out.below_threshold_log_measure = flagged_log_measure(grid, out.below_threshold);
  out.borel_log_measure = flagged_log_measure(grid, out.borel_violation);
  out.grid_log_measure = m > 1 ? std::log(grid.back() / grid.front()) : 0.0;
  return out;
}

double first_integral_check(const ProjectiveCurve& f, const Expression& phi, std::span<const cplx> samples,
                            int chart) {
  if (samples.empty()) throw DomainError("first_integral_check: no samples");
  std::optional<cplx> first;
  double dev = 0.0;
  for (cplx z : samples) {
    const auto w = chart_point(f, z, 0, chart);
    std::vector<cplx> wv;
    for (const auto& j : w) wv.push_back(j.value());
    const cplx v = phi.value(z, wv);
    if (!first) first = v;
    dev = std::max(dev, std::abs(v - *first));
  }
  return dev;
}

}  // namespace vdlab
