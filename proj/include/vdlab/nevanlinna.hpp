#pragma once

// Nevanlinna functions of holomorphic curves f: C -> P^n given by a reduced
// representation F = (F_0 : ... : F_n).
//
// Normalisations used throughout:
//   * Fubini-Study form omega = dd^c log ||w||^2 with dd^c = (i / 2 pi) d dbar;
//     densities are reported against Lebesgue measure dA on C.
//   * T_f(r, O(d)) = d * int_1^r dt/t int_{|z|<t} f^* omega.
//   * ||s_D||([x]) = |Q(x)| / (c_Q ||x||^d), c_Q = sum of |coefficients of Q|,
//     so that ||s_D|| <= 1 and the proximity function is non-negative.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vdlab/expression.hpp"
#include "vdlab/growth_table.hpp"
#include "vdlab/jet.hpp"
#include "vdlab/quadrature.hpp"
#include "vdlab/zeros.hpp"

namespace vdlab {

class ProjectiveCurve {
 public:
  // Throws DomainError when every component is constant unless declared_constant.
  explicit ProjectiveCurve(std::vector<Expression> components, bool declared_constant = false);
  static ProjectiveCurve parse(std::span<const std::string> components, bool declared_constant = false);

  int dimension() const noexcept { return static_cast<int>(components_.size()) - 1; }
  const std::vector<Expression>& components() const noexcept { return components_; }
  bool is_constant() const noexcept { return constant_; }

  std::vector<Jet> jet(cplx z, int order) const;
  std::vector<cplx> values(cplx z) const;

  // Affine chart coordinates F_j / F_chart for j != chart, renumbered 1..n and
  // returned at positions 1..n with position 0 holding the constant 1.
  // Throws ChartError when |F_chart| < 1e-12.
  std::vector<Jet> chart_jet(cplx z, int order, int chart = 0) const;

  // The curve z -> f(e^z).
  ProjectiveCurve exponential_lift() const;

  std::string to_string() const;

 private:
  std::vector<Expression> components_;
  bool constant_ = false;
};

// Component-wise jets of F at z0; the order-1 coefficients are the tangent vector.
std::vector<Jet> curve_jet(std::span<const Expression> components, cplx z0, int order);

// log ||v|| without overflow.
double log_norm(std::span<const cplx> v);

class Divisor {
 public:
  // q must be a non-zero homogeneous polynomial in w_0..w_n of degree >= 1.
  Divisor(Expression q, int n);
  static Divisor parse(const std::string& q, int n);

  const Expression& polynomial() const noexcept { return q_; }
  int degree() const noexcept { return degree_; }
  int ambient() const noexcept { return n_; }
  double coefficient_norm() const noexcept { return c_q_; }

  // Q(F(z)) as an expression in z.
  Expression pullback(const ProjectiveCurve& f) const;

 private:
  Expression q_;
  int n_;
  int degree_ = 0;
  double c_q_ = 0.0;
};

struct QuadratureOptions {
  CircleOptions circle{};
  int points_per_panel = 8;
  double panel_ratio = 1.189207115002721;  // 2^(1/4)
  Exec exec = Exec::Parallel;
};

// Notes about perturbed radii and skipped nodes, in grid order.
struct RunLog {
  std::vector<std::string> entries;
  void add(std::string s) { entries.push_back(std::move(s)); }
  void append(const RunLog& other) { entries.insert(entries.end(), other.entries.begin(), other.entries.end()); }
};

// Copy of a radius grid; throws DomainError unless r_0 >= 1 and strictly increasing.
std::vector<double> checked_grid(std::span<const double> r_grid);

std::string radius_note(const char* what, double r, double used);

// Circle mean at r; when the integrand is singular at a node or the curve
// leaves the chart there, the radius moves outward by 1e-6 r (up to five
// times) and the move is logged.
double perturbed_circle_mean(const std::function<double(cplx)>& f, double r, const CircleOptions& options,
                             const char* what, RunLog& log);

// (1/pi) (||F||^2 ||F'||^2 - |<F, F'>|^2) / ||F||^4 via order-1 jets.
double fs_pullback_density(const ProjectiveCurve& f, cplx z);

// Radial profile of a density for area integrals out to the largest grid radius.
struct AreaProfile {
  std::vector<RadialNode> nodes;
  std::vector<double> means;

  // Integral over |z| < r (density against dA).
  double disk(double r) const { return disk_integral(nodes, means, r); }
  // int_1^r dt/t int_{|z|<t} density dA.
  double nested(double r) const { return log_weighted_disk_integral(nodes, means, r); }
};

AreaProfile area_profile(const std::function<double(cplx)>& density, std::span<const double> r_grid,
                         const QuadratureOptions& options = {});

GrowthTable characteristic(const ProjectiveCurve& f, int d, std::span<const double> r_grid,
                           const QuadratureOptions& options = {});

GrowthTable proximity(const ProjectiveCurve& f, const Divisor& D, std::span<const double> r_grid,
                      const QuadratureOptions& options = {}, RunLog* log = nullptr);

// Integrated counting function of a zero list: sum mu log(r / max(lower, |a|)).
double integrated_count(const ZeroList& zeros, double r, double lower = 1.0);

GrowthTable counting(const ProjectiveCurve& f, const Divisor& D, std::span<const double> r_grid,
                     RunLog* log = nullptr, ZeroList* zeros_out = nullptr);

struct FmtResult {
  GrowthTable T, m, N, residual;
};

FmtResult fmt_residual(const ProjectiveCurve& f, const Divisor& D, std::span<const double> r_grid,
                       const QuadratureOptions& options = {}, RunLog* log = nullptr);

// [mean log|g| on |z| = r - mean on |z| = s] - int_s^r n_g(t) dt/t.
double jensen_check(const Expression& g, double r, double s, const CircleOptions& options = {});

struct CalculusLemmaRow {
  double r;
  double circle_mean;   // int kappa gamma over |z| = r
  double T;             // T_kappa(r)
  double dT;            // T_kappa'(r)
  double ratio;         // log+ circle_mean / (log+ T + log+ log r)
  bool below_threshold; // T <= 1: Borel bound not applicable
  bool borel_violation; // T > 1 and T' > T log^{1+delta} T
};

struct CalculusLemmaReport {
  std::vector<CalculusLemmaRow> rows;
  double exceptional_measure = 0.0;      // linear measure of violating grid cells
  double exceptional_log_measure = 0.0;  // same, in log r
  double grid_log_measure = 0.0;
  double max_ratio = 0.0;
};

// kappa is a density against alpha = dd^c |z|^2 = (1/pi) dA.
CalculusLemmaReport calculus_lemma_diagnostic(const std::function<double(cplx)>& kappa,
                                              std::span<const double> r_grid, double delta,
                                              const QuadratureOptions& options = {});

// Log-measure of the grid cells [r_i, r_{i+1}) whose left end is flagged.
double flagged_log_measure(std::span<const double> r_grid, const std::vector<bool>& flagged);

}  // namespace vdlab
