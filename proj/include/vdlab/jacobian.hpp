#pragma once

// Jacobian sections of a curve f: C -> P^n against a lifted polyvector field
// phi = (t (x) X_1 ^ ... ^ X_q)_f with q = n - 1.
//
// Fields are given in one affine chart w_chart != 0 with coordinates
// w_1..w_n; the pole section t is a homogeneous polynomial in w_0..w_n of
// degree p, evaluated in the chart by setting w_chart = 1.

#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "vdlab/exterior.hpp"
#include "vdlab/nevanlinna.hpp"

namespace vdlab {

class MeromorphicVectorField {
 public:
  MeromorphicVectorField(std::vector<Expression> components, int chart = 0);
  static MeromorphicVectorField parse(std::span<const std::string> components, int chart = 0);

  int ambient() const noexcept { return static_cast<int>(components_.size()); }
  int chart() const noexcept { return chart_; }
  const std::vector<Expression>& components() const noexcept { return components_; }

  // w holds the chart coordinates at positions 1..n (position 0 is ignored).
  std::vector<Jet> eval(std::span<const Jet> w) const;
  std::vector<cplx> values(std::span<const cplx> w) const;

 private:
  std::vector<Expression> components_;
  int chart_;
};

class PoleSection {
 public:
  PoleSection(Expression t, int n);
  static PoleSection parse(const std::string& t, int n);
  static PoleSection unit(int n) { return PoleSection(Expression::constant(1.0), n); }

  int degree() const noexcept { return degree_; }
  int ambient() const noexcept { return n_; }
  double coefficient_norm() const noexcept { return c_t_; }
  const Expression& polynomial() const noexcept { return t_; }

  // t with w_chart = 1, at chart coordinates w (positions 1..n).
  Jet eval(std::span<const Jet> w, int chart) const;
  cplx value(std::span<const cplx> w, int chart) const;

 private:
  Expression t_;
  int n_;
  int degree_ = 0;
  double c_t_ = 0.0;
};

// log of the O(p) Fubini-Study norm squared of the frame w_chart^p at [F],
// normalised by the coefficient norm of t.
double log_frame_norm_sq(const PoleSection& t, std::span<const cplx> F, int chart);

// A list of fields and their common pole section.
struct FieldSpec {
  FieldSpec(std::vector<MeromorphicVectorField> fields, PoleSection t);

  std::vector<MeromorphicVectorField> fields;
  PoleSection t;

  int ambient() const { return fields.front().ambient(); }
  int chart() const { return fields.front().chart(); }
  int degree() const { return static_cast<int>(fields.size()); }
};

// For each polynomial denominator of the expressions and each coordinate,
// finds points of the polar set along a random line and throws DomainError if
// t * expr grows without bound on approach.
void probe_polar_sets(const PoleSection& t, int chart, std::span<const Expression> exprs, std::mt19937_64& rng);

// Evaluates t * X_i at `samples` pseudo-random chart points (fixed seed) and
// throws DomainError if any product is non-finite where t does not vanish,
// then probes the polar sets of the fields.
void verify_pole_clearing(const FieldSpec& spec, int samples = 1000, unsigned seed = 7);

// Chart jets of order `order` padded with the constant 1 at position 0.
std::vector<Jet> chart_point(const ProjectiveCurve& f, cplx z, int order, int chart);

// Derivatives f'_1..f'_n in the chart as jets of order `order`.
std::vector<Jet> tangent_jets(const ProjectiveCurve& f, cplx z, int order, int chart);

// t(f(z)) X_1(f(z)) ^ ... ^ X_q(f(z)) with jet coefficients of order `order`.
ExteriorElement<Jet> lift_field(const FieldSpec& spec, const ProjectiveCurve& f, cplx z, int order = 1);

// sum over lambda of sign(lambda_perp, lambda) phi_lambda f'_{lambda_perp}.
Jet jacobian_scalar(const ProjectiveCurve& f, const ExteriorElement<Jet>& phi, cplx z, int chart = 0);
Jet jacobian_scalar(const ProjectiveCurve& f, const FieldSpec& spec, cplx z, int order = 0);

// Top coefficient of (f' as a vector) ^ phi.
Jet jacobian_wedge(const ProjectiveCurve& f, const ExteriorElement<Jet>& phi, cplx z, int chart = 0);
Jet jacobian_wedge(const ProjectiveCurve& f, const FieldSpec& spec, cplx z, int order = 0);

AnalyticFn jacobian_function(const ProjectiveCurve& f, const FieldSpec& spec);
AnalyticFn jacobian_wedge_function(const ProjectiveCurve& f, const FieldSpec& spec);

struct Effectivity {
  bool effective = false;
  std::optional<cplx> witness;
  double max_abs = 0.0;
};

// Positive when |W| exceeds 1e-12 (|f'| |phi|)-relative at some sample point.
Effectivity effectivity_test(const ProjectiveCurve& f, const FieldSpec& spec, std::span<const cplx> samples);

// Among the n fields, the (n-1)-subset whose lifted wedge pairs non-trivially
// with f' at the probe. Throws DegenerateError if the fields are dependent at
// the probe or f' vanishes there.
MultiIndex find_effective_multiindex(const ProjectiveCurve& f, std::span<const MeromorphicVectorField> fields,
                                     const PoleSection& t, cplx probe);

FieldSpec select_fields(std::span<const MeromorphicVectorField> fields, const PoleSection& t,
                        const MultiIndex& lambda);

struct GRatio {
  double g = 0.0;
  double phi_norm = 0.0;
};

// In a unitary coframe: phi_frame of degree n-1, A the tangent coefficients,
// sigma_norm the norm of the E-frame.
GRatio g_ratio_frame(const ExteriorElement<cplx>& phi_frame, std::span<const cplx> A, double sigma_norm = 1.0);

// Throws DegenerateError at stationary points.
GRatio g_ratio(const ProjectiveCurve& f, const FieldSpec& spec, cplx z);

GrowthTable ramification(const ProjectiveCurve& f, const FieldSpec& spec, std::span<const double> r_grid,
                         RunLog* log = nullptr, ZeroList* zeros_out = nullptr);

struct SmtIdentity {
  GrowthTable T;         // T_f(r, O(1))
  GrowthTable N_ram;
  GrowthTable lhs;       // (1/2) mean log xi
  GrowthTable rhs;       // T(r, K) - T(r, E) + N_ram
  GrowthTable residual;
};

SmtIdentity smt_identity_residual(const ProjectiveCurve& f, const FieldSpec& spec, std::span<const double> r_grid,
                                  const QuadratureOptions& options = {}, RunLog* log = nullptr);

struct SmtInequality {
  GrowthTable T;
  GrowthTable N_ram;
  GrowthTable lhs;            // T(r, K) + N_ram - T(r, E)
  GrowthTable ratio_log;      // lhs / log T
  GrowthTable ratio_log_plus; // lhs / (log+ T + log+ log r), 0/0 read as 0
  // The exceptional set follows the Borel lemma for phi = T(r, O(1)): the
  // initial stretch where phi <= 1 together with the radii where
  // phi' > phi log^{1+delta} phi.
  std::vector<bool> below_threshold;
  std::vector<bool> borel_violation;
  std::vector<bool> exceptional;
  double bound = 0.0;  // max ratio_log off the exceptional set
  double exceptional_log_measure = 0.0;
  double below_threshold_log_measure = 0.0;
  double borel_log_measure = 0.0;
  double grid_log_measure = 0.0;
  double exceptional_fraction() const { return grid_log_measure > 0.0 ? exceptional_log_measure / grid_log_measure : 0.0; }
};

SmtInequality smt_inequality(const ProjectiveCurve& f, const FieldSpec& spec, std::span<const double> r_grid,
                             double delta, const QuadratureOptions& options = {}, RunLog* log = nullptr);

// max |Phi(f(z)) - Phi(f(z_0))| over the samples, with Phi in the chart coordinates.
double first_integral_check(const ProjectiveCurve& f, const Expression& phi, std::span<const cplx> samples,
                            int chart = 0);

}  // namespace vdlab
