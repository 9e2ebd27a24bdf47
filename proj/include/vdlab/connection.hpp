#pragma once

// Meromorphic connections D on T_X in one affine chart, given by Christoffel
// symbols Gamma^a_{bc}(w), with pole order at most E = O(p) cleared by t.
// Covariant jets along a curve:
//   f^(1) = f',  f^(j+1)_a = t(f) [ d/dz f^(j)_a + sum_{b,c} Gamma^a_{bc}(f) f'_b f^(j)_c ].

#include <array>
#include <map>
#include <string>
#include <vector>

#include "vdlab/jacobian.hpp"

namespace vdlab {

class MeromorphicConnection {
 public:
  MeromorphicConnection(int n, PoleSection t, int chart = 0);
  static MeromorphicConnection flat(int n) { return MeromorphicConnection(n, PoleSection::unit(n)); }

  // Indices are 1-based; absent symbols are zero.
  void set(int a, int b, int c, Expression gamma);
  void set(int a, int b, int c, const std::string& gamma) { set(a, b, c, Expression::parse(gamma)); }

  int ambient() const noexcept { return n_; }
  int chart() const noexcept { return chart_; }
  const PoleSection& pole_section() const noexcept { return t_; }
  const std::map<std::array<int, 3>, Expression>& symbols() const noexcept { return gamma_; }
  bool is_flat() const noexcept { return gamma_.empty(); }

  // sum_{b,c} Gamma^a_{bc}(w) u_b v_c for a = 1..n.
  std::vector<Jet> contract(std::span<const Jet> w, std::span<const Jet> u, std::span<const Jet> v) const;

 private:
  int n_;
  PoleSection t_;
  int chart_;
  std::map<std::array<int, 3>, Expression> gamma_;
};

// Throws DomainError if t * Gamma is non-finite at a pseudo-random chart point
// where t does not vanish.
void verify_pole_clearing(const MeromorphicConnection& D, int samples = 1000, unsigned seed = 11);

// f^(1)..f^(k) as jets of order `order` at z.
std::vector<std::vector<Jet>> covariant_jet_series(const ProjectiveCurve& f, const MeromorphicConnection& D, int k,
                                                   cplx z, int order = 0);
std::vector<std::vector<cplx>> covariant_jets(const ProjectiveCurve& f, const MeromorphicConnection& D, int k, cplx z);

// det of the matrix with rows f^(1)..f^(n), as a jet of order `order`.
Jet wronskian_jet(const ProjectiveCurve& f, const MeromorphicConnection& D, cplx z, int order = 0);
cplx autoparallel_wronskian(const ProjectiveCurve& f, const MeromorphicConnection& D, cplx z);
AnalyticFn wronskian_function(const ProjectiveCurve& f, const MeromorphicConnection& D);

struct MembershipReport {
  std::vector<cplx> z;
  std::vector<double> value;  // |t(f(z))| in the chart
  bool contained = false;     // every value below 1e-12
  std::string text() const;   // lines "z, |t(f(z))|"
};

MembershipReport pole_membership(const ProjectiveCurve& f, const PoleSection& t, std::span<const cplx> samples,
                                 int chart = 0);

// Fixed sample set: 8 points on each of |z| = 1 and |z| = 2.
std::vector<cplx> membership_samples();

struct SiuResidual {
  GrowthTable T;
  GrowthTable N_ram;
  GrowthTable lhs;        // T(r, O(-n-1)) + N_ram - n(n-1)/2 T(r, O(p))
  GrowthTable ratio_log;  // lhs / log T(r, O(1)), NaN where T <= 1
  double bound = 0.0;     // max ratio_log where T > 1
  MembershipReport membership;
};

// Throws DegenerateError when the curve is autoparallel (Wronskian vanishes at
// every sample point).
SiuResidual siu_smt_residual(const ProjectiveCurve& f, const MeromorphicConnection& D, std::span<const double> r_grid,
                             const QuadratureOptions& options = {}, RunLog* log = nullptr);

}  // namespace vdlab
