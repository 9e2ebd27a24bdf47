#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "vdlab/expression.hpp"
#include "vdlab/jet.hpp"

namespace vdlab {

struct Zero {
  cplx location;
  int multiplicity = 1;
};

using ZeroList = std::vector<Zero>;

// Taylor jet of an analytic function at z of the requested order.
using AnalyticFn = std::function<Jet(cplx z, int order)>;

AnalyticFn analytic(const Expression& g);

int total_multiplicity(const ZeroList& zeros);

// Roots of c_0 + c_1 z + ... + c_d z^d with multiplicities (Aberth-Ehrlich,
// clustered, cluster centres polished by Newton on the (k-1)-th derivative).
ZeroList polynomial_roots(std::span<const cplx> coeffs);

// Winding number of g around |z - center| = radius via adaptive argument
// tracking. Throws BoundaryZeroError if g vanishes on the circle.
int winding_number(const AnalyticFn& g, cplx center, double radius);

struct ZeroOptions {
  // Roots whose moduli are within this relative distance of t are boundary zeros.
  double boundary_tolerance = 1e-9;
  // Boxes below this half-width (relative to max(1, t)) with winding k > 1
  // are resolved as a single zero of multiplicity k.
  double cluster_size = 1e-7;
};

// All zeros in |z| < t by recursive box subdivision with argument-principle
// counts, then Newton refinement.
ZeroList count_zeros(const AnalyticFn& g, double t, const ZeroOptions& options = {});

// Dispatches to polynomial_roots when g is a polynomial in z.
ZeroList count_zeros(const Expression& g, double t, const ZeroOptions& options = {});

}  // namespace vdlab
