#include "vdlab/zeros.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "vdlab/errors.hpp"

namespace vdlab {

namespace {

constexpr double kPi = std::numbers::pi;

// --- polynomials -------------------------------------------------------------

cplx horner(std::span<const cplx> c, cplx z) {
  cplx acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * z + c[k];
  return acc;
}

std::vector<cplx> derivative(std::span<const cplx> c) {
  std::vector<cplx> d;
  for (std::size_t k = 1; k < c.size(); ++k) d.push_back(static_cast<double>(k) * c[k]);
  return d;
}

std::vector<cplx> aberth(std::span<const cplx> c) {
  const std::size_t d = c.size() - 1;
  std::vector<cplx> dc = derivative(c);
  // Initial guesses on a circle sized by the Fujiwara-type bound.
  double radius = 0.0;
  for (std::size_t k = 0; k < d; ++k)
    radius = std::max(radius, std::pow(std::abs(c[k] / c[d]), 1.0 / static_cast<double>(d - k)));
  radius = std::max(radius, 1e-3);
  std::vector<cplx> z(d);
  for (std::size_t k = 0; k < d; ++k) z[k] = std::polar(radius, 2.0 * kPi * static_cast<double>(k) / d + 0.4);

  for (int iter = 0; iter < 2000; ++iter) {
    double worst = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const cplx p = horner(c, z[i]);
      if (p == cplx(0.0)) continue;
      const cplx ratio = p / horner(dc, z[i]);
      cplx repulsion = 0.0;
      for (std::size_t j = 0; j < d; ++j)
        if (j != i) repulsion += 1.0 / (z[i] - z[j]);
      const cplx step = ratio / (1.0 - ratio * repulsion);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) continue;
      z[i] -= step;
      worst = std::max(worst, std::abs(step) / std::max(1.0, std::abs(z[i])));
    }
    if (worst < 1e-15) break;
  }
  return z;
}

// Newton on the (k-1)-th derivative of a polynomial.
cplx polish(std::span<const cplx> c, cplx z, int k) {
  std::vector<cplx> h(c.begin(), c.end());
  for (int j = 1; j < k; ++j) h = derivative(h);
  const std::vector<cplx> dh = derivative(h);
  if (dh.empty()) return z;
  for (int iter = 0; iter < 50; ++iter) {
    const cplx den = horner(dh, z);
    if (den == cplx(0.0)) break;
    const cplx step = horner(h, z) / den;
    z -= step;
    if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(z))) break;
  }
  return z;
}

// --- argument tracking -------------------------------------------------------

struct Sample {
  cplx z;
  cplx g;
  cplx dg;
};

Sample sample(const AnalyticFn& g, cplx z) {
  const Jet j = g(z, 1);
  return {z, j[0], j[1]};
}

bool locally_linear(const Sample& s, double h) { return h * std::abs(s.dg) <= 0.25 * std::abs(s.g); }

// Accumulated change of arg g along a parametrised path between parameters
// a and b (the path maps parameter to point).
double track(const AnalyticFn& g, const std::function<cplx(double)>& path, double a, const Sample& sa, double b,
             const Sample& sb, int depth) {
  if (std::abs(sa.g) == 0.0 || std::abs(sb.g) == 0.0)
    throw BoundaryZeroError("analytic function vanishes on the integration contour");
  const double h = std::abs(sb.z - sa.z);
  const double delta = std::arg(sb.g / sa.g);
  if (std::abs(delta) < kPi / 4 && locally_linear(sa, h) && locally_linear(sb, h)) return delta;
  if (depth > 60 || h <= 1e-15 * std::max(1.0, std::abs(sa.z)))
    throw BoundaryZeroError("argument tracking failed: zero on or extremely near the contour");
  const double m = 0.5 * (a + b);
  const Sample sm = sample(g, path(m));
  return track(g, path, a, sa, m, sm, depth + 1) + track(g, path, m, sm, b, sb, depth + 1);
}

int winding_along(const AnalyticFn& g, const std::function<cplx(double)>& path, int pieces) {
  double total = 0.0;
  Sample prev = sample(g, path(0.0));
  const Sample first = prev;
  for (int k = 1; k <= pieces; ++k) {
    const double s = static_cast<double>(k) / pieces;
    const Sample next = k == pieces ? first : sample(g, path(s));
    total += track(g, path, s - 1.0 / pieces, prev, s, next, 0);
    prev = next;
  }
  const double w = total / (2.0 * kPi);
  const double r = std::round(w);
  if (std::abs(w - r) > 1e-6) throw AccuracyError("winding number is not an integer", w);
  return static_cast<int>(r);
}

struct Box {
  double x0, x1, y0, y1;
  double half() const { return 0.5 * std::max(x1 - x0, y1 - y0); }
  cplx center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
  bool contains(cplx z) const { return z.real() >= x0 && z.real() <= x1 && z.imag() >= y0 && z.imag() <= y1; }
};

int winding_box(const AnalyticFn& g, const Box& b) {
  // Counter-clockwise perimeter parametrised on [0, 1].
  const double w = b.x1 - b.x0, h = b.y1 - b.y0;
  auto path = [b, w, h](double s) -> cplx {
    const double u = 4.0 * s;
    if (u < 1.0) return {b.x0 + w * u, b.y0};
    if (u < 2.0) return {b.x1, b.y0 + h * (u - 1.0)};
    if (u < 3.0) return {b.x1 - w * (u - 2.0), b.y1};
    return {b.x0, b.y1 - h * (u - 3.0)};
  };
  return winding_along(g, path, 64);
}

// Newton on g^{(k-1)} from z0; nullopt if it leaves the box or stalls.
std::optional<cplx> newton(const AnalyticFn& g, cplx z0, int k, const Box& box) {
  cplx z = z0;
  for (int iter = 0; iter < 60; ++iter) {
    const Jet j = g(z, k);
    const cplx den = j.derivative_value(k);
    const cplx num = j.derivative_value(k - 1);
    if (num == cplx(0.0)) return z;
    if (den == cplx(0.0)) return std::nullopt;
    const cplx step = num / den;
    z -= step;
    if (!box.contains(z)) return std::nullopt;
    if (std::abs(step) <= 4e-16 * std::max(1.0, std::abs(z))) return z;
  }
  return z;
}

constexpr double kSplits[] = {0.5137, 0.4711, 0.5523, 0.4389, 0.5871};

void subdivide(const AnalyticFn& g, const Box& box, int count, double cluster_half, ZeroList& out) {
  if (count == 0) return;
  if (count == 1) {
    if (auto z = newton(g, box.center(), 1, box)) {
      out.push_back({*z, 1});
      return;
    }
  }
  if (box.half() < cluster_half) {
    auto z = newton(g, box.center(), count, box);
    out.push_back({z.value_or(box.center()), count});
    return;
  }
  for (double f : kSplits) {
    const double xm = box.x0 + f * (box.x1 - box.x0);
    const double ym = box.y0 + f * (box.y1 - box.y0);
    const Box kids[4] = {{box.x0, xm, box.y0, ym}, {xm, box.x1, box.y0, ym}, {box.x0, xm, ym, box.y1},
                         {xm, box.x1, ym, box.y1}};
    int counts[4];
    try {
      for (int i = 0; i < 4; ++i) counts[i] = winding_box(g, kids[i]);
    } catch (const BoundaryZeroError&) {
      continue;  // a zero sits on a split line; move the split
    }
    if (counts[0] + counts[1] + counts[2] + counts[3] != count) continue;
    for (int i = 0; i < 4; ++i) subdivide(g, kids[i], counts[i], cluster_half, out);
    return;
  }
  throw AccuracyError("box subdivision could not separate zeros", static_cast<double>(count));
}

void check_boundary(const ZeroList& zeros, double t, double tol) {
  for (const Zero& z : zeros)
    if (std::abs(std::abs(z.location) - t) <= tol * std::max(1.0, t))
      throw BoundaryZeroError("zero at distance " + std::to_string(std::abs(z.location)) +
                              " lies on the counting circle |z| = " + std::to_string(t));
}

ZeroList inside(const ZeroList& zeros, double t) {
  ZeroList r;
  for (const Zero& z : zeros)
    if (std::abs(z.location) < t) r.push_back(z);
  std::sort(r.begin(), r.end(), [](const Zero& a, const Zero& b) {
    if (a.location.real() != b.location.real()) return a.location.real() < b.location.real();
    return a.location.imag() < b.location.imag();
  });
  return r;
}

}  // namespace

AnalyticFn analytic(const Expression& g) {
  return [g](cplx z, int order) { return g.eval(Jet::variable(z, order)); };
}

int total_multiplicity(const ZeroList& zeros) {
  return std::accumulate(zeros.begin(), zeros.end(), 0, [](int s, const Zero& z) { return s + z.multiplicity; });
}

ZeroList polynomial_roots(std::span<const cplx> coeffs) {
  std::vector<cplx> c(coeffs.begin(), coeffs.end());
  while (!c.empty() && c.back() == cplx(0.0)) c.pop_back();
  if (c.empty()) throw DomainError("polynomial_roots: zero polynomial");
  ZeroList out;
  // Exact roots at the origin.
  std::size_t origin = 0;
  while (origin < c.size() && c[origin] == cplx(0.0)) ++origin;
  if (origin > 0) {
    out.push_back({0.0, static_cast<int>(origin)});
    c.erase(c.begin(), c.begin() + static_cast<long>(origin));
  }
  if (c.size() <= 1) return out;

  const std::vector<cplx> raw = aberth(c);
  // Double-precision Aberth splits a k-fold root by about eps^(1/k), so
  // clusters are formed at a coarse tolerance and their centres polished.
  std::vector<int> label(raw.size(), -1);
  int clusters = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (label[i] >= 0) continue;
    label[i] = clusters;
    std::vector<std::size_t> stack{i};
    while (!stack.empty()) {
      const std::size_t a = stack.back();
      stack.pop_back();
      for (std::size_t b = 0; b < raw.size(); ++b)
        if (label[b] < 0 && std::abs(raw[a] - raw[b]) <= 1e-5 * std::max(1.0, std::abs(raw[a]))) {
          label[b] = clusters;
          stack.push_back(b);
        }
    }
    ++clusters;
  }
  for (int k = 0; k < clusters; ++k) {
    cplx sum = 0.0;
    int m = 0;
    for (std::size_t i = 0; i < raw.size(); ++i)
      if (label[i] == k) {
        sum += raw[i];
        ++m;
      }
    out.push_back({polish(c, sum / static_cast<double>(m), m), m});
  }
  return out;
}

int winding_number(const AnalyticFn& g, cplx center, double radius) {
  const int pieces = std::max(64, static_cast<int>(std::ceil(8.0 * radius)));
  return winding_along(
      g, [center, radius](double s) { return center + std::polar(radius, 2.0 * kPi * s); }, pieces);
}

ZeroList count_zeros(const AnalyticFn& g, double t, const ZeroOptions& options) {
  if (!(t > 0.0)) throw DomainError("count_zeros: radius must be positive");
  const int expected = winding_number(g, 0.0, t);
  if (expected < 0) throw DomainError("count_zeros: negative winding number (function has poles in the disk)");
  ZeroList found;
  if (expected > 0) {
    const double half = t * (1.0 + 1e-3);
    const Box root{-half, half, -half, half};
    const int in_box = winding_box(g, root);
    subdivide(g, root, in_box, options.cluster_size * std::max(1.0, t), found);
  }
  check_boundary(found, t, options.boundary_tolerance);
  ZeroList result = inside(found, t);
  if (total_multiplicity(result) != expected)
    throw AccuracyError("zero count disagrees with the winding number on |z| = t",
                        static_cast<double>(total_multiplicity(result)));
  return result;
}

ZeroList count_zeros(const Expression& g, double t, const ZeroOptions& options) {
  if (!(t > 0.0)) throw DomainError("count_zeros: radius must be positive");
  if (auto coeffs = g.as_polynomial_in_z()) {
    if (std::all_of(coeffs->begin(), coeffs->end(), [](cplx c) { return c == cplx(0.0); }))
      throw DomainError("count_zeros: function is identically zero");
    const ZeroList all = polynomial_roots(*coeffs);
    check_boundary(all, t, options.boundary_tolerance);
    ZeroList result = inside(all, t);
    const int expected = winding_number(analytic(g), 0.0, t);
    if (total_multiplicity(result) != expected)
      throw AccuracyError("polynomial root count disagrees with the winding number on |z| = t",
                          static_cast<double>(total_multiplicity(result)));
    return result;
  }
  return count_zeros(analytic(g), t, options);
}

}  // namespace vdlab
