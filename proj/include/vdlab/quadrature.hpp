#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "vdlab/parallel.hpp"

namespace vdlab {

using cplx = std::complex<double>;

struct CircleOptions {
  // Successive trapezoid estimates must agree to tolerance * max(1, |estimate|).
  double tolerance = 1e-8;
  int max_level = 16;
  int min_level = 5;
  // The starting level is raised until node spacing along the circle is at
  // most this arc length.
  double arc_spacing = 1.0;
};

struct CircleResult {
  double mean = 0.0;  // integral of f d(theta)/(2 pi)
  int nodes = 0;
};

// Composite trapezoid on 2^j uniform nodes, doubling until converged.
// Throws AccuracyError with the last estimate if level max_level is reached.
CircleResult circle_mean(const std::function<double(cplx)>& f, cplx center, double radius,
                         const CircleOptions& options = {}, Exec exec = Exec::Serial);

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

const GaussRule& gauss_legendre(int n);

struct RadialNode {
  double rho;
  double weight;
};

// Gauss-Legendre nodes on [0, breakpoints.back()] with panels split at every
// breakpoint. Below 1 panels are at most `inner_panel` long; above 1 the panel
// end/start ratio is at most `panel_ratio`.
std::vector<RadialNode> radial_nodes(std::span<const double> breakpoints, int points_per_panel = 8,
                                     double inner_panel = 0.5, double panel_ratio = 1.189207115002721);

// Circle means of `f` at every radial node: the data-parallel kernel behind
// all area integrals. Each circle is integrated serially; radii run under `exec`.
std::vector<double> radial_profile(const std::function<double(cplx)>& f, std::span<const RadialNode> nodes,
                                   const CircleOptions& options = {}, Exec exec = Exec::Serial);

// Integral of f over |z| < r for a radial profile: sum of weight * 2 pi rho * mean.
double disk_integral(std::span<const RadialNode> nodes, std::span<const double> means, double r);

// Integral over 1 < t < r of dt/t times the disk integral over |z| < t,
// i.e. the disk integral weighted by log(r / max(1, |z|)).
double log_weighted_disk_integral(std::span<const RadialNode> nodes, std::span<const double> means, double r);

}  // namespace vdlab
