#include "vdlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "vdlab/errors.hpp"

namespace vdlab {

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

CircleResult circle_mean(const std::function<double(cplx)>& f, cplx center, double radius,
                         const CircleOptions& options, Exec exec) {
  const double two_pi = 2.0 * std::numbers::pi;
  int level = options.min_level;
  while (level < options.max_level && two_pi * radius / std::ldexp(1.0, level) > options.arc_spacing) ++level;

  auto sample = [&](std::size_t count, std::size_t stride, std::size_t offset, std::size_t total) {
    std::vector<double> v(count);
    for_each_index(count, exec, [&](std::size_t k) {
      const double theta = two_pi * static_cast<double>(offset + k * stride) / static_cast<double>(total);
      const double y = f(center + std::polar(radius, theta));
      if (!std::isfinite(y)) throw SingularPointError("non-finite integrand on circle", "");
      v[k] = y;
    });
    double s = 0.0;
    for (double y : v) s += y;
    return s;
  };

  std::size_t n = std::size_t{1} << level;
  double sum = sample(n, 1, 0, n);
  double estimate = sum / static_cast<double>(n);
  while (level < options.max_level) {
    // new nodes are the odd nodes of the doubled grid
    sum += sample(n, 2, 1, 2 * n);
    n *= 2;
    ++level;
    const double next = sum / static_cast<double>(n);
    const bool converged = std::abs(next - estimate) <= options.tolerance * std::max(1.0, std::abs(next));
    estimate = next;
    if (converged) return {estimate, static_cast<int>(n)};
  }
  throw AccuracyError("circle quadrature did not converge at radius " + std::to_string(radius), estimate);
}

const GaussRule& gauss_legendre(int n) {
  static std::mutex guard;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(guard);
  if (auto it = cache.find(n); it != cache.end()) return it->second;
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

std::vector<RadialNode> radial_nodes(std::span<const double> breakpoints, int points_per_panel, double inner_panel,
                                     double panel_ratio) {
  std::vector<double> cuts{0.0, 1.0};
  for (double b : breakpoints)
    if (b > 0.0) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<double> edges{0.0};
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    const double a = cuts[i - 1], b = cuts[i];
    int pieces = 1;
    if (b <= 1.0)
      pieces = std::max(1, static_cast<int>(std::ceil((b - a) / inner_panel - 1e-12)));
    else
      pieces = std::max(1, static_cast<int>(std::ceil(std::log(b / a) / std::log(panel_ratio) - 1e-12)));
    for (int k = 1; k < pieces; ++k) {
      const double t = static_cast<double>(k) / pieces;
      edges.push_back(b <= 1.0 ? a + (b - a) * t : a * std::pow(b / a, t));
    }
    edges.push_back(b);
  }

  const GaussRule& rule = gauss_legendre(points_per_panel);
  std::vector<RadialNode> out;
  out.reserve((edges.size() - 1) * static_cast<std::size_t>(points_per_panel));
  for (std::size_t i = 1; i < edges.size(); ++i) {
    const double a = edges[i - 1], b = edges[i];
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) out.push_back({mid + half * rule.nodes[k], half * rule.weights[k]});
  }
  return out;
}

std::vector<double> radial_profile(const std::function<double(cplx)>& f, std::span<const RadialNode> nodes,
                                   const CircleOptions& options, Exec exec) {
  return map_indices<double>(nodes.size(), exec,
                             [&](std::size_t i) { return circle_mean(f, 0.0, nodes[i].rho, options).mean; });
}

double disk_integral(std::span<const RadialNode> nodes, std::span<const double> means, double r) {
  const double two_pi = 2.0 * std::numbers::pi;
  double s = 0.0;
  for (std::size_t i = 0; i < nodes.size() && nodes[i].rho < r; ++i) s += nodes[i].weight * two_pi * nodes[i].rho * means[i];
  return s;
}

double log_weighted_disk_integral(std::span<const RadialNode> nodes, std::span<const double> means, double r) {
  const double two_pi = 2.0 * std::numbers::pi;
  double s = 0.0;
  for (std::size_t i = 0; i < nodes.size() && nodes[i].rho < r; ++i)
    s += nodes[i].weight * two_pi * nodes[i].rho * means[i] * std::log(r / std::max(1.0, nodes[i].rho));
  return s;
}

}  // namespace vdlab
