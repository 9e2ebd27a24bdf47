#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance binary.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

// Parity of a permutation of 1..n from its cycle decomposition.
inline int parity_by_cycles(const std::vector<int>& perm) {
  const std::size_t n = perm.size();
  std::vector<bool> seen(n, false);
  int transpositions = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (seen[i]) continue;
    int len = 0;
    for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(perm[j] - 1)) {
      seen[j] = true;
      ++len;
    }
    transpositions += len - 1;
  }
  return transpositions % 2 == 0 ? 1 : -1;
}

// Sign of sorting v by adjacent swaps; 0 when an entry repeats.
inline int bubble_sign(std::vector<int> v) {
  int swaps = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j + 1 < v.size() - i; ++j)
      if (v[j] > v[j + 1]) {
        std::swap(v[j], v[j + 1]);
        ++swaps;
      }
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] == v[i - 1]) return 0;
  return swaps % 2 == 0 ? 1 : -1;
}

// Increasing k-subsets of 1..n from bitmasks, sorted lexicographically.
inline std::vector<std::vector<int>> subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  for (unsigned m = 0; m < (1u << n); ++m) {
    if (std::popcount(m) != k) continue;
    std::vector<int> s;
    for (int j = 0; j < n; ++j)
      if (m & (1u << j)) s.push_back(j + 1);
    out.push_back(s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<int> set_difference(int n, const std::vector<int>& lam) {
  std::vector<int> all(static_cast<std::size_t>(n)), diff;
  for (int j = 0; j < n; ++j) all[static_cast<std::size_t>(j)] = j + 1;
  std::set_difference(all.begin(), all.end(), lam.begin(), lam.end(), std::back_inserter(diff));
  return diff;
}

// k-th derivative from an N-point difference stencil on a circle of radius h,
// Richardson-extrapolated between h and h/2 (stencil error is O(h^N)).
inline cplx stencil_derivative(const std::function<cplx(cplx)>& f, cplx z0, int k, double h = 0.4) {
  constexpr int N = 24;
  auto at = [&](double step) {
    cplx s = 0.0;
    for (int j = 0; j < N; ++j) {
      const cplx w = std::polar(1.0, 2.0 * std::numbers::pi * j / N);
      s += f(z0 + step * w) * std::pow(w, -k);
    }
    return std::tgamma(k + 1.0) * s / (N * std::pow(step, k));
  };
  const double g = std::pow(2.0, N);
  return (g * at(h / 2) - at(h)) / (g - 1.0);
}

inline double relative_error(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// Fixed jet battery: expression text and base point.
struct BatteryCase {
  const char* text;
  cplx z0;
};

inline const std::vector<BatteryCase>& jet_battery() {
  static const std::vector<BatteryCase> b{
      {"exp(z)*z", {0.7, 0.1}},          {"z^5 - 3*z^2 + 1", {0.3, -0.4}},   {"exp(z^2)/(1 + z)", {0.2, 0.3}},
      {"log(2 + z)*exp(-z)", {0.5, 0.5}}, {"(z - 1)^3/(z + 2)^2", {-0.4, 1}}, {"exp(exp(z)/3)", {0.1, -0.2}},
      {"1/(1 - z + z^2)", {0.1, 0.1}},   {"log(z)", {1.5, -0.5}},
  };
  return b;
}

// T(r, O(1)) = mean log ||F|| on |z| = r minus the same mean on |z| = 1, for a
// reduced representation; trapezoid on `nodes` points.
template <typename Values>
double cartan_T(const Values& values, double r, int nodes = 8192) {
  auto mean = [&](double rho) {
    double s = 0.0;
    for (int j = 0; j < nodes; ++j) {
      const auto v = values(std::polar(rho, 2 * std::numbers::pi * j / nodes));
      double big = 0.0;
      for (cplx c : v) big = std::max(big, std::abs(c));
      double acc = 0.0;
      for (cplx c : v) acc += std::norm(c / big);
      s += std::log(big) + 0.5 * std::log(acc);
    }
    return s / nodes;
  };
  return mean(r) - mean(1.0);
}

}  // namespace oracle
