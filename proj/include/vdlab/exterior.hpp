#pragma once

// Multi-indices, sparse graded exterior elements, wedge and interior products.
//
// Pairing convention: for increasing indices, (e*_lambda)(e_mu) = delta. The
// interior product of a top form alpha with a degree-q polyvector xi is the
// degree-(n-q) form characterised by
//
//     theta(alpha <| xi) = (theta ^ xi)(alpha)
//
// for every degree-(n-q) polyvector theta, which gives the coefficient formula
//
//     alpha <| sum_l xi_l e_l = sum_l sign(l_perp, l) xi_l alpha_{1..n} e*_{l_perp}.
//
// (xi ^ theta)(alpha) differs from the left-hand side by (-1)^{q(n-q)}.

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vdlab/errors.hpp"

namespace vdlab {

class MultiIndex {
 public:
  MultiIndex() = default;
  // Entries are 1-based, strictly increasing, each in [1, ambient].
  MultiIndex(int ambient, std::vector<int> entries) : ambient_(ambient), entries_(std::move(entries)) {
    if (ambient_ < 0) throw DomainError("MultiIndex: negative ambient dimension");
    if (static_cast<int>(entries_.size()) > ambient_) throw DomainError("MultiIndex: length exceeds ambient dimension");
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (entries_[i] < 1 || entries_[i] > ambient_) throw DomainError("MultiIndex: entry out of range");
      if (i > 0 && entries_[i] <= entries_[i - 1]) throw DomainError("MultiIndex: entries not strictly increasing");
    }
  }

  static MultiIndex full(int ambient) {
    std::vector<int> e(static_cast<std::size_t>(ambient));
    std::iota(e.begin(), e.end(), 1);
    return {ambient, std::move(e)};
  }

  int ambient() const noexcept { return ambient_; }
  int degree() const noexcept { return static_cast<int>(entries_.size()); }
  std::span<const int> entries() const noexcept { return entries_; }
  int operator[](std::size_t i) const { return entries_[i]; }
  bool contains(int j) const { return std::binary_search(entries_.begin(), entries_.end(), j); }

  std::string to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(entries_[i]);
    }
    return s + ")";
  }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex& a, const MultiIndex& b) {
    if (auto c = a.ambient_ <=> b.ambient_; c != 0) return c;
    return a.entries_ <=> b.entries_;
  }

 private:
  int ambient_ = 0;
  std::vector<int> entries_;
};

// All increasing k-subsets of {1..n}, lexicographic.
inline std::vector<MultiIndex> enumerate_multiindices(int n, int k) {
  if (k < 1 || k > n) throw DomainError("enumerate_multiindices: need 1 <= k <= n");
  std::vector<MultiIndex> out;
  std::vector<int> cur(static_cast<std::size_t>(k));
  std::iota(cur.begin(), cur.end(), 1);
  while (true) {
    out.emplace_back(n, cur);
    int i = k - 1;
    while (i >= 0 && cur[static_cast<std::size_t>(i)] == n - k + i + 1) --i;
    if (i < 0) break;
    ++cur[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

inline MultiIndex complement(const MultiIndex& lambda) {
  std::vector<int> rest;
  rest.reserve(static_cast<std::size_t>(lambda.ambient() - lambda.degree()));
  for (int j = 1; j <= lambda.ambient(); ++j)
    if (!lambda.contains(j)) rest.push_back(j);
  return {lambda.ambient(), std::move(rest)};
}

// Parity of the concatenation (mu, lambda) viewed as a permutation of {1..n}.
inline int perm_sign(const MultiIndex& mu, const MultiIndex& lambda) {
  if (mu.ambient() != lambda.ambient()) throw DomainError("perm_sign: ambient mismatch");
  const int n = mu.ambient();
  if (mu.degree() + lambda.degree() != n) throw DomainError("perm_sign: concatenation is not a permutation");
  for (int j : mu.entries())
    if (lambda.contains(j)) throw DomainError("perm_sign: concatenation is not a permutation");
  // Both parts are increasing, so inversions only occur across the split.
  long inversions = 0;
  for (int a : mu.entries())
    for (int b : lambda.entries())
      if (a > b) ++inversions;
  return inversions % 2 == 0 ? 1 : -1;
}

// Sign and sorted index of e_a ^ e_b for disjoint increasing a, b; sign 0 if
// they share an index.
inline std::pair<int, MultiIndex> merge_indices(const MultiIndex& a, const MultiIndex& b) {
  std::vector<int> merged;
  merged.reserve(static_cast<std::size_t>(a.degree() + b.degree()));
  long inversions = 0;
  std::size_t i = 0, j = 0;
  const auto ea = a.entries();
  const auto eb = b.entries();
  while (i < ea.size() || j < eb.size()) {
    if (j == eb.size() || (i < ea.size() && ea[i] < eb[j])) {
      merged.push_back(ea[i++]);
    } else if (i == ea.size() || eb[j] < ea[i]) {
      // every remaining entry of a is larger than eb[j]
      inversions += static_cast<long>(ea.size() - i);
      merged.push_back(eb[j++]);
    } else {
      return {0, MultiIndex{}};
    }
  }
  return {inversions % 2 == 0 ? 1 : -1, MultiIndex(a.ambient(), std::move(merged))};
}

// Homogeneous element of degree k in the exterior algebra over an n-dimensional
// space; absent indices are zero coefficients. Scalar needs +, binary -, unary -, *.
template <typename Scalar>
class ExteriorElement {
 public:
  using Map = std::map<MultiIndex, Scalar>;

  ExteriorElement(int ambient, int degree) : ambient_(ambient), degree_(degree) {
    if (degree < 0 || ambient < 0) throw DomainError("ExteriorElement: negative dimension");
  }

  // Basis vector e_j (degree 1).
  static ExteriorElement basis(int ambient, int j, Scalar coeff) {
    ExteriorElement e(ambient, 1);
    e.set(MultiIndex(ambient, {j}), std::move(coeff));
    return e;
  }

  static ExteriorElement from_vector(std::span<const Scalar> components) {
    const int n = static_cast<int>(components.size());
    ExteriorElement e(n, 1);
    for (int j = 0; j < n; ++j) e.set(MultiIndex(n, {j + 1}), components[static_cast<std::size_t>(j)]);
    return e;
  }

  int ambient() const noexcept { return ambient_; }
  int degree() const noexcept { return degree_; }
  const Map& coefficients() const noexcept { return coeffs_; }
  bool empty() const noexcept { return coeffs_.empty(); }

  void set(const MultiIndex& index, Scalar value) {
    if (index.ambient() != ambient_ || index.degree() != degree_)
      throw DomainError("ExteriorElement::set: index " + index.to_string() + " has wrong degree/ambient");
    coeffs_.insert_or_assign(index, std::move(value));
  }

  void add(const MultiIndex& index, const Scalar& value) {
    auto it = coeffs_.find(index);
    if (it == coeffs_.end())
      set(index, value);
    else
      it->second = it->second + value;
  }

  const Scalar* find(const MultiIndex& index) const {
    auto it = coeffs_.find(index);
    return it == coeffs_.end() ? nullptr : &it->second;
  }

  Scalar coefficient_or(const MultiIndex& index, Scalar zero) const {
    auto* p = find(index);
    return p ? *p : zero;
  }

  friend ExteriorElement operator+(ExteriorElement a, const ExteriorElement& b) {
    if (a.ambient_ != b.ambient_ || a.degree_ != b.degree_) throw DomainError("ExteriorElement +: shape mismatch");
    for (const auto& [idx, c] : b.coeffs_) a.add(idx, c);
    return a;
  }

  friend ExteriorElement operator*(const Scalar& s, ExteriorElement a) {
    for (auto& [idx, c] : a.coeffs_) c = s * c;
    return a;
  }

 private:
  int ambient_;
  int degree_;
  Map coeffs_;
};

template <typename Scalar>
ExteriorElement<Scalar> wedge(const ExteriorElement<Scalar>& xi, const ExteriorElement<Scalar>& eta) {
  if (xi.ambient() != eta.ambient()) throw DomainError("wedge: ambient mismatch");
  const int n = xi.ambient();
  ExteriorElement<Scalar> out(n, xi.degree() + eta.degree());
  if (xi.degree() + eta.degree() > n) return out;
  for (const auto& [a, ca] : xi.coefficients()) {
    for (const auto& [b, cb] : eta.coefficients()) {
      auto [sign, idx] = merge_indices(a, b);
      if (sign == 0) continue;
      Scalar term = ca * cb;
      out.add(idx, sign > 0 ? term : -term);
    }
  }
  return out;
}

template <typename Scalar>
ExteriorElement<Scalar> wedge_all(std::span<const ExteriorElement<Scalar>> factors) {
  if (factors.empty()) throw DomainError("wedge_all: no factors");
  ExteriorElement<Scalar> acc = factors[0];
  for (std::size_t i = 1; i < factors.size(); ++i) acc = wedge(acc, factors[i]);
  return acc;
}

// alpha is a top-degree form given by its single coefficient alpha_{1..n};
// xi has degree q; the result is a form of degree n - q keyed by lambda_perp.
template <typename Scalar>
ExteriorElement<Scalar> interior_product(const ExteriorElement<Scalar>& alpha, const ExteriorElement<Scalar>& xi) {
  if (alpha.ambient() != xi.ambient()) throw DomainError("interior_product: ambient mismatch");
  const int n = alpha.ambient();
  if (alpha.degree() != n) throw DomainError("interior_product: alpha must be a top form");
  if (xi.degree() > n) throw DomainError("interior_product: degree of xi exceeds ambient");
  ExteriorElement<Scalar> out(n, n - xi.degree());
  const Scalar* top = alpha.find(MultiIndex::full(n));
  if (!top) return out;
  for (const auto& [lambda, c] : xi.coefficients()) {
    const MultiIndex perp = complement(lambda);
    Scalar term = c * *top;
    out.add(perp, perm_sign(perp, lambda) > 0 ? term : -term);
  }
  return out;
}

// Contraction of a form with a polyvector of equal degree under the delta pairing.
template <typename Scalar>
Scalar pair(const ExteriorElement<Scalar>& form, const ExteriorElement<Scalar>& vec, Scalar zero) {
  if (form.ambient() != vec.ambient() || form.degree() != vec.degree()) throw DomainError("pair: shape mismatch");
  Scalar acc = zero;
  for (const auto& [idx, c] : vec.coefficients())
    if (const Scalar* f = form.find(idx)) acc = acc + (*f) * c;
  return acc;
}

}  // namespace vdlab
