#pragma once

// Truncated complex Taylor series c_0 + c_1 (z - z0) + ... + c_K (z - z0)^K.
// Arithmetic is closed at the smaller order of the operands.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>

#include "vdlab/errors.hpp"

namespace vdlab {

using cplx = std::complex<double>;

inline constexpr int kMaxJetOrder = 15;
// Moduli below this are treated as exact zeros by division and log.
inline constexpr double kSingularTolerance = 1e-300;

class Jet {
 public:
  Jet() = default;
  // Constant jet.
  Jet(cplx value, int order) : order_(checked(order)) { c_[0] = value; }

  // The identity function expanded at z0.
  static Jet variable(cplx z0, int order) {
    Jet j(z0, order);
    if (order >= 1) j.c_[1] = 1.0;
    return j;
  }

  static Jet from_coefficients(std::span<const cplx> coeffs) {
    Jet j(0.0, static_cast<int>(coeffs.size()) - 1);
    for (std::size_t k = 0; k < coeffs.size(); ++k) j.c_[k] = coeffs[k];
    return j;
  }

  int order() const noexcept { return order_; }
  cplx value() const noexcept { return c_[0]; }
  cplx operator[](int k) const noexcept { return c_[static_cast<std::size_t>(k)]; }
  cplx& operator[](int k) noexcept { return c_[static_cast<std::size_t>(k)]; }
  std::span<const cplx> coefficients() const noexcept { return {c_.data(), static_cast<std::size_t>(order_ + 1)}; }

  // k-th derivative at the base point: k! c_k.
  cplx derivative_value(int k) const {
    if (k > order_) throw DomainError("Jet::derivative_value: order exceeded");
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f * c_[static_cast<std::size_t>(k)];
  }

  // Jet of the derivative; loses one order.
  Jet derivative() const {
    if (order_ == 0) throw DomainError("Jet::derivative: order-0 jet has no derivative");
    Jet d(0.0, order_ - 1);
    for (int k = 0; k < order_; ++k) d.c_[k] = static_cast<double>(k + 1) * c_[k + 1];
    return d;
  }

  Jet truncated(int order) const {
    Jet t = *this;
    t.order_ = std::min(order_, checked(order));
    for (int k = t.order_ + 1; k <= kMaxJetOrder; ++k) t.c_[k] = 0.0;
    return t;
  }

  Jet operator-() const {
    Jet r = *this;
    for (int k = 0; k <= order_; ++k) r.c_[k] = -r.c_[k];
    return r;
  }

  friend Jet operator+(const Jet& a, const Jet& b) {
    Jet r(0.0, std::min(a.order_, b.order_));
    for (int k = 0; k <= r.order_; ++k) r.c_[k] = a.c_[k] + b.c_[k];
    return r;
  }
  friend Jet operator-(const Jet& a, const Jet& b) {
    Jet r(0.0, std::min(a.order_, b.order_));
    for (int k = 0; k <= r.order_; ++k) r.c_[k] = a.c_[k] - b.c_[k];
    return r;
  }
  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r(0.0, std::min(a.order_, b.order_));
    for (int k = 0; k <= r.order_; ++k) {
      cplx s = 0.0;
      for (int j = 0; j <= k; ++j) s += a.c_[j] * b.c_[k - j];
      r.c_[k] = s;
    }
    return r;
  }
  friend Jet operator*(cplx s, const Jet& a) {
    Jet r = a;
    for (int k = 0; k <= r.order_; ++k) r.c_[k] *= s;
    return r;
  }
  friend Jet operator/(const Jet& a, const Jet& b) {
    if (std::abs(b.c_[0]) < kSingularTolerance) throw SingularPointError("division by a vanishing jet", "");
    Jet r(0.0, std::min(a.order_, b.order_));
    const cplx inv = 1.0 / b.c_[0];
    for (int k = 0; k <= r.order_; ++k) {
      cplx s = a.c_[k];
      for (int j = 1; j <= k; ++j) s -= b.c_[j] * r.c_[k - j];
      r.c_[k] = s * inv;
    }
    return r;
  }

  Jet& operator+=(const Jet& b) { return *this = *this + b; }
  Jet& operator-=(const Jet& b) { return *this = *this - b; }
  Jet& operator*=(const Jet& b) { return *this = *this * b; }

 private:
  static int checked(int order) {
    if (order < 0 || order > kMaxJetOrder) throw DomainError("Jet: order out of range");
    return order;
  }

  std::array<cplx, kMaxJetOrder + 1> c_{};
  int order_ = 0;
};

inline Jet exp(const Jet& a) {
  // e' = a' e  =>  k e_k = sum_{j=1}^k j a_j e_{k-j}
  Jet r(std::exp(a[0]), a.order());
  for (int k = 1; k <= a.order(); ++k) {
    cplx s = 0.0;
    for (int j = 1; j <= k; ++j) s += static_cast<double>(j) * a[j] * r[k - j];
    r[k] = s / static_cast<double>(k);
  }
  return r;
}

// Principal branch.
inline Jet log(const Jet& a) {
  if (std::abs(a[0]) < kSingularTolerance) throw SingularPointError("log of a vanishing jet", "");
  // a l' = a'  =>  k l_k a_0 = k a_k - sum_{j=1}^{k-1} j l_j a_{k-j}
  Jet r(std::log(a[0]), a.order());
  for (int k = 1; k <= a.order(); ++k) {
    cplx s = static_cast<double>(k) * a[k];
    for (int j = 1; j < k; ++j) s -= static_cast<double>(j) * r[j] * a[k - j];
    r[k] = s / (static_cast<double>(k) * a[0]);
  }
  return r;
}

inline Jet pow(const Jet& a, int n) {
  if (n < 0) return Jet(1.0, a.order()) / pow(a, -n);
  Jet result(1.0, a.order());
  Jet base = a;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n) base = base * base;
  }
  return result;
}

// Taylor jet of g(h(z)) from the jet of h at z0 and the jet of g at h(z0).
inline Jet compose(const Jet& outer, const Jet& inner) {
  const int order = std::min(outer.order(), inner.order());
  Jet shifted = inner.truncated(order);
  shifted[0] = 0.0;
  // Horner in the nilpotent shifted series.
  Jet acc(outer[order], order);
  for (int k = order - 1; k >= 0; --k) acc = acc * shifted + Jet(outer[k], order);
  return acc;
}

}  // namespace vdlab
