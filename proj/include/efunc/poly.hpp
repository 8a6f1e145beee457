#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <tuple>
#include <type_traits>
#include <utility>
#include <vector>

#include "efunc/bigfloat.hpp"
#include "efunc/error.hpp"
#include "efunc/linalg.hpp"

namespace efunc {

namespace detail {
// Namespace-scope wrapper so the class below can reach the ADL overloads
// despite its own is_zero() member.
template <class T>
bool elem_is_zero(const T& x) {
  return is_zero(x);
}
}  // namespace detail

/// Dense univariate polynomial, coefficients low degree first. The stored
/// zero prototype lets the zero polynomial still know its coefficient ring.
template <class T>
class DensePoly {
 public:
  DensePoly() requires std::is_default_constructible_v<T> : zero_() {}
  explicit DensePoly(T zero) : zero_(std::move(zero)) {}
  DensePoly(std::vector<T> coeffs, T zero) : c_(std::move(coeffs)), zero_(std::move(zero)) { trim(); }

  static DensePoly constant(const T& c) { return DensePoly(std::vector<T>{c}, zero_like(c)); }
  static DensePoly monomial(const T& c, std::size_t k) {
    std::vector<T> v(k + 1, zero_like(c));
    v[k] = c;
    return DensePoly(std::move(v), zero_like(c));
  }
  /// z - a
  static DensePoly linear_root(const T& a) {
    return DensePoly(std::vector<T>{zero_like(a) - a, one_like(a)}, zero_like(a));
  }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  std::size_t size() const { return c_.size(); }
  const T& zero() const { return zero_; }
  T one() const { return one_like(zero_); }
  const T& coeff(std::size_t i) const { return i < c_.size() ? c_[i] : zero_; }
  const T& operator[](std::size_t i) const { return coeff(i); }
  const T& leading() const { return c_.empty() ? zero_ : c_.back(); }
  const std::vector<T>& coeffs() const { return c_; }
  bool is_constant() const { return c_.size() <= 1; }
  bool is_one() const { return c_.size() == 1 && is_zero_elem(c_[0] - one()); }

  void set_coeff(std::size_t i, const T& v) {
    if (i >= c_.size()) c_.resize(i + 1, zero_);
    c_[i] = v;
    trim();
  }

  friend DensePoly operator+(const DensePoly& a, const DensePoly& b) {
    DensePoly out(a.zero_);
    out.c_.resize(std::max(a.c_.size(), b.c_.size()), a.zero_);
    for (std::size_t i = 0; i < out.c_.size(); ++i) out.c_[i] = a.coeff(i) + b.coeff(i);
    out.trim();
    return out;
  }
  friend DensePoly operator-(const DensePoly& a, const DensePoly& b) {
    DensePoly out(a.zero_);
    out.c_.resize(std::max(a.c_.size(), b.c_.size()), a.zero_);
    for (std::size_t i = 0; i < out.c_.size(); ++i) out.c_[i] = a.coeff(i) - b.coeff(i);
    out.trim();
    return out;
  }
  DensePoly operator-() const {
    DensePoly out(zero_);
    out.c_.reserve(c_.size());
    for (const auto& x : c_) out.c_.push_back(zero_ - x);
    return out;
  }
  friend DensePoly operator*(const DensePoly& a, const DensePoly& b) {
    DensePoly out(a.zero_);
    if (a.is_zero() || b.is_zero()) return out;
    out.c_.assign(a.c_.size() + b.c_.size() - 1, a.zero_);
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (is_zero_elem(a.c_[i])) continue;
      for (std::size_t j = 0; j < b.c_.size(); ++j) out.c_[i + j] = out.c_[i + j] + a.c_[i] * b.c_[j];
    }
    out.trim();
    return out;
  }
  friend DensePoly operator*(const DensePoly& a, const T& s) {
    DensePoly out(a.zero_);
    out.c_.reserve(a.c_.size());
    for (const auto& x : a.c_) out.c_.push_back(x * s);
    out.trim();
    return out;
  }
  friend DensePoly operator*(const T& s, const DensePoly& a) { return a * s; }
  friend bool operator==(const DensePoly& a, const DensePoly& b) {
    if (a.c_.size() != b.c_.size()) return false;
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      if (!is_zero_elem(a.c_[i] - b.c_[i])) return false;
    return true;
  }
  DensePoly& operator+=(const DensePoly& o) { return *this = *this + o; }
  DensePoly& operator-=(const DensePoly& o) { return *this = *this - o; }
  DensePoly& operator*=(const DensePoly& o) { return *this = *this * o; }

  /// Euclidean division; b must be non-zero.
  static std::pair<DensePoly, DensePoly> divmod(const DensePoly& a, const DensePoly& b) {
    require(!b.is_zero(), ErrorCode::DivisionByZero, "polynomial division by zero");
    DensePoly q(a.zero_);
    DensePoly r = a;
    if (a.degree() < b.degree()) return {q, r};
    q.c_.assign(static_cast<std::size_t>(a.degree() - b.degree() + 1), a.zero_);
    T inv_lead = b.one() / b.leading();
    const std::size_t bn = b.c_.size();
    while (!r.is_zero() && r.degree() >= b.degree()) {
      const std::size_t shift = static_cast<std::size_t>(r.degree() - b.degree());
      T f = r.leading() * inv_lead;
      q.c_[shift] = f;
      for (std::size_t i = 0; i < bn; ++i) r.c_[shift + i] = r.c_[shift + i] - f * b.c_[i];
      r.c_.pop_back();  // leading term cancels exactly
      r.trim();
    }
    q.trim();
    return {q, r};
  }
  friend DensePoly operator/(const DensePoly& a, const DensePoly& b) { return divmod(a, b).first; }
  friend DensePoly operator%(const DensePoly& a, const DensePoly& b) { return divmod(a, b).second; }

  /// Quotient when b divides a exactly, otherwise nullopt-like failure flag.
  static bool divides(const DensePoly& b, const DensePoly& a) { return divmod(a, b).second.is_zero(); }

  DensePoly derivative() const {
    DensePoly out(zero_);
    for (std::size_t i = 1; i < c_.size(); ++i) out.c_.push_back(c_[i] * BigRational(static_cast<long>(i)));
    out.trim();
    return out;
  }

  template <class U>
  U eval(const U& x, const U& zero_value) const {
    U acc = zero_value;
    for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
    return acc;
  }
  T eval(const T& x) const {
    T acc = zero_;
    for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
    return acc;
  }

  DensePoly monic() const {
    if (is_zero()) return *this;
    return *this * (one() / leading());
  }

  /// p(q(z))
  DensePoly compose(const DensePoly& q) const {
    DensePoly acc(zero_);
    for (std::size_t i = c_.size(); i-- > 0;) acc = acc * q + constant(c_[i]);
    return acc;
  }

  /// Multiplicity of z as a factor (number of leading zero coefficients).
  std::size_t valuation() const {
    std::size_t v = 0;
    while (v < c_.size() && is_zero_elem(c_[v])) ++v;
    return v;
  }
  /// Divides by z^k; the caller guarantees k <= valuation().
  DensePoly shift_down(std::size_t k) const {
    DensePoly out(zero_);
    if (k < c_.size()) out.c_.assign(c_.begin() + static_cast<std::ptrdiff_t>(k), c_.end());
    out.trim();
    return out;
  }
  DensePoly shift_up(std::size_t k) const {
    DensePoly out(zero_);
    if (is_zero()) return out;
    out.c_.assign(k, zero_);
    out.c_.insert(out.c_.end(), c_.begin(), c_.end());
    return out;
  }

  template <class F>
  DensePoly map_coeffs(F&& f) const {
    DensePoly out(f(zero_));
    for (const auto& x : c_) out.c_.push_back(f(x));
    out.trim();
    return out;
  }

 private:
  static bool is_zero_elem(const T& x) { return detail::elem_is_zero(x); }
  void trim() {
    while (!c_.empty() && is_zero_elem(c_.back())) c_.pop_back();
  }

  std::vector<T> c_;
  T zero_;
};

template <class T>
DensePoly<T> poly_gcd(DensePoly<T> a, DensePoly<T> b) {
  while (!b.is_zero()) {
    auto r = DensePoly<T>::divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

/// (g, u, v) with u a + v b = g and g monic (g = 0 only when a = b = 0).
template <class T>
std::tuple<DensePoly<T>, DensePoly<T>, DensePoly<T>> poly_gcd_ext(const DensePoly<T>& a, const DensePoly<T>& b) {
  const T& z = a.zero();
  DensePoly<T> r0 = a, r1 = b;
  DensePoly<T> s0 = DensePoly<T>::constant(one_like(z)), s1(z);
  DensePoly<T> t0(z), t1 = DensePoly<T>::constant(one_like(z));
  while (!r1.is_zero()) {
    auto [q, r] = DensePoly<T>::divmod(r0, r1);
    r0 = std::exchange(r1, r);
    s0 = std::exchange(s1, s0 - q * s1);
    t0 = std::exchange(t1, t0 - q * t1);
  }
  if (r0.is_zero()) return {r0, s0, t0};
  T inv = one_like(z) / r0.leading();
  return {r0 * inv, s0 * inv, t0 * inv};
}

using QPoly = DensePoly<BigRational>;

inline QPoly qpoly(std::initializer_list<long> coeffs) {
  std::vector<BigRational> v;
  for (long c : coeffs) v.emplace_back(c);
  return QPoly(std::move(v), BigRational(0));
}

}  // namespace efunc
