#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <vector>

#include "efunc/ball.hpp"
#include "efunc/error.hpp"

namespace efunc {

/// Coefficient balls of a polynomial (low degree first) at a requested precision.
using BallCoeffFn = std::function<std::vector<ComplexBall>(mpfr_prec_t)>;

namespace detail {

inline ComplexBall horner(const std::vector<ComplexBall>& c, const ComplexBall& x) {
  ComplexBall acc(x.precision());
  for (std::size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
  return acc;
}

// One Weierstrass (Durand-Kerner) sweep on midpoints; returns the largest
// correction relative to max(1, |z|), as a double for convergence control.
inline double dk_sweep(const std::vector<ComplexBall>& c, std::vector<ComplexBall>& z, mpfr_prec_t prec) {
  const std::size_t n = z.size();
  const ComplexBall lead = c.back().midpoint();
  double worst = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ComplexBall den = lead;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) den = (den * (z[i] - z[j])).midpoint();
    ComplexBall num = horner(c, z[i]).midpoint();
    if (den.abs_mid().is_zero()) {
      // Coinciding approximations: nudge and keep going.
      z[i] = (z[i] + ComplexBall::from_rational(BigRational(1, 1000), BigRational(1, 997), prec)).midpoint();
      worst = 1;
      continue;
    }
    ComplexBall w = (num * den.midpoint().inverse()).midpoint();
    z[i] = (z[i] - w).midpoint().with_precision(prec).midpoint();
    double scale = std::max(1.0, z[i].abs_mid().to_double());
    double rel = w.abs_mid().to_double() / scale;
    if (!(rel <= worst)) worst = std::isnan(rel) ? 1.0 : std::max(worst, rel);
  }
  return worst;
}

}  // namespace detail

/// Isolating disks for the roots of a squarefree polynomial. Approximations
/// come from Weierstrass iteration; each disk has radius n|W_i| (the
/// Weierstrass correction), which contains a root, and pairwise disjoint disks
/// contain exactly one root each. When `real_coeffs` holds, a disk whose
/// mirror image meets no other disk holds a real root and is snapped to the
/// real axis.
class RootIsolator {
 public:
  RootIsolator(BallCoeffFn coeffs, std::size_t degree, bool real_coeffs, mpfr_prec_t max_prec = 1 << 17)
      : coeffs_(std::move(coeffs)), degree_(degree), real_(real_coeffs), max_prec_(max_prec) {}

  /// Disks with midpoints carried at `prec` bits. `start` optionally seeds
  /// the iteration (the order of the returned disks then follows `start`).
  std::vector<ComplexBall> isolate(mpfr_prec_t prec, const std::vector<ComplexBall>* start = nullptr) const {
    require(degree_ >= 1, ErrorCode::InvalidInput, "root isolation needs degree >= 1");
    mpfr_prec_t p = std::max<mpfr_prec_t>(prec, 64);
    std::vector<ComplexBall> z = start ? *start : initial(64);
    while (p <= max_prec_) {
      refine(z, p);
      if (auto disks = validate(z, p)) return *disks;
      p *= 2;
    }
    fail(ErrorCode::RootIsolationFailure, "roots not separated below the precision cap");
  }

 private:
  std::vector<ComplexBall> initial(mpfr_prec_t prec) const {
    auto c = coeffs_(prec);
    // Cauchy bound from midpoints; only a starting radius, not a proof.
    double lead = c.back().abs_mid().to_double();
    double bound = 0;
    for (std::size_t i = 0; i + 1 < c.size(); ++i) bound = std::max(bound, c[i].abs_mid().to_double() / lead);
    double r = 1 + bound;
    std::vector<ComplexBall> z;
    for (std::size_t k = 0; k < degree_; ++k) {
      double ang = 2 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(degree_) + 0.4;
      z.emplace_back(BigFloat::from_double(0.5 * r * std::cos(ang), prec), BigFloat::from_double(0.5 * r * std::sin(ang), prec),
                     BigFloat(detail::kRadiusPrecision));
    }
    return z;
  }

  void refine(std::vector<ComplexBall>& z, mpfr_prec_t target) const {
    if (degree_ == 1) return;
    // Work up through doubling precisions; quadratic convergence means a few
    // sweeps per level once the iteration has settled.
    mpfr_prec_t p = 64;
    while (true) {
      p = std::min(p, target);
      auto c = coeffs_(p);
      for (auto& x : z) x = x.with_precision(p).midpoint();
      const int max_sweeps = p == 64 ? 2000 : 60;
      const double tol = std::ldexp(1.0, -static_cast<int>(std::min<mpfr_prec_t>(p, 1000)) + 8);
      for (int it = 0; it < max_sweeps; ++it) {
        double w = detail::dk_sweep(c, z, p);
        if (w <= tol || w == 0) break;
      }
      if (p >= target) break;
      p *= 2;
    }
    // Extra polishing at full precision: the double-based tolerance cannot
    // see past ~1000 bits.
    auto c = coeffs_(target);
    for (int it = 0; it < 3; ++it) detail::dk_sweep(c, z, target);
  }

  std::optional<std::vector<ComplexBall>> validate(const std::vector<ComplexBall>& z, mpfr_prec_t prec) const {
    auto c = coeffs_(prec);
    if (c.back().contains_zero()) return std::nullopt;
    const std::size_t n = degree_;
    std::vector<ComplexBall> disks;
    if (n == 1) {
      disks.push_back(-(c[0] / c[1]));
      snap_real(disks);
      return disks;
    }
    for (std::size_t i = 0; i < n; ++i) {
      ComplexBall den = c.back();
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) den = den * (z[i] - z[j]);
      if (den.contains_zero()) return std::nullopt;
      ComplexBall w = detail::horner(c, z[i]) / den;
      BigFloat r = w.abs_upper();
      BigFloat nn = BigFloat::from_integer(BigInt(static_cast<unsigned long>(n)), detail::kRadiusPrecision, MPFR_RNDU);
      r = rnd::mul(r, nn, MPFR_RNDU);
      disks.emplace_back(z[i].mid_re(), z[i].mid_im(), r);
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (disks[i].overlaps(disks[j])) return std::nullopt;
    if (real_) snap_real(disks);
    return disks;
  }

  void snap_real(std::vector<ComplexBall>& disks) const {
    if (!real_) return;
    for (std::size_t i = 0; i < disks.size(); ++i) {
      if (!disks[i].may_be_real()) continue;
      ComplexBall mirror = disks[i].conj();
      bool alone = true;
      for (std::size_t j = 0; j < disks.size() && alone; ++j)
        if (j != i && mirror.overlaps(disks[j])) alone = false;
      if (alone) disks[i].make_real();
    }
  }

  BallCoeffFn coeffs_;
  std::size_t degree_;
  bool real_;
  mpfr_prec_t max_prec_;
};

/// Orders disks by real part descending, then imaginary part descending;
/// parts whose enclosures overlap count as equal.
inline bool root_precedes(const ComplexBall& a, const ComplexBall& b) {
  auto ra = a.real_interval();
  auto rb = b.real_interval();
  if (ra.hi < rb.lo) return false;
  if (rb.hi < ra.lo) return true;
  BigRational ia = a.mid_im().to_rational();
  BigRational ib = b.mid_im().to_rational();
  return ia > ib;
}

inline void sort_roots(std::vector<ComplexBall>& roots) {
  // Insertion sort: the comparator is only a weak order for separated disks.
  for (std::size_t i = 1; i < roots.size(); ++i)
    for (std::size_t j = i; j > 0 && root_precedes(roots[j], roots[j - 1]); --j) std::swap(roots[j], roots[j - 1]);
}

}  // namespace efunc
