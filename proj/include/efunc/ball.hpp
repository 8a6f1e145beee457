#pragma once

#include <algorithm>
#include <string>
#include <utility>

#include "efunc/bigfloat.hpp"
#include "efunc/error.hpp"

namespace efunc {

/// Closed interval with exact rational endpoints.
struct RationalInterval {
  BigRational lo;
  BigRational hi;

  bool contains(const BigRational& x) const { return lo <= x && x <= hi; }
  bool contains_zero() const { return lo <= 0 && hi >= 0; }
  BigRational width() const { return hi - lo; }
  bool is_point() const { return lo == hi; }
};

/// Rational of least denominator in [lo, hi] (lo <= hi), via continued fractions.
inline BigRational simplest_rational_in(BigRational lo, BigRational hi) {
  if (lo > hi) std::swap(lo, hi);
  if (lo <= 0 && hi >= 0) return BigRational(0);
  if (hi < 0) return -simplest_rational_in(-hi, -lo);
  // 0 < lo <= hi
  BigInt fl;
  mpz_fdiv_q(fl.get_mpz_t(), lo.get_num_mpz_t(), lo.get_den_mpz_t());
  if (BigRational(fl) == lo) return lo;
  if (BigRational(fl + 1) <= hi) return BigRational(fl + 1);
  // Both ends share the integer part fl: recurse on reciprocals of the fractional parts.
  BigRational a = lo - fl, b = hi - fl;
  BigRational inner = simplest_rational_in(BigRational(1) / b, BigRational(1) / a);
  BigRational r = BigRational(fl) + BigRational(1) / inner;
  r.canonicalize();
  return r;
}

namespace detail {

constexpr mpfr_prec_t kRadiusPrecision = 64;

// Adds ulp(value) to rad when the operation producing value was inexact.
// ulp >= the round-to-nearest error, so this bound is safe.
inline void absorb_rounding(BigFloat& rad, const BigFloat& value, int ternary) {
  if (ternary == 0) return;
  BigFloat ulp(kRadiusPrecision);
  if (value.is_zero()) {
    mpfr_set_ui_2exp(ulp.get(), 1, mpfr_get_emin(), MPFR_RNDU);
  } else {
    mpfr_set_ui_2exp(ulp.get(), 1, mpfr_get_exp(value.get()) - value.precision(), MPFR_RNDU);
  }
  mpfr_add(rad.get(), rad.get(), ulp.get(), MPFR_RNDU);
}

}  // namespace detail

/// Complex disk: midpoint (re, im) at working precision plus a radius that is
/// always rounded upward. Every operation returns a ball that contains the
/// exact image of every point of the input balls.
class ComplexBall {
 public:
  explicit ComplexBall(mpfr_prec_t prec = 128) : re_(prec), im_(prec), rad_(detail::kRadiusPrecision) {}

  ComplexBall(BigFloat re, BigFloat im, BigFloat rad)
      : re_(std::move(re)), im_(std::move(im)), rad_(detail::kRadiusPrecision) {
    mpfr_set(rad_.get(), rad.get(), MPFR_RNDU);
  }

  static ComplexBall from_rational(const BigRational& re, const BigRational& im, mpfr_prec_t prec) {
    ComplexBall b(prec);
    int t1 = mpfr_set_q(b.re_.get(), re.get_mpq_t(), MPFR_RNDN);
    int t2 = mpfr_set_q(b.im_.get(), im.get_mpq_t(), MPFR_RNDN);
    detail::absorb_rounding(b.rad_, b.re_, t1);
    detail::absorb_rounding(b.rad_, b.im_, t2);
    return b;
  }
  static ComplexBall from_rational(const BigRational& re, mpfr_prec_t prec) {
    return from_rational(re, BigRational(0), prec);
  }
  static ComplexBall from_integer(long v, mpfr_prec_t prec) {
    ComplexBall b(prec);
    int t = mpfr_set_si(b.re_.get(), v, MPFR_RNDN);
    detail::absorb_rounding(b.rad_, b.re_, t);
    return b;
  }
  /// Real ball mid ± rad with mid given as a rational.
  static ComplexBall real_with_radius(const BigRational& mid, const BigRational& rad, mpfr_prec_t prec) {
    ComplexBall b = from_rational(mid, prec);
    b.add_error(BigFloat::from_rational(rad, detail::kRadiusPrecision, MPFR_RNDU));
    return b;
  }

  const BigFloat& mid_re() const { return re_; }
  const BigFloat& mid_im() const { return im_; }
  const BigFloat& radius() const { return rad_; }
  mpfr_prec_t precision() const { return std::max(re_.precision(), im_.precision()); }

  /// Same midpoint, radius dropped. Used by iterative root refinement only.
  ComplexBall midpoint() const {
    ComplexBall b(*this);
    mpfr_set_zero(b.rad_.get(), 1);
    return b;
  }

  ComplexBall with_precision(mpfr_prec_t prec) const {
    ComplexBall b(prec);
    int t1 = mpfr_set(b.re_.get(), re_.get(), MPFR_RNDN);
    int t2 = mpfr_set(b.im_.get(), im_.get(), MPFR_RNDN);
    b.rad_ = rad_;
    detail::absorb_rounding(b.rad_, b.re_, t1);
    detail::absorb_rounding(b.rad_, b.im_, t2);
    return b;
  }

  void add_error(const BigFloat& err) { mpfr_add(rad_.get(), rad_.get(), err.get(), MPFR_RNDU); }

  /// Sets the imaginary midpoint to zero, valid when the enclosed value is known real.
  void make_real() { mpfr_set_zero(im_.get(), 1); }

  BigFloat abs_upper() const {
    BigFloat h(detail::kRadiusPrecision);
    mpfr_hypot(h.get(), re_.get(), im_.get(), MPFR_RNDU);
    mpfr_add(h.get(), h.get(), rad_.get(), MPFR_RNDU);
    return h;
  }
  BigFloat abs_lower() const {
    BigFloat h(detail::kRadiusPrecision);
    mpfr_hypot(h.get(), re_.get(), im_.get(), MPFR_RNDD);
    mpfr_sub(h.get(), h.get(), rad_.get(), MPFR_RNDD);
    if (h.sign() < 0) mpfr_set_zero(h.get(), 1);
    return h;
  }
  /// |mid| rounded to the working precision (not an enclosure).
  BigFloat abs_mid() const {
    BigFloat h(precision());
    mpfr_hypot(h.get(), re_.get(), im_.get(), MPFR_RNDN);
    return h;
  }

  bool contains_zero() const { return abs_lower().is_zero(); }
  bool excludes_zero() const { return !contains_zero(); }

  /// True when the disk's imaginary extent includes the real axis.
  bool may_be_real() const {
    BigFloat a(detail::kRadiusPrecision);
    mpfr_abs(a.get(), im_.get(), MPFR_RNDD);
    return a <= rad_;
  }

  bool overlaps(const ComplexBall& other) const {
    ComplexBall d = *this - other;
    return d.contains_zero();
  }

  /// Exact rational enclosure of the real part: [re - rad, re + rad].
  RationalInterval real_interval() const {
    BigRational mid = re_.to_rational();
    BigRational r = rad_.to_rational();
    return {mid - r, mid + r};
  }

  ComplexBall conj() const {
    ComplexBall b(*this);
    mpfr_neg(b.im_.get(), b.im_.get(), MPFR_RNDN);
    return b;
  }

  ComplexBall operator-() const {
    ComplexBall b(*this);
    mpfr_neg(b.re_.get(), b.re_.get(), MPFR_RNDN);
    mpfr_neg(b.im_.get(), b.im_.get(), MPFR_RNDN);
    return b;
  }

  friend ComplexBall operator+(const ComplexBall& a, const ComplexBall& b) {
    ComplexBall out(std::max(a.precision(), b.precision()));
    int t1 = mpfr_add(out.re_.get(), a.re_.get(), b.re_.get(), MPFR_RNDN);
    int t2 = mpfr_add(out.im_.get(), a.im_.get(), b.im_.get(), MPFR_RNDN);
    mpfr_add(out.rad_.get(), a.rad_.get(), b.rad_.get(), MPFR_RNDU);
    detail::absorb_rounding(out.rad_, out.re_, t1);
    detail::absorb_rounding(out.rad_, out.im_, t2);
    return out;
  }
  friend ComplexBall operator-(const ComplexBall& a, const ComplexBall& b) {
    ComplexBall out(std::max(a.precision(), b.precision()));
    int t1 = mpfr_sub(out.re_.get(), a.re_.get(), b.re_.get(), MPFR_RNDN);
    int t2 = mpfr_sub(out.im_.get(), a.im_.get(), b.im_.get(), MPFR_RNDN);
    mpfr_add(out.rad_.get(), a.rad_.get(), b.rad_.get(), MPFR_RNDU);
    detail::absorb_rounding(out.rad_, out.re_, t1);
    detail::absorb_rounding(out.rad_, out.im_, t2);
    return out;
  }
  friend ComplexBall operator*(const ComplexBall& a, const ComplexBall& b) {
    ComplexBall out(std::max(a.precision(), b.precision()));
    int t1 = mpfr_fmms(out.re_.get(), a.re_.get(), b.re_.get(), a.im_.get(), b.im_.get(), MPFR_RNDN);
    int t2 = mpfr_fmma(out.im_.get(), a.re_.get(), b.im_.get(), a.im_.get(), b.re_.get(), MPFR_RNDN);
    // |a|rb + |b|ra + ra rb
    if (!a.rad_.is_zero() || !b.rad_.is_zero()) {
      BigFloat ma(detail::kRadiusPrecision), mb(detail::kRadiusPrecision), t(detail::kRadiusPrecision);
      mpfr_hypot(ma.get(), a.re_.get(), a.im_.get(), MPFR_RNDU);
      mpfr_hypot(mb.get(), b.re_.get(), b.im_.get(), MPFR_RNDU);
      mpfr_mul(t.get(), ma.get(), b.rad_.get(), MPFR_RNDU);
      mpfr_add(out.rad_.get(), out.rad_.get(), t.get(), MPFR_RNDU);
      mpfr_mul(t.get(), mb.get(), a.rad_.get(), MPFR_RNDU);
      mpfr_add(out.rad_.get(), out.rad_.get(), t.get(), MPFR_RNDU);
      mpfr_mul(t.get(), a.rad_.get(), b.rad_.get(), MPFR_RNDU);
      mpfr_add(out.rad_.get(), out.rad_.get(), t.get(), MPFR_RNDU);
    }
    detail::absorb_rounding(out.rad_, out.re_, t1);
    detail::absorb_rounding(out.rad_, out.im_, t2);
    return out;
  }

  /// Multiplication by an exact rational.
  friend ComplexBall operator*(const ComplexBall& a, const BigRational& q) {
    return a * from_rational(q, a.precision());
  }

  ComplexBall inverse() const {
    const mpfr_prec_t prec = precision();
    BigFloat lower(detail::kRadiusPrecision);
    mpfr_hypot(lower.get(), re_.get(), im_.get(), MPFR_RNDD);
    if (lower <= rad_) fail(ErrorCode::DivisionByZero, "ball inverse: ball contains zero");
    // w ~ 1/mid, then |1/z - w| <= |1 - mid*w|/|mid| + r/(|mid|(|mid|-r)).
    ComplexBall w(prec);
    BigFloat den(prec);
    mpfr_fmma(den.get(), re_.get(), re_.get(), im_.get(), im_.get(), MPFR_RNDN);
    mpfr_div(w.re_.get(), re_.get(), den.get(), MPFR_RNDN);
    mpfr_div(w.im_.get(), im_.get(), den.get(), MPFR_RNDN);
    mpfr_neg(w.im_.get(), w.im_.get(), MPFR_RNDN);
    ComplexBall residual = from_integer(1, prec) - midpoint() * w;
    BigFloat err = rnd::div(residual.abs_upper(), lower, MPFR_RNDU);
    if (!rad_.is_zero()) {
      BigFloat gap = rnd::sub(lower, rad_, MPFR_RNDD);
      BigFloat prod = rnd::mul(lower, gap, MPFR_RNDD);
      err = rnd::add(err, rnd::div(rad_, prod, MPFR_RNDU), MPFR_RNDU);
    }
    w.add_error(err);
    return w;
  }

  friend ComplexBall operator/(const ComplexBall& a, const ComplexBall& b) { return a * b.inverse(); }

  ComplexBall pow(unsigned long e) const {
    ComplexBall result = from_integer(1, precision());
    ComplexBall base = *this;
    while (e > 0) {
      if (e & 1UL) result = result * base;
      e >>= 1;
      if (e > 0) base = base * base;
    }
    return result;
  }

  /// "mid ± rad" in decimal; imaginary part printed only when nonzero.
  std::string to_string(int digits) const {
    std::string out = re_.to_decimal(digits);
    if (!im_.is_zero()) {
      out += im_.sign() < 0 ? " - " : " + ";
      BigFloat a(im_.precision());
      mpfr_abs(a.get(), im_.get(), MPFR_RNDN);
      out += a.to_decimal(digits) + "*i";
    }
    out += " +/- " + rad_.to_decimal(3, MPFR_RNDU);
    return out;
  }

  /// Exact binary rendering: re, im, rad as mantissa*2^exp.
  std::string to_machine_string() const {
    return "re=" + re_.to_binary_exact() + " im=" + im_.to_binary_exact() + " rad=" + rad_.to_binary_exact();
  }

 private:
  BigFloat re_;
  BigFloat im_;
  BigFloat rad_;
};

/// Real enclosure [lower, upper] of |b|.
struct MagnitudeBounds {
  BigFloat lower;
  BigFloat upper;
};

inline MagnitudeBounds magnitude(const ComplexBall& b) { return {b.abs_lower(), b.abs_upper()}; }

/// Real ball for the interval [lower, upper] of a non-negative quantity.
inline ComplexBall ball_from_bounds(const BigFloat& lower, const BigFloat& upper, mpfr_prec_t prec) {
  BigFloat mid(prec);
  mpfr_add(mid.get(), lower.get(), upper.get(), MPFR_RNDN);
  mpfr_div_2ui(mid.get(), mid.get(), 1, MPFR_RNDN);
  BigFloat r1 = rnd::sub(upper, mid, MPFR_RNDU);
  BigFloat r2 = rnd::sub(mid, lower, MPFR_RNDU);
  return ComplexBall(mid, BigFloat(prec), rnd::max(r1, r2));
}

}  // namespace efunc
