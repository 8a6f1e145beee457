#pragma once

#include <mpfr.h>
#include <gmpxx.h>

#include <cstdlib>
#include <memory>
#include <string>

namespace efunc {

using BigInt = mpz_class;
using BigRational = mpq_class;

/// RAII handle over an mpfr_t. Every arithmetic call site picks its own
/// rounding mode; nothing here rounds implicitly except copy (exact, since
/// the copy keeps the source precision).
class BigFloat {
 public:
  explicit BigFloat(mpfr_prec_t prec = 64) {
    mpfr_init2(v_, prec);
    mpfr_set_zero(v_, 1);
  }
  BigFloat(const BigFloat& other) {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  BigFloat(BigFloat&& other) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, other.v_);
  }
  BigFloat& operator=(const BigFloat& other) {
    if (this != &other) {
      mpfr_set_prec(v_, mpfr_get_prec(other.v_));
      mpfr_set(v_, other.v_, MPFR_RNDN);
    }
    return *this;
  }
  BigFloat& operator=(BigFloat&& other) noexcept {
    mpfr_swap(v_, other.v_);
    return *this;
  }
  ~BigFloat() { mpfr_clear(v_); }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  mpfr_prec_t precision() const { return mpfr_get_prec(v_); }

  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }
  double to_double(mpfr_rnd_t rnd = MPFR_RNDN) const { return mpfr_get_d(v_, rnd); }

  static BigFloat from_rational(const BigRational& q, mpfr_prec_t prec, mpfr_rnd_t rnd) {
    BigFloat r(prec);
    mpfr_set_q(r.v_, q.get_mpq_t(), rnd);
    return r;
  }
  static BigFloat from_integer(const BigInt& z, mpfr_prec_t prec, mpfr_rnd_t rnd) {
    BigFloat r(prec);
    mpfr_set_z(r.v_, z.get_mpz_t(), rnd);
    return r;
  }
  static BigFloat from_double(double x, mpfr_prec_t prec) {
    BigFloat r(prec);
    mpfr_set_d(r.v_, x, MPFR_RNDN);
    return r;
  }
  static BigFloat pow2(long exponent, mpfr_prec_t prec = 64) {
    BigFloat r(prec);
    mpfr_set_ui_2exp(r.v_, 1, exponent, MPFR_RNDN);
    return r;
  }

  /// Exact dyadic value as a rational.
  BigRational to_rational() const {
    if (is_zero()) return BigRational(0);
    BigInt mant;
    mpfr_exp_t e = mpfr_get_z_2exp(mant.get_mpz_t(), v_);
    BigRational q(mant);
    if (e >= 0) {
      mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(e));
    } else {
      mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(-e));
    }
    q.canonicalize();
    return q;
  }

  /// Scientific decimal text with `digits` significant digits.
  std::string to_decimal(int digits, mpfr_rnd_t rnd = MPFR_RNDN) const {
    if (is_zero()) return "0";
    char* buf = nullptr;
    const char* fmt = rnd == MPFR_RNDU ? "%.*RUe" : (rnd == MPFR_RNDD ? "%.*RDe" : "%.*RNe");
    mpfr_asprintf(&buf, fmt, digits > 0 ? digits - 1 : 0, v_);
    std::string out(buf);
    mpfr_free_str(buf);
    return out;
  }

  /// Exact "mantissa*2^exponent" form.
  std::string to_binary_exact() const {
    if (is_zero()) return "0";
    BigInt mant;
    mpfr_exp_t e = mpfr_get_z_2exp(mant.get_mpz_t(), v_);
    return mant.get_str() + "*2^" + std::to_string(static_cast<long>(e));
  }

  friend bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
  friend bool operator<=(const BigFloat& a, const BigFloat& b) { return mpfr_lessequal_p(a.v_, b.v_) != 0; }
  friend bool operator>(const BigFloat& a, const BigFloat& b) { return mpfr_greater_p(a.v_, b.v_) != 0; }
  friend bool operator>=(const BigFloat& a, const BigFloat& b) { return mpfr_greaterequal_p(a.v_, b.v_) != 0; }
  friend bool operator==(const BigFloat& a, const BigFloat& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }

 private:
  mpfr_t v_;
};

namespace rnd {

// Small helpers for upper/lower bound arithmetic on radii and magnitudes.
inline BigFloat add(const BigFloat& a, const BigFloat& b, mpfr_rnd_t r, mpfr_prec_t prec = 64) {
  BigFloat out(prec);
  mpfr_add(out.get(), a.get(), b.get(), r);
  return out;
}
inline BigFloat sub(const BigFloat& a, const BigFloat& b, mpfr_rnd_t r, mpfr_prec_t prec = 64) {
  BigFloat out(prec);
  mpfr_sub(out.get(), a.get(), b.get(), r);
  return out;
}
inline BigFloat mul(const BigFloat& a, const BigFloat& b, mpfr_rnd_t r, mpfr_prec_t prec = 64) {
  BigFloat out(prec);
  mpfr_mul(out.get(), a.get(), b.get(), r);
  return out;
}
inline BigFloat div(const BigFloat& a, const BigFloat& b, mpfr_rnd_t r, mpfr_prec_t prec = 64) {
  BigFloat out(prec);
  mpfr_div(out.get(), a.get(), b.get(), r);
  return out;
}
inline BigFloat max(const BigFloat& a, const BigFloat& b) { return a < b ? b : a; }
inline BigFloat min(const BigFloat& a, const BigFloat& b) { return a < b ? a : b; }

}  // namespace rnd

}  // namespace efunc
