#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "efunc/ball.hpp"
#include "efunc/efun.hpp"
#include "efunc/error.hpp"
#include "efunc/number_field.hpp"

namespace efunc {

struct EvalOptions {
  int max_retries = 4;
  std::size_t guard = 32;         // empirical growth check window
  std::size_t growth_probe = 64;  // prefix used to estimate C_hat
};

struct EvalResult {
  ComplexBall value;
  bool heuristic = false;  // tail bound rests on an empirical growth constant
  std::size_t terms = 0;
  mpfr_prec_t precision = 0;
  BigRational tail_bound = 0;
};

namespace detail {

inline BigRational pow10_neg(long digits) {
  BigInt p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(std::max<long>(digits, 0)));
  return BigRational(BigInt(1), p);
}

inline double log_house(const NFElement& a) {
  if (a.is_zero()) return -INFINITY;
  BigFloat h = a.house(64).abs_upper();
  BigFloat l(64);
  mpfr_log(l.get(), h.get(), MPFR_RNDU);
  return l.to_double(MPFR_RNDU);
}

// Rational upper bound >= x, a few bits above x.
inline BigRational rational_above(double x) {
  BigFloat b = BigFloat::from_double(x, 64);
  mpfr_mul_d(b.get(), b.get(), 1.0 + 1e-12, MPFR_RNDU);
  mpfr_nextabove(b.get());
  return b.to_rational();
}

/// Growth pair (K, C) with |iota(a_n)| <= K C^n, rigorous if attached to f,
/// otherwise estimated on a prefix and inflated.
struct TailModel {
  CoefficientBound bound;
  bool heuristic = false;
};

inline TailModel tail_model(const EFunction& f, const EvalOptions& opt) {
  if (f.bound()) return {*f.bound(), false};
  const std::size_t m = std::max<std::size_t>(opt.growth_probe, 8);
  std::vector<double> lh(m + 1);
  for (std::size_t n = 0; n <= m; ++n) lh[n] = log_house(f.coeff(n));
  auto chat = [&](std::size_t upto) {
    double best = -INFINITY;
    for (std::size_t n = 1; n <= upto; ++n)
      if (std::isfinite(lh[n])) best = std::max(best, lh[n] / static_cast<double>(n));
    return best;
  };
  const double full = chat(m), half = chat(m / 2);
  if (std::isfinite(full) && std::isfinite(half) && full > half && std::exp(full) > 1.5 * std::exp(half) && full > 0)
    fail(ErrorCode::GrowthUnboundedOnPrefix,
         "house(a_n)^(1/n) keeps growing on the prefix (" + std::to_string(std::exp(half)) + " -> " + std::to_string(std::exp(full)) + ")");
  const double logC = std::log(2.0) + std::max(std::isfinite(full) ? full : 0.0, 0.0);
  double logK = 0;
  for (std::size_t n = 0; n <= m; ++n)
    if (std::isfinite(lh[n])) logK = std::max(logK, lh[n] - logC * static_cast<double>(n));
  logK += std::log(2.0);
  return {{rational_above(std::exp(logK)), rational_above(std::exp(logC))}, true};
}

/// Smallest N with Cr/(N+1) <= 1/2 and 2 K (Cr)^N / N! <= eps. Returns
/// (N, exact bound).
inline std::pair<std::size_t, BigRational> choose_terms(const CoefficientBound& b, const BigRational& r, const BigRational& eps) {
  const BigRational cr = b.rate * r;
  if (sgn(cr) == 0 || sgn(b.scale) == 0) {
    // f is a polynomial of degree 0 as far as the bound can tell.
    return {1, BigRational(0)};
  }
  BigRational term = b.scale;  // K (Cr)^N / N!
  std::size_t N = 0;
  while (true) {
    if (2 * cr <= BigRational(static_cast<long>(N + 1)) && 2 * term <= eps) return {N, 2 * term};
    ++N;
    term *= cr;
    term /= BigRational(static_cast<long>(N));
    if (N > 200000) fail(ErrorCode::PrecisionExhausted, "term count for the tail bound exceeds 200000");
  }
}

inline BigRational radius_rational(const ComplexBall& b) { return b.radius().to_rational(); }

}  // namespace detail

/// f^sigma(sigma z0) at the embedding iota_k = iota_0 o sigma (k = 0 gives
/// f(z0) itself). Partial sums are exact in K; only the final embedding and
/// the tail carry error.
inline EvalResult evaluate(const EFunction& f, const NFElement& z0, long digits, std::size_t embedding = 0,
                           const EvalOptions& opt = {}) {
  require(f.field()->same_as(*z0.field()) || z0.is_rational(), ErrorCode::FieldMismatch, "point outside the function's field");
  require(digits >= 0, ErrorCode::InvalidInput, "digits must be non-negative");
  const auto& K = f.field();
  require(embedding < K->degree(), ErrorCode::InvalidInput, "embedding index out of range");
  NFElement z = z0.field()->same_as(*K) ? z0 : NFElement(K, z0.rational_part());
  const BigRational eps = detail::pow10_neg(digits);
  mpfr_prec_t prec = static_cast<mpfr_prec_t>(digits * 4 + 64);
  EvalResult res;
  if (z.is_zero()) {
    res.value = f.coeff(0).embed(embedding, prec);
    res.precision = prec;
    res.terms = 1;
    return res;
  }
  auto model = detail::tail_model(f, opt);
  const BigRational r = house_upper_rational(z);
  auto [N, tail] = detail::choose_terms(model.bound, r, eps / 2);
  if (model.heuristic) {
    // The estimated envelope must hold on a window past the cut-off.
    const double logK = std::log(model.bound.scale.get_d()), logC = std::log(model.bound.rate.get_d());
    for (std::size_t n = N; n < N + opt.guard; ++n)
      if (detail::log_house(f.coeff(n)) > logK + logC * static_cast<double>(n))
        fail(ErrorCode::GrowthUnboundedOnPrefix, "empirical growth envelope violated at n=" + std::to_string(n));
  }
  NFElement sum = z.zero(), pw = z.one();
  for (std::size_t n = 0; n < N; ++n) {
    NFElement a = f.coeff(n);
    if (!a.is_zero()) sum += a * pw / BigRational(factorial(n));
    pw = pw * z;
  }
  for (int attempt = 0; attempt <= opt.max_retries; ++attempt, prec *= 2) {
    ComplexBall v = sum.embed(embedding, prec);
    v.add_error(BigFloat::from_rational(tail, 64, MPFR_RNDU));
    if (detail::radius_rational(v) <= eps) {
      res.value = v;
      res.heuristic = model.heuristic;
      res.terms = N;
      res.precision = prec;
      res.tail_bound = tail;
      return res;
    }
  }
  fail(ErrorCode::PrecisionExhausted, "could not reach 10^-" + std::to_string(digits) + " after " + std::to_string(opt.max_retries) +
                                          " precision doublings");
}

/// f at an arbitrary complex ball (coefficients embedded by iota_0).
inline EvalResult evaluate_at(const EFunction& f, const ComplexBall& z, long digits, const EvalOptions& opt = {}) {
  const BigRational eps = detail::pow10_neg(digits);
  auto model = detail::tail_model(f, opt);
  const BigRational r = z.abs_upper().to_rational();
  auto [N, tail] = detail::choose_terms(model.bound, r, eps / 2);
  mpfr_prec_t prec = static_cast<mpfr_prec_t>(digits * 4 + 64);
  for (int attempt = 0; attempt <= opt.max_retries; ++attempt, prec *= 2) {
    ComplexBall zz = z.with_precision(prec);
    ComplexBall acc(prec), pw = ComplexBall::from_integer(1, prec);
    for (std::size_t n = 0; n < N; ++n) {
      NFElement a = f.coeff(n);
      if (!a.is_zero()) acc = acc + a.embed(0, prec) * pw * BigRational(BigInt(1), factorial(n));
      pw = pw * zz;
    }
    acc.add_error(BigFloat::from_rational(tail, 64, MPFR_RNDU));
    if (detail::radius_rational(acc) <= eps) {
      EvalResult res;
      res.value = acc;
      res.heuristic = model.heuristic;
      res.terms = N;
      res.precision = prec;
      res.tail_bound = tail;
      return res;
    }
  }
  fail(ErrorCode::PrecisionExhausted, "ball evaluation did not reach 10^-" + std::to_string(digits));
}

/// Lambda = sum lambda_j f_j(z0), summed as one combined stream.
inline EvalResult linear_form(const std::vector<NFElement>& lambda, const std::vector<EFunction>& fs, const NFElement& z0, long digits,
                              std::size_t embedding = 0, const EvalOptions& opt = {}) {
  require(lambda.size() == fs.size() && !fs.empty(), ErrorCode::InvalidInput, "coefficient and function counts differ");
  bool all_zero = std::all_of(lambda.begin(), lambda.end(), [](const NFElement& x) { return x.is_zero(); });
  if (all_zero) {
    EvalResult res;
    res.value = ComplexBall(static_cast<mpfr_prec_t>(digits * 4 + 64));
    res.precision = res.value.precision();
    return res;
  }
  std::vector<NFElement> lam;
  for (const auto& x : lambda) lam.push_back(x.field()->same_as(*fs[0].field()) ? x : NFElement(fs[0].field(), x.rational_part()));
  return evaluate(linear_combination(lam, fs), z0, digits, embedding, opt);
}

/// Outcome of a numerical zero test: a ball excluding zero certifies a
/// non-zero value; containing zero is only "consistent with zero".
struct ZeroCheck {
  bool nonzero_certified = false;
  long digits_used = 0;
  ComplexBall value;
};

/// Evaluates at `digits`, and while the ball contains zero escalates twice
/// (x4 digits each time) before accepting "consistent with zero".
template <class Eval>
ZeroCheck zero_check(Eval&& eval, long digits) {
  ZeroCheck out;
  for (int step = 0; step < 3; ++step, digits *= 4) {
    out.value = eval(digits);
    out.digits_used = digits;
    if (out.value.excludes_zero()) {
      out.nonzero_certified = true;
      return out;
    }
  }
  return out;
}

struct GrowthReport {
  double c_hat = 0;             // max_{2<=n<=n_max} house(a_n)^(1/n)
  double c_hat_half = 0;        // same over n <= n_max/2
  double stabilization = 0;     // c_hat / c_hat_half
  double denominator_rate = 0;  // log lcm(den a_0..a_n_max) / n_max
  std::size_t n_max = 0;
};

inline GrowthReport growth_report(const EFunction& f, std::size_t n_max) {
  require(n_max >= 2, ErrorCode::InvalidInput, "growth report needs n_max >= 2");
  GrowthReport rep;
  rep.n_max = n_max;
  double best = -INFINITY, best_half = -INFINITY;
  BigInt l = 1;
  for (std::size_t n = 0; n <= n_max; ++n) {
    NFElement a = f.coeff(n);
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), a.coordinate_denominator().get_mpz_t());
    if (n < 2) continue;
    double v = detail::log_house(a) / static_cast<double>(n);
    if (!std::isfinite(v)) continue;
    best = std::max(best, v);
    if (n <= n_max / 2) best_half = std::max(best_half, v);
  }
  rep.c_hat = std::isfinite(best) ? std::exp(best) : 0.0;
  rep.c_hat_half = std::isfinite(best_half) ? std::exp(best_half) : 0.0;
  rep.stabilization = rep.c_hat_half > 0 ? rep.c_hat / rep.c_hat_half : 1.0;
  long e = 0;
  double m = mpz_get_d_2exp(&e, l.get_mpz_t());
  rep.denominator_rate = (std::log(m) + static_cast<double>(e) * std::log(2.0)) / static_cast<double>(n_max);
  return rep;
}

}  // namespace efunc
