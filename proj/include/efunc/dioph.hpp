#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "efunc/ball.hpp"
#include "efunc/efun.hpp"
#include "efunc/error.hpp"
#include "efunc/numeval.hpp"

namespace efunc {

enum class BoundKind { Theorem1, Exp, BesselJ0, A22, Trmes };

inline std::optional<BoundKind> parse_bound_kind(const std::string& s) {
  if (s == "theorem1") return BoundKind::Theorem1;
  if (s == "exp") return BoundKind::Exp;
  if (s == "besselJ0" || s == "bessel-j0" || s == "j0") return BoundKind::BesselJ0;
  if (s == "A22" || s == "a22") return BoundKind::A22;
  if (s == "trmes") return BoundKind::Trmes;
  return std::nullopt;
}

/// Exponent kappa with |Lambda| > c H^-(kappa + eps) (|xi - p/q| > c q^-(kappa + eps)
/// for the one-number kinds).
///   theorem1: d N^d - 1     exp: d 2^d     besselJ0: d 3^d     A22: d 5^d
///   trmes:    d binom(N+D-1, N-1)^d - 1
inline BigInt paper_exponent(BoundKind kind, unsigned long d, unsigned long N = 1, unsigned long D = 1) {
  require(d >= 1 && N >= 1 && D >= 1, ErrorCode::InvalidInput, "bound parameters must be >= 1");
  auto pw = [](const BigInt& b, unsigned long e) {
    BigInt r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
    return r;
  };
  const BigInt dd(d);
  switch (kind) {
    case BoundKind::Theorem1: return dd * pw(BigInt(N), d) - 1;
    case BoundKind::Exp: return dd * pw(BigInt(2), d);
    case BoundKind::BesselJ0: return dd * pw(BigInt(3), d);
    case BoundKind::A22: return dd * pw(BigInt(5), d);
    case BoundKind::Trmes: return dd * pw(binomial(N + D - 1, N - 1), d) - 1;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Continued fractions from balls.

struct Convergent {
  BigInt p;
  BigInt q;
  bool certified = true;
};

struct ContinuedFraction {
  std::vector<BigInt> quotients;
  std::vector<Convergent> convergents;
  bool precision_stop = false;  // the enclosure no longer fixes the next quotient
  bool terminated = false;      // the value is exactly the last convergent
};

/// Partial quotients of the real number enclosed by `xi`, emitted only while
/// floor() is determined on the whole enclosure.
inline ContinuedFraction continued_fraction(RationalInterval x, std::size_t max_terms) {
  ContinuedFraction cf;
  BigInt p0 = 1, q0 = 0, p1 = 0, q1 = 1;  // p_{-1}, q_{-1}, p_{-2}, q_{-2}
  auto floor_of = [](const BigRational& v) {
    BigInt f;
    mpz_fdiv_q(f.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
    return f;
  };
  while (cf.quotients.size() < max_terms) {
    BigInt a = floor_of(x.lo);
    if (floor_of(x.hi) != a) {
      cf.precision_stop = true;
      break;
    }
    const BigRational af(a);
    // The enclosure touches an integer without being that integer: ambiguous.
    if (x.lo == af && x.hi != af) {
      cf.precision_stop = true;
      break;
    }
    cf.quotients.push_back(a);
    BigInt p = a * p0 + p1, q = a * q0 + q1;
    p1 = p0;
    q1 = q0;
    p0 = p;
    q0 = q;
    cf.convergents.push_back({p, q, true});
    if (x.is_point() && x.lo == af) {
      cf.terminated = true;
      break;
    }
    RationalInterval next{BigRational(1) / (x.hi - af), BigRational(1) / (x.lo - af)};
    next.lo.canonicalize();
    next.hi.canonicalize();
    x = next;
  }
  return cf;
}

inline ContinuedFraction continued_fraction(const ComplexBall& xi, std::size_t max_terms) {
  require(xi.may_be_real(), ErrorCode::InvalidInput, "continued fractions need a real value");
  return continued_fraction(xi.real_interval(), max_terms);
}

struct ExponentSample {
  BigInt q;
  double mu;
};

struct ExponentReport {
  std::vector<ExponentSample> samples;  // one per usable convergent with q >= 2
  double estimate = 0;                  // max of mu over the trailing half past burn-in
  std::size_t burn_in = 5;
  std::size_t dropped = 0;  // trailing convergents whose |xi - p/q| was not resolved to 1%
};

/// Empirical irrationality exponent from convergents: mu_q = -log|xi - p/q| / log q.
inline ExponentReport exponent_estimate(const ComplexBall& xi, const ContinuedFraction& cf, std::size_t burn_in = 5) {
  if (cf.terminated) fail(ErrorCode::RationalDetected, "the value is the rational " + cf.convergents.back().p.get_str() + "/" +
                                                           cf.convergents.back().q.get_str());
  ExponentReport rep;
  rep.burn_in = burn_in;
  const mpfr_prec_t prec = xi.precision();
  for (const auto& c : cf.convergents) {
    if (c.q < 2) continue;
    ComplexBall diff = xi - ComplexBall::from_rational(BigRational(c.p, c.q), prec);
    BigFloat lo = diff.abs_lower(), hi = diff.abs_upper();
    if (lo.is_zero()) {
      ++rep.dropped;
      continue;
    }
    // Relative width below 1%.
    BigFloat w = rnd::sub(hi, lo, MPFR_RNDU);
    BigFloat rel = rnd::div(w, lo, MPFR_RNDU);
    if (rel.to_double(MPFR_RNDU) >= 0.01) {
      ++rep.dropped;
      continue;
    }
    BigFloat lg(64), lq(64);
    mpfr_log(lg.get(), diff.abs_mid().get(), MPFR_RNDN);
    BigFloat qf = BigFloat::from_integer(c.q, 64, MPFR_RNDN);
    mpfr_log(lq.get(), qf.get(), MPFR_RNDN);
    rep.samples.push_back({c.q, -lg.to_double() / lq.to_double()});
  }
  if (rep.samples.size() <= burn_in)
    fail(ErrorCode::InsufficientPrecision, "only " + std::to_string(rep.samples.size()) +
                                                " convergents resolved to 1%; need more than the burn-in of " + std::to_string(burn_in));
  const std::size_t usable = rep.samples.size() - burn_in;
  const std::size_t start = burn_in + usable / 2;
  rep.estimate = -INFINITY;
  for (std::size_t i = start; i < rep.samples.size(); ++i) rep.estimate = std::max(rep.estimate, rep.samples[i].mu);
  return rep;
}

// ---------------------------------------------------------------------------

struct LiouvilleReport {
  ComplexBall c_min;  // q^kappa |q xi - p(q)| at the minimising q
  BigInt argmin_q;
  BigInt argmin_p;
  bool all_excluded = true;  // every term's ball excludes 0, so c_min > 0 is certified
  bool exact_zero = false;   // xi is exactly p/q for some scanned q
  std::size_t qmax = 0;
};

/// min over 2 <= q <= Q_max of q^kappa |q xi - p(q)|, p(q) the nearest integer.
inline LiouvilleReport liouville_scan(const ComplexBall& xi, long kappa, unsigned long qmax) {
  require(qmax >= 2, ErrorCode::InvalidInput, "Q_max must be at least 2");
  require(xi.may_be_real(), ErrorCode::InvalidInput, "Liouville scans need a real value");
  // radius < 1 / (2 Q_max^(kappa+2))
  {
    BigInt qk;
    mpz_ui_pow_ui(qk.get_mpz_t(), qmax, static_cast<unsigned long>(std::max<long>(kappa + 2, 0)));
    if (xi.radius().to_rational() * 2 * BigRational(qk) >= 1)
      fail(ErrorCode::PrecisionTooLow, "enclosure radius must be below 1/(2 Q_max^(kappa+2)); evaluate with more digits");
  }
  const mpfr_prec_t prec = xi.precision();
  LiouvilleReport rep;
  rep.qmax = qmax;
  std::optional<BigFloat> best;
  for (unsigned long q = 2; q <= qmax; ++q) {
    ComplexBall qx = xi * BigRational(static_cast<long>(q));
    BigFloat m(prec);
    mpfr_round(m.get(), qx.mid_re().get());
    BigInt p;
    mpfr_get_z(p.get_mpz_t(), m.get(), MPFR_RNDN);
    ComplexBall diff = qx - ComplexBall::from_rational(BigRational(p), prec);
    BigInt qk;
    mpz_ui_pow_ui(qk.get_mpz_t(), q, static_cast<unsigned long>(std::max<long>(kappa, 0)));
    ComplexBall term = diff * BigRational(qk);
    if (kappa < 0) {
      BigInt inv;
      mpz_ui_pow_ui(inv.get_mpz_t(), q, static_cast<unsigned long>(-kappa));
      term = diff * BigRational(BigInt(1), inv);
    }
    const bool zero = diff.contains_zero();
    if (zero) {
      rep.all_excluded = false;
      if (xi.radius().is_zero()) rep.exact_zero = true;
    }
    BigFloat mag = term.abs_mid();
    if (zero) mag = BigFloat(prec);
    if (!best || mag < *best) {
      best = mag;
      ComplexBall abs_ball = ball_from_bounds(term.abs_lower(), term.abs_upper(), prec);
      rep.c_min = abs_ball;
      rep.argmin_q = q;
      rep.argmin_p = p;
    }
    if (rep.exact_zero) break;
  }
  return rep;
}

// ---------------------------------------------------------------------------

struct ScanRecord {
  std::vector<NFElement> lambda;
  BigRational height;  // rational upper bound for max house(lambda_j)
  ComplexBall value;   // |Lambda|
};

struct LinearFormScanReport {
  ScanRecord minimum;                      // of height^kappa |Lambda| over forms excluding 0
  ComplexBall minimum_value;               // height^kappa |Lambda| at the minimum
  std::vector<ScanRecord> records;         // successive strict minima of |Lambda| by height
  std::vector<std::vector<NFElement>> vanishing_candidates;  // balls containing 0
  std::size_t forms = 0;
  bool power_basis_caveat = false;  // non-rational field: scanning Z[theta], maybe a subring of O_K
};

namespace detail {

// Max |coordinate| needed so that every element of Z[theta] with house <= H is
// enumerated: coords = V^-1 (conjugates).
inline long coordinate_box(const NumberField::Ptr& K, long H) {
  const std::size_t d = K->degree();
  if (d == 1) return H;
  auto roots = K->roots(128);
  Matrix<ComplexBall> V(d, d, ComplexBall(128));
  for (std::size_t k = 0; k < d; ++k) {
    ComplexBall pw = ComplexBall::from_integer(1, 128);
    for (std::size_t i = 0; i < d; ++i) {
      V(k, i) = pw;
      pw = pw * roots[k];
    }
  }
  double worst = 0;
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<ComplexBall> e(d, ComplexBall(128));
    double row = 0;
    // column i of V^-1 via solve against unit vectors
    for (std::size_t k = 0; k < d; ++k) {
      std::fill(e.begin(), e.end(), ComplexBall(128));
      e[k] = ComplexBall::from_integer(1, 128);
      auto x = ball_solve(V, e);
      require(x.has_value(), ErrorCode::RootIsolationFailure, "Vandermonde solve failed");
      row += (*x)[i].abs_upper().to_double(MPFR_RNDU);
    }
    worst = std::max(worst, row);
  }
  return static_cast<long>(std::ceil(worst * static_cast<double>(H))) + 1;
}

}  // namespace detail

struct ScanOptions {
  long digits = 60;
  std::size_t budget = 4000000;  // N * number of forms
  unsigned jobs = 1;
};

/// Exhaustive scan of Lambda = sum lambda_j f_j(z0) over integral lambda in the
/// power basis with 0 < max house(lambda_j) <= H_max.
inline LinearFormScanReport linear_form_scan(const std::vector<EFunction>& fs, const NFElement& z0, long hmax, long kappa,
                                             const ScanOptions& opt = {}) {
  require(!fs.empty() && hmax >= 1, ErrorCode::InvalidInput, "need functions and H_max >= 1");
  const auto& K = fs[0].field();
  const std::size_t N = fs.size(), d = K->degree();
  const long box = detail::coordinate_box(K, hmax);
  // Candidate elements: integral coordinate vectors with house <= H_max.
  struct Elem {
    NFElement x;
    BigRational house;
    ComplexBall ball;
  };
  const mpfr_prec_t prec = static_cast<mpfr_prec_t>(opt.digits * 4 + 64);
  std::vector<Elem> elems;
  {
    std::vector<long> c(d, -box);
    while (true) {
      std::vector<BigRational> coords(c.begin(), c.end());
      NFElement x(K, coords);
      BigRational h = house_upper_rational(x);
      if (h <= hmax) elems.push_back({x, h, x.embed(0, prec)});
      std::size_t i = 0;
      while (i < d && c[i] == box) c[i++] = -box;
      if (i == d) break;
      ++c[i];
    }
  }
  double count = std::pow(static_cast<double>(elems.size()), static_cast<double>(N));
  if (count * static_cast<double>(N) > static_cast<double>(opt.budget))
    fail(ErrorCode::BudgetExceeded, "scan needs " + std::to_string(static_cast<long long>(count)) + " forms, over the budget");
  std::vector<ComplexBall> vals;
  for (const auto& f : fs) vals.push_back(evaluate(f, z0, opt.digits).value.with_precision(prec));

  LinearFormScanReport rep;
  rep.power_basis_caveat = d > 1;
  // Best |Lambda| per exact height, used for the record list.
  struct PerHeight {
    BigRational h;
    BigFloat v;
    std::vector<NFElement> lambda;
    ComplexBall ball;
  };
  struct Partial {
    std::size_t forms = 0;
    std::optional<BigFloat> best;
    ScanRecord minimum;
    ComplexBall minimum_value;
    std::vector<std::vector<NFElement>> vanishing;
    std::vector<PerHeight> per;
  };
  auto note_height = [](std::vector<PerHeight>& per, const PerHeight& p) {
    auto it = std::find_if(per.begin(), per.end(), [&](const PerHeight& q) { return q.h == p.h; });
    if (it == per.end()) {
      per.push_back(p);
    } else if (p.v < it->v) {
      *it = p;
    }
  };
  // Worker over the slice lo <= idx[N-1] < hi; the last index varies slowest,
  // so concatenating slices in order reproduces the serial enumeration.
  auto work = [&](std::size_t lo, std::size_t hi, Partial& out) {
    std::vector<std::size_t> idx(N, 0);
    idx[N - 1] = lo;
    while (idx[N - 1] < hi) {
      bool nonzero = false;
      BigRational H = 0;
      for (std::size_t j = 0; j < N; ++j) {
        if (!elems[idx[j]].x.is_zero()) nonzero = true;
        H = std::max(H, elems[idx[j]].house);
      }
      if (nonzero) {
        ++out.forms;
        ComplexBall L(prec);
        for (std::size_t j = 0; j < N; ++j)
          if (!elems[idx[j]].x.is_zero()) L = L + elems[idx[j]].ball * vals[j];
        std::vector<NFElement> lam;
        for (std::size_t j = 0; j < N; ++j) lam.push_back(elems[idx[j]].x);
        if (L.contains_zero()) {
          out.vanishing.push_back(lam);
        } else {
          ComplexBall absL = ball_from_bounds(L.abs_lower(), L.abs_upper(), prec);
          BigRational Hk = 1;
          for (long k = 0; k < kappa; ++k) Hk *= H;
          ComplexBall scaled = absL * Hk;
          BigFloat m = scaled.abs_mid();
          if (!out.best || m < *out.best) {
            out.best = m;
            out.minimum = {lam, H, absL};
            out.minimum_value = scaled;
          }
          note_height(out.per, {H, absL.abs_mid(), lam, absL});
        }
      }
      std::size_t i = 0;
      while (i + 1 < N && idx[i] + 1 == elems.size()) idx[i++] = 0;
      ++idx[i];
    }
  };
  const std::size_t M = elems.size();
  const std::size_t jobs = std::max<std::size_t>(1, std::min<std::size_t>(opt.jobs, M));
  std::vector<Partial> parts(jobs);
  if (jobs == 1) {
    work(0, M, parts[0]);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(jobs);
    for (std::size_t w = 0; w < jobs; ++w)
      pool.emplace_back([&, w] {
        try {
          work(M * w / jobs, M * (w + 1) / jobs, parts[w]);
        } catch (...) {
          errs[w] = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
    for (auto& e : errs)
      if (e) std::rethrow_exception(e);
  }
  std::optional<BigFloat> best;
  std::vector<PerHeight> per;
  for (auto& p : parts) {
    rep.forms += p.forms;
    if (p.best && (!best || *p.best < *best)) {
      best = p.best;
      rep.minimum = p.minimum;
      rep.minimum_value = p.minimum_value;
    }
    for (auto& v : p.vanishing) rep.vanishing_candidates.push_back(std::move(v));
    for (const auto& h : p.per) note_height(per, h);
  }
  std::sort(per.begin(), per.end(), [](const PerHeight& a, const PerHeight& b) { return a.h < b.h; });
  std::optional<BigFloat> running;
  for (const auto& p : per)
    if (!running || p.v < *running) {
      running = p.v;
      rep.records.push_back({p.lambda, p.h, p.ball});
    }
  return rep;
}

// ---------------------------------------------------------------------------

struct NormFormReport {
  ComplexBall varpi_product;  // product of the conjugate linear forms
  ComplexBall varpi_stream;   // the same number from the rational norm stream
  ComplexBall lambda;         // Lambda itself (identity embedding)
  bool routes_agree = false;
  BigRational height;
  ComplexBall c_prime;
  bool trivial_bound_holds = false;  // |varpi| <= c' H^(d-1) |Lambda| on enclosures
};

/// varpi = prod_sigma sum_j sigma(lambda_j) f_j^sigma(sigma z0), computed from
/// the d embedded linear forms and from the norm of the combined stream.
inline NormFormReport norm_linear_form(const std::vector<NFElement>& lambda, const std::vector<EFunction>& fs, const NFElement& z0,
                                       long digits) {
  require(!fs.empty() && lambda.size() == fs.size(), ErrorCode::InvalidInput, "coefficient and function counts differ");
  const auto& K = fs[0].field();
  K->require_galois("norm_linear_form");
  const std::size_t d = K->degree(), N = fs.size();
  const mpfr_prec_t prec = static_cast<mpfr_prec_t>(digits * 4 + 64);
  NormFormReport rep;
  rep.height = 0;
  for (const auto& l : lambda) rep.height = std::max(rep.height, house_upper_rational(l));
  ComplexBall prod = ComplexBall::from_integer(1, prec);
  ComplexBall cp = ComplexBall::from_integer(1, prec);
  for (std::size_t s = 0; s < d; ++s) {
    const std::size_t k = K->embedding_of(s);
    ComplexBall v = linear_form(lambda, fs, z0, digits, k).value;
    if (s == 0) rep.lambda = v;
    prod = prod * v;
    if (s != 0) {
      BigFloat mx(64);
      for (const auto& f : fs) mx = rnd::max(mx, evaluate(f, z0, digits, k).value.abs_upper());
      BigFloat t = rnd::mul(mx, BigFloat::from_integer(BigInt(static_cast<unsigned long>(N)), 64, MPFR_RNDU), MPFR_RNDU);
      mpfr_add_ui(t.get(), t.get(), 1, MPFR_RNDU);
      cp = cp * ComplexBall(t, BigFloat(64), BigFloat(64));
    }
  }
  rep.varpi_product = prod;
  rep.c_prime = cp;
  // Stream route: psi(z) = phi(z0 z), varpi = N(psi)(1).
  EFunction phi = linear_combination(lambda, fs);
  EFunction psi = z0.is_rational() && z0.rational_part() == 1 ? phi : scale_stream(phi, z0);
  EFunction nrm = galois_norm(psi);
  rep.varpi_stream = evaluate(nrm, NFElement(NumberField::rationals(), 1), digits).value;
  rep.routes_agree = rep.varpi_product.overlaps(rep.varpi_stream);
  // |varpi| <= c' H^(d-1) |Lambda|, compared with upper and lower enclosures.
  BigRational Hd = 1;
  for (std::size_t p = 1; p < d; ++p) Hd *= rep.height;
  BigFloat rhs = rnd::mul(cp.abs_lower(), BigFloat::from_rational(Hd, 64, MPFR_RNDD), MPFR_RNDD);
  rhs = rnd::mul(rhs, rep.lambda.abs_upper(), MPFR_RNDU);
  rep.trivial_bound_holds = rep.varpi_product.abs_lower() <= rhs;
  return rep;
}

// ---------------------------------------------------------------------------

struct DescentResult {
  std::vector<NFElement> coeffs;  // Tr_{L/K}(lambda_j / lambda_1)
  std::size_t index = 1;          // [L : K]
  ComplexBall asserted_value;     // sum lambda_j f_j(z0)
  ComplexBall descended_value;    // sum Tr(lambda_j) f_j(z0)
};

/// Automorphisms of L fixing every coefficient of every f_j (checked up to
/// `order`): the subgroup Gal(L/K) for K generated by the coefficients.
inline std::vector<std::size_t> fixing_subgroup(const std::vector<EFunction>& fs, std::size_t order = 50) {
  const auto& L = fs[0].field();
  L->require_galois("fixing_subgroup");
  std::vector<std::size_t> H;
  for (std::size_t s = 0; s < L->degree(); ++s) {
    bool fixes = true;
    for (const auto& f : fs) {
      for (std::size_t n = 0; n < order && fixes; ++n) {
        NFElement a = f.coeff(n);
        fixes = a.apply_automorphism(s) == a;
      }
      if (!fixes) break;
    }
    if (fixes) H.push_back(s);
  }
  return H;
}

/// From a relation sum lambda_j f_j(z0) = 0 over L to one over K: normalize
/// lambda_1 = 1, then take traces over Gal(L/K).
inline DescentResult relation_descend(const std::vector<NFElement>& lambda, const std::vector<EFunction>& fs, const NFElement& z0,
                                      long digits = 60, std::optional<std::vector<std::size_t>> subgroup = std::nullopt) {
  require(!fs.empty() && lambda.size() == fs.size(), ErrorCode::InvalidInput, "coefficient and function counts differ");
  require(!lambda[0].is_zero(), ErrorCode::InvalidInput, "the first coefficient must be non-zero to normalize");
  const auto& L = fs[0].field();
  auto H = subgroup ? *subgroup : fixing_subgroup(fs);
  DescentResult out;
  out.index = H.size();
  auto asserted = zero_check([&](long dg) { return linear_form(lambda, fs, z0, dg).value; }, digits);
  out.asserted_value = asserted.value;
  if (asserted.nonzero_certified)
    fail(ErrorCode::AssertedRelationFailsNumerically, "sum lambda_j f_j(z0) is certified non-zero: " + asserted.value.to_string(20));
  NFElement inv = lambda[0].inverse();
  for (const auto& l : lambda) {
    NFElement x = l * inv;
    NFElement tr(L, BigRational(0));
    for (auto s : H) tr += x.apply_automorphism(s);
    out.coeffs.push_back(tr);
  }
  auto desc = zero_check([&](long dg) { return linear_form(out.coeffs, fs, z0, dg).value; }, digits);
  out.descended_value = desc.value;
  if (desc.nonzero_certified)
    fail(ErrorCode::HeuristicCheckFailed, "the descended form is certified non-zero: " + desc.value.to_string(20));
  return out;
}

}  // namespace efunc
