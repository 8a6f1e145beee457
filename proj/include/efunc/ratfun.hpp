#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "efunc/error.hpp"
#include "efunc/linalg.hpp"
#include "efunc/number_field.hpp"
#include "efunc/poly.hpp"

namespace efunc {

using Poly = DensePoly<NFElement>;

template <class T>
bool is_zero(const DensePoly<T>& p) {
  return p.is_zero();
}
template <class T>
DensePoly<T> zero_like(const DensePoly<T>& p) {
  return DensePoly<T>(p.zero());
}
template <class T>
DensePoly<T> one_like(const DensePoly<T>& p) {
  return DensePoly<T>::constant(p.one());
}

inline Poly poly_zero(const NumberField::Ptr& K) { return Poly(NFElement(K, BigRational(0))); }
inline Poly poly_const(const NFElement& c) { return Poly::constant(c); }
inline Poly poly_z(const NumberField::Ptr& K) { return Poly::monomial(NFElement(K, BigRational(1)), 1); }

/// Polynomial over Q lifted into K[z].
inline Poly lift_poly(const QPoly& p, const NumberField::Ptr& K) {
  std::vector<NFElement> c;
  for (const auto& x : p.coeffs()) c.emplace_back(K, x);
  return Poly(std::move(c), NFElement(K, BigRational(0)));
}

/// Coefficientwise automorphism.
inline Poly apply_automorphism(const Poly& p, std::size_t s) {
  return p.map_coeffs([s](const NFElement& x) { return x.apply_automorphism(s); });
}

/// Multiplicity of z - alpha in p (p non-zero).
inline std::size_t root_multiplicity(Poly p, const NFElement& alpha) {
  if (p.is_zero()) return 0;
  Poly lin = Poly::linear_root(alpha);
  std::size_t k = 0;
  while (true) {
    auto [q, r] = Poly::divmod(p, lin);
    if (!r.is_zero()) return k;
    p = std::move(q);
    ++k;
  }
}

/// Reduced rational function num/den with den monic.
class RatFun {
 public:
  RatFun() : num_(poly_zero(NumberField::rationals())), den_(Poly::constant(num_.one())) {}
  explicit RatFun(Poly num) : num_(std::move(num)), den_(Poly::constant(num_.one())) {}
  RatFun(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) { normalize(); }
  explicit RatFun(const NFElement& c) : RatFun(Poly::constant(c)) {}

  static RatFun constant(const NFElement& c) { return RatFun(Poly::constant(c)); }
  static RatFun z(const NumberField::Ptr& K) { return RatFun(poly_z(K)); }

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  const NumberField::Ptr& field() const { return num_.zero().field(); }
  NFElement zero_elem() const { return num_.zero(); }

  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.degree() == 0; }
  bool is_constant() const { return is_polynomial() && num_.degree() <= 0; }

  friend RatFun operator+(const RatFun& a, const RatFun& b) {
    if (a.is_polynomial() && b.is_polynomial()) return RatFun(a.num_ + b.num_);
    if (a.den_ == b.den_) return RatFun(a.num_ + b.num_, a.den_);
    return RatFun(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend RatFun operator-(const RatFun& a, const RatFun& b) {
    if (a.is_polynomial() && b.is_polynomial()) return RatFun(a.num_ - b.num_);
    if (a.den_ == b.den_) return RatFun(a.num_ - b.num_, a.den_);
    return RatFun(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
  }
  RatFun operator-() const {
    RatFun r = *this;
    r.num_ = -r.num_;
    return r;
  }
  friend RatFun operator*(const RatFun& a, const RatFun& b) {
    if (a.is_zero() || b.is_zero()) return RatFun(poly_zero(a.field()));
    if (a.is_polynomial() && b.is_polynomial()) return RatFun(a.num_ * b.num_);
    return RatFun(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend RatFun operator*(const RatFun& a, const NFElement& c) {
    RatFun r = a;
    r.num_ = r.num_ * c;
    return r;
  }
  friend RatFun operator/(const RatFun& a, const RatFun& b) {
    require(!b.is_zero(), ErrorCode::DivisionByZeroPolynomial, "division by the zero rational function");
    return RatFun(a.num_ * b.den_, a.den_ * b.num_);
  }
  friend bool operator==(const RatFun& a, const RatFun& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend bool operator!=(const RatFun& a, const RatFun& b) { return !(a == b); }

  RatFun pow(long e) const {
    if (e < 0) return RatFun::constant(num_.one()) / pow(-e);
    RatFun result = RatFun::constant(num_.one());
    RatFun base = *this;
    while (e) {
      if (e & 1) result = result * base;
      e >>= 1;
      if (e) base = base * base;
    }
    return result;
  }

  RatFun derivative() const {
    if (is_polynomial()) return RatFun(num_.derivative());
    return RatFun(num_.derivative() * den_ - num_ * den_.derivative(), den_ * den_);
  }

  /// Value at alpha; the caller ensures alpha is not a pole.
  NFElement eval(const NFElement& alpha) const {
    NFElement d = den_.eval(alpha);
    require(!d.is_zero(), ErrorCode::DivisionByZero, "rational function evaluated at a pole");
    return num_.eval(alpha) / d;
  }

  RatFun apply_automorphism(std::size_t s) const {
    return RatFun(efunc::apply_automorphism(num_, s), efunc::apply_automorphism(den_, s));
  }

  /// Order of alpha as a pole (0 when not a pole).
  std::size_t pole_order(const NFElement& alpha) const { return root_multiplicity(den_, alpha); }

  std::string to_string() const;

 private:
  void normalize() {
    require(!den_.is_zero(), ErrorCode::DivisionByZeroPolynomial, "rational function with zero denominator");
    if (num_.is_zero()) {
      den_ = Poly::constant(den_.one());
      return;
    }
    if (den_.degree() > 0) {
      Poly g = poly_gcd(num_, den_);
      if (g.degree() > 0) {
        num_ = num_ / g;
        den_ = den_ / g;
      }
    }
    NFElement lead = den_.leading();
    if (lead != lead.one()) {
      NFElement inv = lead.inverse();
      num_ = num_ * inv;
      den_ = den_ * inv;
    }
  }

  Poly num_;
  Poly den_;
};

inline bool is_zero(const RatFun& r) { return r.is_zero(); }
inline RatFun zero_like(const RatFun& r) { return RatFun(poly_zero(r.field())); }
inline RatFun one_like(const RatFun& r) { return RatFun::constant(r.zero_elem().one()); }

using RatMatrix = Matrix<RatFun>;

inline RatMatrix rat_identity(std::size_t n, const NumberField::Ptr& K) {
  return RatMatrix::identity(n, RatFun(poly_zero(K)));
}

inline RatMatrix derivative(const RatMatrix& m) {
  return m.map([](const RatFun& r) { return r.derivative(); });
}

/// Monic lcm of all entry denominators.
inline Poly common_denominator(const RatMatrix& m) {
  Poly l = Poly::constant(m(0, 0).zero_elem().one());
  for (const auto& r : m.data()) {
    if (r.is_polynomial()) continue;
    Poly g = poly_gcd(l, r.den());
    l = l * (r.den() / g);
  }
  return l.monic();
}

/// Maximal pole order of alpha over the entries.
inline std::size_t max_pole_order(const RatMatrix& m, const NFElement& alpha) {
  std::size_t k = 0;
  for (const auto& r : m.data()) k = std::max(k, r.pole_order(alpha));
  return k;
}

/// Total degree of the common denominator after removing powers of z: the
/// pole mass outside z = 0.
inline std::size_t nonzero_pole_degree(const RatMatrix& m) {
  Poly l = common_denominator(m);
  return static_cast<std::size_t>(l.degree()) - l.valuation();
}

/// Integer matrix of polynomials -> RatMatrix.
inline RatMatrix to_rat_matrix(const Matrix<Poly>& m) {
  return m.map([](const Poly& p) { return RatFun(p); });
}

// ---------------------------------------------------------------------------

namespace detail {

inline Matrix<Poly> complete_rec(const std::vector<Poly>& row) {
  const std::size_t n = row.size();
  const Poly zero(row[0].zero());
  const Poly one = Poly::constant(row[0].one());
  Matrix<Poly> S(n, n, zero);
  if (n == 1) {
    require(row[0] == one, ErrorCode::NotCoprime, "a 1x1 completion with determinant 1 needs the row (1)");
    S(0, 0) = one;
    return S;
  }
  // h = gcd(P_1, ..., P_{n-1}); for n = 2 take h = P_1 so that Q = (1).
  Poly h = zero;
  for (std::size_t i = 0; i + 1 < n; ++i) h = h.is_zero() ? row[i] : poly_gcd(h, row[i]);
  const Poly& last = row[n - 1];
  if (h.is_zero()) {
    require(last.degree() == 0, ErrorCode::NotCoprime, "row entries are not coprime");
    // (0, ..., 0, c) completed by a signed permutation.
    S(0, n - 1) = last;
    for (std::size_t i = 1; i + 1 < n; ++i) S(i, i) = one;
    S(n - 1, 0) = Poly::constant(zero.zero() - last.leading().inverse());
    return S;
  }
  if (n == 2) h = row[0];
  auto [g, u, v] = poly_gcd_ext(h, last);
  require(g.degree() == 0, ErrorCode::NotCoprime, "row entries are not coprime");
  std::vector<Poly> q;
  for (std::size_t i = 0; i + 1 < n; ++i) q.push_back(row[i] / h);
  Matrix<Poly> Sp = complete_rec(q);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    S(0, j) = row[j];
    for (std::size_t i = 1; i + 1 < n; ++i) S(i, j) = Sp(i, j);
    S(n - 1, j) = -(v * q[j]);
  }
  S(0, n - 1) = last;
  S(n - 1, n - 1) = u;
  return S;
}

}  // namespace detail

/// Square polynomial matrix with first row `row` and determinant exactly 1.
inline Matrix<Poly> unimodular_complete(const std::vector<Poly>& row) {
  require(!row.empty(), ErrorCode::InvalidInput, "unimodular completion of an empty row");
  Poly g(row[0].zero());
  for (const auto& p : row) g = g.is_zero() ? p.monic() : poly_gcd(g, p);
  require(!g.is_zero() && g.degree() == 0, ErrorCode::NotCoprime, "row entries are not coprime");
  return detail::complete_rec(row);
}

namespace detail {

// Gaussian elimination on balls with largest-magnitude pivoting; nullopt when
// a pivot ball contains zero.
inline std::optional<std::vector<ComplexBall>> ball_solve(Matrix<ComplexBall> a, std::vector<ComplexBall> b) {
  const std::size_t n = a.rows();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t best = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (a(r, c).abs_mid() > a(best, c).abs_mid()) best = r;
    if (a(best, c).contains_zero()) return std::nullopt;
    if (best != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(best, j), a(c, j));
      std::swap(b[best], b[c]);
    }
    ComplexBall inv = a(c, c).inverse();
    for (std::size_t r = c + 1; r < n; ++r) {
      ComplexBall f = a(r, c) * inv;
      for (std::size_t j = c; j < n; ++j) a(r, j) = a(r, j) - f * a(c, j);
      b[r] = b[r] - f * b[c];
    }
  }
  std::vector<ComplexBall> x(n, ComplexBall(b[0].precision()));
  for (std::size_t i = n; i-- > 0;) {
    ComplexBall acc = b[i];
    for (std::size_t j = i + 1; j < n; ++j) acc = acc - a(i, j) * x[j];
    x[i] = acc / a(i, i);
  }
  return x;
}

}  // namespace detail

// ---------------------------------------------------------------------------

/// Squarefree part p / gcd(p, p').
inline Poly squarefree_part(const Poly& p) {
  if (p.degree() <= 0) return p;
  Poly g = poly_gcd(p, p.derivative());
  return g.degree() > 0 ? p / g : p;
}

/// All distinct roots of p that lie in K. A root alpha in K gives, in every
/// embedding k, a root of the conjugated polynomial iota_k(p); tuples of such
/// numeric roots are solved for power-basis coordinates, rounded to the
/// simplest rationals and verified exactly. Precision doubles until every
/// root is accounted for or `max_prec` is reached.
inline std::vector<NFElement> roots_in_field(const Poly& p_in, mpfr_prec_t max_prec = 2048) {
  require(!p_in.is_zero(), ErrorCode::InvalidInput, "roots of the zero polynomial");
  const NumberField::Ptr K = p_in.zero().field();
  Poly p = squarefree_part(p_in).monic();
  std::vector<NFElement> found;
  if (p.degree() <= 0) return found;
  if (p.degree() == 1) return {-p[0]};
  const std::size_t d = K->degree();
  const std::size_t n = static_cast<std::size_t>(p.degree());
  auto add = [&](const NFElement& a) {
    if (std::find(found.begin(), found.end(), a) == found.end()) found.push_back(a);
  };
  for (mpfr_prec_t prec = 128; prec <= max_prec && found.size() < n; prec *= 2) {
    std::vector<std::vector<ComplexBall>> per_embedding;
    for (std::size_t k = 0; k < d; ++k) {
      RootIsolator iso(
          [&p, k](mpfr_prec_t q) {
            std::vector<ComplexBall> c;
            for (const auto& x : p.coeffs()) c.push_back(x.embed(k, q));
            return c;
          },
          n, K->is_rational_field(), std::max(max_prec, prec));
      per_embedding.push_back(iso.isolate(prec));
    }
    auto theta = K->roots(prec);
    // Vandermonde in the embeddings of theta.
    std::vector<std::size_t> idx(d, 0);
    while (true) {
      std::vector<BigRational> coords;
      bool ok = true;
      if (d == 1) {
        const ComplexBall& r = per_embedding[0][idx[0]];
        if (!r.may_be_real()) ok = false;
        else {
          auto iv = r.real_interval();
          coords.push_back(simplest_rational_in(iv.lo, iv.hi));
        }
      } else {
        Matrix<ComplexBall> V(d, d, ComplexBall(prec));
        std::vector<ComplexBall> rhs;
        for (std::size_t k = 0; k < d; ++k) {
          ComplexBall pw = ComplexBall::from_integer(1, prec);
          for (std::size_t j = 0; j < d; ++j) {
            V(k, j) = pw;
            pw = pw * theta[k];
          }
          rhs.push_back(per_embedding[k][idx[k]]);
        }
        auto x = detail::ball_solve(V, rhs);
        if (!x) ok = false;
        for (std::size_t j = 0; ok && j < d; ++j) {
          if (!(*x)[j].may_be_real()) {
            ok = false;
            break;
          }
          auto iv = (*x)[j].real_interval();
          coords.push_back(simplest_rational_in(iv.lo, iv.hi));
        }
      }
      if (ok) {
        NFElement cand(K, coords);
        if (p.eval(cand).is_zero()) add(cand);
      }
      std::size_t pos = 0;
      while (pos < d && ++idx[pos] == n) idx[pos++] = 0;
      if (pos == d) break;
    }
  }
  return found;
}

}  // namespace efunc
