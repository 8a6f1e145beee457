#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "efunc/ball.hpp"
#include "efunc/error.hpp"
#include "efunc/linalg.hpp"
#include "efunc/poly.hpp"
#include "efunc/roots.hpp"

namespace efunc {

class NFElement;

struct FieldOptions {
  /// Brute-force search for automorphism images with integer coordinates of
  /// absolute value <= this bound (0 disables the search).
  int automorphism_search_height = 0;
  mpfr_prec_t root_precision = 128;
  mpfr_prec_t max_precision = 1 << 17;
};

/// K = Q[x]/(minpoly). The distinguished embedding sends theta to roots()[0];
/// roots are ordered by real part, then imaginary part, both descending.
class NumberField : public std::enable_shared_from_this<NumberField> {
 public:
  using Ptr = std::shared_ptr<const NumberField>;

  static Ptr create(const QPoly& minpoly, const std::vector<std::vector<BigRational>>& automorphism_images = {},
                    const FieldOptions& options = {});

  static Ptr rationals() {
    static const Ptr q = create(qpoly({0, 1}));
    return q;
  }

  std::size_t degree() const { return d_; }
  const QPoly& minpoly() const { return minpoly_; }
  bool is_rational_field() const { return d_ == 1; }

  /// Automorphism data; index 0 is always the identity.
  std::size_t automorphism_count() const { return aut_images_.size(); }
  bool is_galois() const { return aut_images_.size() == d_; }
  const std::vector<BigRational>& automorphism_image(std::size_t s) const { return aut_images_.at(s); }
  /// Index of sigma_a o sigma_b.
  std::size_t compose(std::size_t a, std::size_t b) const { return compose_.at(a).at(b); }
  std::size_t inverse(std::size_t a) const { return inverse_.at(a); }
  /// Embedding k with iota_0 o sigma_s = iota_k.
  std::size_t embedding_of(std::size_t s) const { return embedding_of_.at(s); }
  /// Automorphism acting as complex conjugation under iota_0, if present.
  std::optional<std::size_t> complex_conjugation() const { return complex_conj_; }
  void require_galois(const char* what) const {
    require(is_galois(), ErrorCode::NotGalois, std::string(what) + ": field has no full automorphism group");
  }

  /// Isolating balls for the d roots at `prec` bits, in the fixed order.
  std::vector<ComplexBall> roots(mpfr_prec_t prec) const;

  /// Coordinates of theta^k reduced mod minpoly, for k < 2d - 1.
  const std::vector<BigRational>& theta_power(std::size_t k) const { return theta_pows_.at(k); }
  /// Tr(theta^k) for k < d.
  const BigRational& power_trace(std::size_t k) const { return power_traces_.at(k); }

  bool same_as(const NumberField& other) const { return this == &other || minpoly_ == other.minpoly_; }

  /// Minpoly coefficients "c0, c1, ..., 1" as exact rationals.
  std::string minpoly_string() const {
    std::string out;
    for (std::size_t i = 0; i < minpoly_.size(); ++i) {
      if (i) out += ", ";
      out += minpoly_[i].get_str();
    }
    return out;
  }

  /// Reduces a coefficient vector of length <= 2d - 1 modulo minpoly, in place.
  void reduce(std::vector<BigRational>& coeffs) const;

  NumberField(const NumberField&) = delete;
  NumberField& operator=(const NumberField&) = delete;

 private:
  NumberField() = default;

  friend class NFElement;

  QPoly minpoly_;
  std::size_t d_ = 0;
  FieldOptions options_;
  std::vector<std::vector<BigRational>> theta_pows_;
  std::vector<BigRational> power_traces_;
  std::vector<std::vector<BigRational>> aut_images_;
  std::vector<std::vector<std::size_t>> compose_;
  std::vector<std::size_t> inverse_;
  std::vector<std::size_t> embedding_of_;
  std::optional<std::size_t> complex_conj_;

  mutable std::mutex roots_mutex_;
  mutable std::vector<ComplexBall> roots_;
  mutable mpfr_prec_t roots_prec_ = 0;
};

/// Element of a number field in the power basis 1, theta, ..., theta^(d-1).
class NFElement {
 public:
  NFElement() : NFElement(NumberField::rationals(), BigRational(0)) {}
  NFElement(NumberField::Ptr field, const BigRational& q) : field_(std::move(field)), c_(field_->degree(), BigRational(0)) {
    c_[0] = q;
  }
  NFElement(NumberField::Ptr field, std::vector<BigRational> coords) : field_(std::move(field)), c_(std::move(coords)) {
    require(c_.size() <= field_->degree(), ErrorCode::InvalidInput, "too many coordinates for the field degree");
    c_.resize(field_->degree(), BigRational(0));
  }
  NFElement(NumberField::Ptr field, long v) : NFElement(std::move(field), BigRational(v)) {}

  static NFElement generator(const NumberField::Ptr& field) {
    if (field->degree() == 1) return NFElement(field, BigRational(0) - field->minpoly()[0]);
    std::vector<BigRational> c(field->degree(), BigRational(0));
    c[1] = 1;
    return NFElement(field, std::move(c));
  }

  const NumberField::Ptr& field() const { return field_; }
  const std::vector<BigRational>& coords() const { return c_; }
  std::size_t degree() const { return c_.size(); }

  bool is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const BigRational& x) { return sgn(x) == 0; });
  }
  bool is_rational() const {
    return std::all_of(c_.begin() + 1, c_.end(), [](const BigRational& x) { return sgn(x) == 0; });
  }
  const BigRational& rational_part() const { return c_[0]; }
  BigRational to_rational() const {
    require(is_rational(), ErrorCode::RationalityViolation, "element is not rational: " + to_string());
    return c_[0];
  }

  NFElement zero() const { return NFElement(field_, BigRational(0)); }
  NFElement one() const { return NFElement(field_, BigRational(1)); }

  friend NFElement operator+(const NFElement& a, const NFElement& b) {
    check_same(a, b);
    NFElement r = a;
    for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] += b.c_[i];
    return r;
  }
  friend NFElement operator-(const NFElement& a, const NFElement& b) {
    check_same(a, b);
    NFElement r = a;
    for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] -= b.c_[i];
    return r;
  }
  NFElement operator-() const {
    NFElement r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
  }
  friend NFElement operator*(const NFElement& a, const NFElement& b) {
    check_same(a, b);
    const std::size_t d = a.c_.size();
    if (d == 1) return NFElement(a.field_, std::vector<BigRational>{a.c_[0] * b.c_[0]});
    if (b.is_rational()) return a * b.c_[0];
    if (a.is_rational()) return b * a.c_[0];
    std::vector<BigRational> prod(2 * d - 1, BigRational(0));
    for (std::size_t i = 0; i < d; ++i) {
      if (sgn(a.c_[i]) == 0) continue;
      for (std::size_t j = 0; j < d; ++j)
        if (sgn(b.c_[j]) != 0) prod[i + j] += a.c_[i] * b.c_[j];
    }
    a.field_->reduce(prod);
    return NFElement(a.field_, std::move(prod));
  }
  friend NFElement operator*(const NFElement& a, const BigRational& q) {
    NFElement r = a;
    for (auto& x : r.c_) x *= q;
    return r;
  }
  friend NFElement operator*(const BigRational& q, const NFElement& a) { return a * q; }
  friend NFElement operator+(const NFElement& a, const BigRational& q) {
    NFElement r = a;
    r.c_[0] += q;
    return r;
  }
  friend NFElement operator-(const NFElement& a, const BigRational& q) {
    NFElement r = a;
    r.c_[0] -= q;
    return r;
  }
  friend NFElement operator/(const NFElement& a, const NFElement& b) { return a * b.inverse(); }
  friend NFElement operator/(const NFElement& a, const BigRational& q) {
    require(sgn(q) != 0, ErrorCode::DivisionByZero, "division by rational zero");
    NFElement r = a;
    for (auto& x : r.c_) x /= q;
    return r;
  }
  NFElement& operator+=(const NFElement& o) { return *this = *this + o; }
  NFElement& operator-=(const NFElement& o) { return *this = *this - o; }
  NFElement& operator*=(const NFElement& o) { return *this = *this * o; }

  friend bool operator==(const NFElement& a, const NFElement& b) {
    return a.field_->same_as(*b.field_) && a.c_ == b.c_;
  }
  friend bool operator!=(const NFElement& a, const NFElement& b) { return !(a == b); }

  NFElement pow(unsigned long e) const {
    NFElement result = one();
    NFElement base = *this;
    while (e) {
      if (e & 1UL) result = result * base;
      e >>= 1;
      if (e) base = base * base;
    }
    return result;
  }

  NFElement inverse() const {
    require(!is_zero(), ErrorCode::DivisionByZero, "inverse of zero");
    if (is_rational()) return NFElement(field_, BigRational(1) / c_[0]);
    auto [g, u, v] = poly_gcd_ext(as_poly(), field_->minpoly());
    require(g.degree() == 0, ErrorCode::DivisionByZero, "element is a zero divisor (minpoly reducible)");
    return NFElement(field_, padded(u.coeffs()));
  }

  /// Coordinate polynomial a(x) with a(theta) = this.
  QPoly as_poly() const { return QPoly(c_, BigRational(0)); }

  /// Exact Tr_{K/Q}.
  BigRational trace() const {
    BigRational t = 0;
    for (std::size_t i = 0; i < c_.size(); ++i)
      if (sgn(c_[i]) != 0) t += c_[i] * field_->power_trace(i);
    return t;
  }

  /// Matrix of multiplication by this element (columns: images of basis).
  Matrix<BigRational> multiplication_matrix() const {
    const std::size_t d = c_.size();
    Matrix<BigRational> m(d, d, BigRational(0));
    NFElement basis = one();
    NFElement theta = generator(field_);
    for (std::size_t j = 0; j < d; ++j) {
      NFElement img = *this * basis;
      for (std::size_t i = 0; i < d; ++i) m(i, j) = img.c_[i];
      basis = basis * theta;
    }
    return m;
  }

  BigRational norm() const { return determinant(multiplication_matrix()); }

  /// Characteristic polynomial over Q (monic, degree d) via Newton identities.
  QPoly char_poly() const {
    const std::size_t d = c_.size();
    std::vector<BigRational> p(d + 1, BigRational(0));  // power sums
    NFElement pw = one();
    for (std::size_t k = 1; k <= d; ++k) {
      pw = pw * *this;
      p[k] = pw.trace();
    }
    std::vector<BigRational> e(d + 1, BigRational(0));
    e[0] = 1;
    for (std::size_t k = 1; k <= d; ++k) {
      BigRational s = 0;
      for (std::size_t i = 1; i <= k; ++i) {
        BigRational term = e[k - i] * p[i];
        if (i % 2 == 1) s += term; else s -= term;
      }
      e[k] = s / BigRational(static_cast<long>(k));
    }
    std::vector<BigRational> coeffs(d + 1, BigRational(0));
    for (std::size_t k = 0; k <= d; ++k) {
      BigRational v = e[k];
      if (k % 2 == 1) v = -v;
      coeffs[d - k] = v;
    }
    return QPoly(std::move(coeffs), BigRational(0));
  }

  bool is_integral() const {
    auto cp = char_poly();
    for (const auto& c : cp.coeffs())
      if (c.get_den() != 1) return false;
    return true;
  }

  /// Smallest positive integer m with m * this having integer coordinates.
  BigInt coordinate_denominator() const {
    BigInt l = 1;
    for (const auto& c : c_) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
    return l;
  }

  /// iota_k(this) at `prec` bits.
  ComplexBall embed(std::size_t k, mpfr_prec_t prec) const {
    if (is_rational()) return ComplexBall::from_rational(c_[0], prec);
    auto roots = field_->roots(prec + 16);
    return embed_at(roots.at(k), prec);
  }
  std::vector<ComplexBall> conjugates(mpfr_prec_t prec) const {
    std::vector<ComplexBall> out;
    if (is_rational()) {
      for (std::size_t k = 0; k < c_.size(); ++k) out.push_back(ComplexBall::from_rational(c_[0], prec));
      return out;
    }
    auto roots = field_->roots(prec + 16);
    for (const auto& r : roots) out.push_back(embed_at(r, prec));
    return out;
  }

  /// Real ball enclosing max_k |iota_k(this)|; exact for rationals.
  ComplexBall house(mpfr_prec_t prec) const {
    if (is_rational()) return ComplexBall::from_rational(abs(c_[0]), prec);
    auto conj = conjugates(prec);
    BigFloat lo(detail::kRadiusPrecision), hi(detail::kRadiusPrecision);
    for (const auto& b : conj) {
      lo = rnd::max(lo, b.abs_lower());
      hi = rnd::max(hi, b.abs_upper());
    }
    return ball_from_bounds(lo, hi, prec);
  }
  /// Upper bound for the house as a double (for growth heuristics).
  double house_upper_double() const {
    if (is_rational()) return std::abs(c_[0].get_d());
    auto h = house(64);
    return h.abs_upper().to_double(MPFR_RNDU);
  }

  /// Coordinate polynomial evaluated at an arbitrary ball.
  ComplexBall embed_at(const ComplexBall& root, mpfr_prec_t prec) const {
    ComplexBall acc(prec);
    for (std::size_t i = c_.size(); i-- > 0;) acc = acc * root + ComplexBall::from_rational(c_[i], prec);
    return acc;
  }

  NFElement apply_automorphism(std::size_t s) const {
    field_->require_galois("apply_automorphism");
    require(s < field_->automorphism_count(), ErrorCode::InvalidInput, "automorphism index out of range");
    if (s == 0 || is_rational()) return *this;
    NFElement img(field_, field_->automorphism_image(s));
    NFElement acc = zero();
    for (std::size_t i = c_.size(); i-- > 0;) acc = acc * img + c_[i];
    return acc;
  }

  /// Serialized form: a rational for d = 1, "[c0, c1, ...]" otherwise.
  std::string to_string() const {
    if (c_.size() == 1) return c_[0].get_str();
    std::string out = "[";
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (i) out += ", ";
      out += c_[i].get_str();
    }
    return out + "]";
  }

  /// Human-readable form in the generator t, e.g. "1 + 2*t - 1/3*t^2".
  std::string to_t_expression() const {
    std::string out;
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (sgn(c_[i]) == 0) continue;
      BigRational a = abs(c_[i]);
      bool neg = sgn(c_[i]) < 0;
      if (out.empty()) {
        if (neg) out += "-";
      } else {
        out += neg ? " - " : " + ";
      }
      if (i == 0) {
        out += a.get_str();
      } else {
        if (a != 1) out += a.get_str() + "*";
        out += "t";
        if (i > 1) out += "^" + std::to_string(i);
      }
    }
    return out.empty() ? "0" : out;
  }

 private:
  static void check_same(const NFElement& a, const NFElement& b) {
    if (a.field_.get() != b.field_.get() && !a.field_->same_as(*b.field_))
      fail(ErrorCode::FieldMismatch, "elements live in different number fields");
  }
  std::vector<BigRational> padded(const std::vector<BigRational>& v) const {
    std::vector<BigRational> out = v;
    out.resize(field_->degree(), BigRational(0));
    return out;
  }
  NumberField::Ptr field_;
  std::vector<BigRational> c_;
};

inline bool is_zero(const NFElement& x) { return x.is_zero(); }
inline NFElement zero_like(const NFElement& x) { return x.zero(); }
inline NFElement one_like(const NFElement& x) { return x.one(); }

// ---------------------------------------------------------------------------

inline void NumberField::reduce(std::vector<BigRational>& prod) const {
  const std::size_t d = d_;
  for (std::size_t k = d; k < prod.size(); ++k) {
    if (sgn(prod[k]) == 0) continue;
    const auto& red = theta_pows_[k];
    for (std::size_t i = 0; i < d; ++i)
      if (sgn(red[i]) != 0) prod[i] += prod[k] * red[i];
  }
  prod.resize(d);
}

inline NumberField::Ptr NumberField::create(const QPoly& minpoly_in,
                                            const std::vector<std::vector<BigRational>>& automorphism_images,
                                            const FieldOptions& options) {
  require(minpoly_in.degree() >= 1, ErrorCode::InvalidInput, "minimal polynomial must have degree >= 1");
  require(minpoly_in.leading() == 1, ErrorCode::InvalidInput, "minimal polynomial must be monic");
  auto g = poly_gcd(minpoly_in, minpoly_in.derivative());
  require(g.degree() == 0, ErrorCode::NotSquarefree, "minimal polynomial is not squarefree");

  std::shared_ptr<NumberField> K(new NumberField());
  K->minpoly_ = minpoly_in;
  K->d_ = static_cast<std::size_t>(minpoly_in.degree());
  K->options_ = options;
  const std::size_t d = K->d_;

  // theta^k mod minpoly for k < 2d - 1.
  K->theta_pows_.assign(std::max<std::size_t>(2 * d - 1, 1), std::vector<BigRational>(d, BigRational(0)));
  if (d == 1) {
    K->theta_pows_[0][0] = 1;
  } else {
    for (std::size_t k = 0; k < d; ++k) K->theta_pows_[k][k] = 1;
    for (std::size_t k = d; k < 2 * d - 1; ++k) {
      // theta * theta^(k-1), with theta^d = -sum m_i theta^i.
      const auto& prev = K->theta_pows_[k - 1];
      std::vector<BigRational> next(d, BigRational(0));
      for (std::size_t i = 0; i + 1 < d; ++i) next[i + 1] = prev[i];
      const BigRational& top = prev[d - 1];
      for (std::size_t i = 0; i < d; ++i) next[i] -= top * minpoly_in[i];
      K->theta_pows_[k] = std::move(next);
    }
  }
  // Newton identities: power sums of the roots.
  K->power_traces_.assign(d, BigRational(0));
  K->power_traces_[0] = static_cast<long>(d);
  for (std::size_t k = 1; k < d; ++k) {
    // p_k + e-terms: p_k = -k m_{d-k} - sum_{i=1}^{k-1} m_{d-i} p_{k-i}
    BigRational s = -BigRational(static_cast<long>(k)) * minpoly_in[d - k];
    for (std::size_t i = 1; i < k; ++i) s -= minpoly_in[d - i] * K->power_traces_[k - i];
    K->power_traces_[k] = s;
  }

  Ptr field = K;
  // Candidate automorphisms: identity first, then supplied or searched images.
  std::vector<std::vector<BigRational>> candidates;
  std::vector<BigRational> id(d, BigRational(0));
  if (d == 1) {
    id[0] = -minpoly_in[0];
  } else {
    id[1] = 1;
  }
  candidates.push_back(id);
  auto is_root = [&](const std::vector<BigRational>& img) {
    NFElement s(field, img);
    NFElement acc = s.zero();
    for (std::size_t i = minpoly_in.size(); i-- > 0;) acc = acc * s + minpoly_in[i];
    return acc.is_zero();
  };
  auto add_candidate = [&](std::vector<BigRational> img) {
    img.resize(d, BigRational(0));
    if (std::find(candidates.begin(), candidates.end(), img) == candidates.end()) candidates.push_back(std::move(img));
  };
  for (const auto& img : automorphism_images) {
    require(img.size() <= d, ErrorCode::AutomorphismInvalid, "automorphism image has too many coordinates");
    std::vector<BigRational> v = img;
    v.resize(d, BigRational(0));
    require(is_root(v), ErrorCode::AutomorphismInvalid, "minpoly(s(theta)) is not zero mod minpoly");
    add_candidate(v);
  }
  if (options.automorphism_search_height > 0 && d > 1 && candidates.size() < d) {
    const long h = options.automorphism_search_height;
    std::vector<long> digits(d, -h);
    while (candidates.size() < d) {
      std::vector<BigRational> v;
      for (long x : digits) v.emplace_back(x);
      if (is_root(v)) add_candidate(v);
      std::size_t pos = 0;
      while (pos < d && ++digits[pos] > h) digits[pos++] = -h;
      if (pos == d) break;
    }
  }
  const std::size_t n = candidates.size();
  require(n <= d, ErrorCode::AutomorphismInvalid, "more automorphisms than the field degree");
  K->aut_images_ = candidates;

  // Composition table: (a o b)(theta) = b's image polynomial evaluated at a(theta).
  auto apply = [&](std::size_t a, const std::vector<BigRational>& x) {
    NFElement img(field, candidates[a]);
    NFElement acc(field, BigRational(0));
    for (std::size_t i = d; i-- > 0;) acc = acc * img + x[i];
    return acc.coords();
  };
  K->compose_.assign(n, std::vector<std::size_t>(n, 0));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      auto c = d == 1 ? candidates[0] : apply(a, candidates[b]);
      auto it = std::find(candidates.begin(), candidates.end(), c);
      require(it != candidates.end(), ErrorCode::AutomorphismInvalid, "automorphism set is not closed under composition");
      K->compose_[a][b] = static_cast<std::size_t>(it - candidates.begin());
    }
  K->inverse_.assign(n, 0);
  for (std::size_t a = 0; a < n; ++a) {
    bool found = false;
    for (std::size_t b = 0; b < n && !found; ++b)
      if (K->compose_[a][b] == 0) {
        K->inverse_[a] = b;
        found = true;
      }
    require(found, ErrorCode::AutomorphismInvalid, "automorphism has no inverse in the set");
  }

  // Roots and the automorphism -> embedding correspondence.
  auto roots = K->roots(options.root_precision);
  K->embedding_of_.assign(n, 0);
  for (std::size_t s = 0; s < n; ++s) {
    NFElement img(field, candidates[s]);
    ComplexBall v = d == 1 ? roots[0] : img.embed_at(roots[0], options.root_precision);
    std::size_t hits = 0;
    for (std::size_t k = 0; k < d; ++k)
      if (v.overlaps(roots[k])) {
        K->embedding_of_[s] = k;
        ++hits;
      }
    if (hits != 1) fail(ErrorCode::RootIsolationFailure, "could not match automorphism to an embedding");
  }
  if (roots[0].may_be_real() && roots[0].mid_im().is_zero()) {
    K->complex_conj_ = 0;
  } else {
    ComplexBall c = roots[0].conj();
    for (std::size_t s = 0; s < n; ++s)
      if (c.overlaps(roots[K->embedding_of_[s]])) K->complex_conj_ = s;
  }
  return field;
}

inline std::vector<ComplexBall> NumberField::roots(mpfr_prec_t prec) const {
  std::lock_guard<std::mutex> lock(roots_mutex_);
  if (roots_prec_ >= prec && !roots_.empty()) return roots_;
  const QPoly& m = minpoly_;
  RootIsolator iso(
      [&m](mpfr_prec_t p) {
        std::vector<ComplexBall> c;
        for (const auto& x : m.coeffs()) c.push_back(ComplexBall::from_rational(x, p));
        return c;
      },
      d_, true, options_.max_precision);
  const mpfr_prec_t target = std::max(prec, roots_prec_ * 2);
  if (roots_.empty()) {
    roots_ = iso.isolate(target);
    sort_roots(roots_);
  } else {
    auto refined = iso.isolate(target, &roots_);
    for (std::size_t k = 0; k < d_; ++k)
      if (!refined[k].overlaps(roots_[k])) fail(ErrorCode::RootIsolationFailure, "root refinement lost track of a root");
    roots_ = std::move(refined);
  }
  roots_prec_ = target;
  return roots_;
}

// ---------------------------------------------------------------------------

/// Matrix whose row s holds the coordinates of sigma_s(alpha).
inline Matrix<BigRational> conjugate_coordinate_matrix(const NFElement& alpha) {
  const auto& K = alpha.field();
  K->require_galois("conjugate matrix");
  const std::size_t d = K->degree();
  Matrix<BigRational> m(d, d, BigRational(0));
  for (std::size_t s = 0; s < d; ++s) {
    auto img = alpha.apply_automorphism(s);
    for (std::size_t j = 0; j < d; ++j) m(s, j) = img.coords()[j];
  }
  return m;
}

inline bool is_normal_basis(const NFElement& alpha) {
  return sgn(determinant(conjugate_coordinate_matrix(alpha))) != 0;
}

/// An integral alpha whose conjugates form a Q-basis. Tries 1 + theta + ...
/// + theta^(d-1) first, then a bounded systematic search over small integer
/// coordinates.
inline NFElement normal_basis_element(const NumberField::Ptr& K, long search_height = 3) {
  K->require_galois("normal_basis_element");
  const std::size_t d = K->degree();
  if (d == 1) return NFElement(K, BigRational(1));
  auto make_integral = [](NFElement a) {
    while (!a.is_integral()) {
      auto cp = a.char_poly();
      BigInt l = 1;
      for (const auto& c : cp.coeffs()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
      a = a * BigRational(l);
    }
    return a;
  };
  std::vector<BigRational> c(d, BigRational(1));
  NFElement first(K, c);
  if (is_normal_basis(first)) return make_integral(first);
  std::vector<long> digits(d, -search_height);
  while (true) {
    std::vector<BigRational> v;
    for (long x : digits) v.emplace_back(x);
    NFElement cand(K, v);
    if (!cand.is_zero() && is_normal_basis(cand)) return make_integral(cand);
    std::size_t pos = 0;
    while (pos < d && ++digits[pos] > search_height) digits[pos++] = -search_height;
    if (pos == d) break;
  }
  fail(ErrorCode::SearchExhausted, "no normal basis element with coordinates up to the search height");
}

}  // namespace efunc
