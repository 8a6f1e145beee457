#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "efunc/error.hpp"
#include "efunc/linalg.hpp"
#include "efunc/number_field.hpp"
#include "efunc/ratfun.hpp"

namespace efunc {

/// n! from a process-wide cache.
inline BigInt factorial(std::size_t n) {
  static std::mutex m;
  static std::vector<BigInt> cache{BigInt(1)};
  std::lock_guard<std::mutex> lock(m);
  while (cache.size() <= n) cache.push_back(cache.back() * static_cast<unsigned long>(cache.size()));
  return cache[n];
}

inline BigInt binomial(unsigned long n, unsigned long k) {
  BigInt r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

/// Lazily extended table of coefficient rows (one entry per component).
/// Extension is serialized; reading a computed prefix takes a shared lock.
class CoefficientStream {
 public:
  using Row = std::vector<NFElement>;
  using Step = std::function<Row(std::size_t n, const std::vector<Row>& prefix)>;

  CoefficientStream(std::size_t width, Step step) : width_(width), step_(std::move(step)) {}

  std::size_t width() const { return width_; }

  NFElement at(std::size_t n, std::size_t component) {
    ensure(n + 1);
    std::shared_lock lock(mutex_);
    return rows_[n][component];
  }
  Row row(std::size_t n) {
    ensure(n + 1);
    std::shared_lock lock(mutex_);
    return rows_[n];
  }
  std::vector<NFElement> column(std::size_t component, std::size_t count) {
    ensure(count);
    std::shared_lock lock(mutex_);
    std::vector<NFElement> out;
    out.reserve(count);
    for (std::size_t n = 0; n < count; ++n) out.push_back(rows_[n][component]);
    return out;
  }

 private:
  void ensure(std::size_t count) {
    {
      std::shared_lock lock(mutex_);
      if (rows_.size() >= count) return;
    }
    std::unique_lock lock(mutex_);
    while (rows_.size() < count) {
      Row r = step_(rows_.size(), rows_);
      require(r.size() == width_, ErrorCode::InvalidInput, "stream step returned a row of the wrong width");
      rows_.push_back(std::move(r));
    }
  }

  std::size_t width_;
  Step step_;
  std::shared_mutex mutex_;
  std::vector<Row> rows_;
};

/// |iota(a_n)| <= scale * rate^n for every embedding iota and every n.
struct CoefficientBound {
  BigRational scale;
  BigRational rate;
};

/// Rational upper bound for house(a).
inline BigRational house_upper_rational(const NFElement& a) {
  if (a.is_rational()) return abs(a.rational_part());
  return a.house(128).abs_upper().to_rational();
}

// ---------------------------------------------------------------------------

/// f' = A f with A an N x N matrix over K(z).
class DifferentialSystem {
 public:
  DifferentialSystem(NumberField::Ptr field, RatMatrix a) : K_(std::move(field)), A_(std::move(a)) {
    require(A_.square() && A_.rows() > 0, ErrorCode::InvalidInput, "system matrix must be square and non-empty");
  }
  const NumberField::Ptr& field() const { return K_; }
  const RatMatrix& matrix() const { return A_; }
  std::size_t dim() const { return A_.rows(); }
  const RatFun& operator()(std::size_t i, std::size_t j) const { return A_(i, j); }

  /// Monic lcm of entry denominators; its roots are the finite singularities.
  Poly denominator() const { return common_denominator(A_); }

  std::string to_string() const {
    std::string out;
    for (std::size_t i = 0; i < dim(); ++i) {
      for (std::size_t j = 0; j < dim(); ++j) {
        if (j) out += ", ";
        out += A_(i, j).to_string();
      }
      out += "\n";
    }
    return out;
  }

 private:
  NumberField::Ptr K_;
  RatMatrix A_;
};

/// Coefficient recurrence of f' = A f. With L the monic lcm of denominators
/// and A~ = L A = sum_k A~_k z^k, matching z^m in L f' = A~ f gives
///   sum_k l_k (m-k+1) c_{m-k+1} - sum_k A~_k c_{m-k} = 0
/// for Taylor coefficient vectors c_n. The largest index occurring is
/// t = m + shift, multiplied by the matrix M_t.
class Recurrence {
 public:
  explicit Recurrence(const DifferentialSystem& sys) : K_(sys.field()), n_(sys.dim()) {
    const auto& A = sys.matrix();
    Poly L = sys.denominator();
    for (const auto& c : L.coeffs()) l_.push_back(c);
    std::size_t max_deg = 0;
    std::vector<Poly> entries;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) {
        const RatFun& r = A(i, j);
        Poly p = r.is_zero() ? poly_zero(K_) : r.num() * (L / r.den());
        max_deg = std::max<std::size_t>(max_deg, p.is_zero() ? 0 : static_cast<std::size_t>(p.degree()));
        entries.push_back(std::move(p));
      }
    const NFElement zero(K_, BigRational(0));
    at_.assign(max_deg + 1, Matrix<NFElement>(n_, n_, zero));
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) {
        const Poly& p = entries[i * n_ + j];
        for (std::size_t k = 0; k < p.size(); ++k) at_[k](i, j) = p[k];
      }
    v_ = L.valuation();
    for (std::size_t k = 0; k < at_.size(); ++k)
      if (!at_[k].is_zero_matrix()) {
        kappa_ = k;
        break;
      }
    const long lhs_top = 1 - static_cast<long>(v_);
    const long rhs_top = kappa_ ? -static_cast<long>(*kappa_) : lhs_top - 1;
    shift_ = std::max(lhs_top, rhs_top);
    lhs_leads_ = lhs_top >= rhs_top;
    rhs_leads_ = kappa_ && rhs_top >= lhs_top;
    if (!lhs_leads_) {
      // M_t = -A~_kappa for every t: forward solving needs it invertible.
      if (!inverse(at_[*kappa_]))
        fail(ErrorCode::ZeroIsIrregular, "z = 0 is an irregular point: the recurrence cannot be solved forward");
    }
    find_singular_indices();
  }

  std::size_t dim() const { return n_; }
  long shift() const { return shift_; }
  /// Indices t where M_t is singular (must be covered by seeds).
  const std::vector<std::size_t>& singular_indices() const { return singular_; }
  /// Smallest admissible number of Taylor seeds per component.
  std::size_t required_seeds() const {
    std::size_t r = static_cast<std::size_t>(std::max<long>(shift_, 0));
    for (auto t : singular_) r = std::max(r, t + 1);
    return r;
  }

  Matrix<NFElement> leading_matrix(std::size_t t) const {
    const NFElement zero(K_, BigRational(0));
    Matrix<NFElement> M(n_, n_, zero);
    if (lhs_leads_) {
      NFElement s = l_[v_] * BigRational(static_cast<long>(t));
      for (std::size_t i = 0; i < n_; ++i) M(i, i) = s;
    }
    if (rhs_leads_) M = M - at_[*kappa_];
    return M;
  }

  /// Residual vector of equation E_m (top index t = m + shift), using c for
  /// indices < t and `top` (or zero) for index t.
  std::vector<NFElement> residual(std::size_t t, const std::vector<std::vector<NFElement>>& c,
                                  const std::vector<NFElement>* top) const {
    const long m = static_cast<long>(t) - shift_;
    const NFElement zero(K_, BigRational(0));
    std::vector<NFElement> r(n_, zero);
    auto coeff = [&](long idx) -> const std::vector<NFElement>* {
      if (idx < 0) return nullptr;
      if (static_cast<std::size_t>(idx) == t) return top;
      return &c[static_cast<std::size_t>(idx)];
    };
    for (std::size_t k = 0; k < l_.size(); ++k) {
      if (l_[k].is_zero()) continue;
      const long idx = m - static_cast<long>(k) + 1;
      const auto* v = coeff(idx);
      if (!v || idx == 0) continue;
      NFElement f = l_[k] * BigRational(idx);
      for (std::size_t i = 0; i < n_; ++i) r[i] += f * (*v)[i];
    }
    for (std::size_t k = 0; k < at_.size(); ++k) {
      const long idx = m - static_cast<long>(k);
      const auto* v = coeff(idx);
      if (!v) continue;
      const auto& Ak = at_[k];
      for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
          if (!Ak(i, j).is_zero() && !(*v)[j].is_zero()) r[i] -= Ak(i, j) * (*v)[j];
    }
    return r;
  }

  /// c_t from c_0..c_{t-1}, for non-singular t >= shift.
  std::vector<NFElement> solve_next(std::size_t t, const std::vector<std::vector<NFElement>>& c) const {
    auto r = residual(t, c, nullptr);
    for (auto& x : r) x = -x;
    Matrix<NFElement> M = leading_matrix(t);
    bool diagonal = true;
    for (std::size_t i = 0; i < n_ && diagonal; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        if (i != j && !M(i, j).is_zero()) {
          diagonal = false;
          break;
        }
    if (diagonal) {
      for (std::size_t i = 0; i < n_; ++i) r[i] = r[i] / M(i, i);
      return r;
    }
    auto x = solve(M, r);
    require(x.has_value(), ErrorCode::InsufficientSeeds, "singular recurrence step at index " + std::to_string(t));
    return *x;
  }

 private:
  void find_singular_indices() {
    if (!lhs_leads_) return;
    const std::size_t lo = static_cast<std::size_t>(std::max<long>(shift_, 0));
    if (!rhs_leads_) {
      if (lo == 0) singular_.push_back(0);
      return;
    }
    // Integer eigenvalues t of A~_kappa / l_v satisfy |t| <= sum of entry houses.
    BigRational bound = 0;
    NFElement inv = l_[v_].inverse();
    for (const auto& x : at_[*kappa_].data()) bound += house_upper_rational(x * inv);
    BigInt top;
    mpz_fdiv_q(top.get_mpz_t(), bound.get_num_mpz_t(), bound.get_den_mpz_t());
    const std::size_t hi = static_cast<std::size_t>(top.get_ui()) + 1;
    for (std::size_t t = lo; t <= hi; ++t)
      if (determinant(leading_matrix(t)).is_zero()) singular_.push_back(t);
  }

  NumberField::Ptr K_;
  std::size_t n_;
  std::vector<NFElement> l_;
  std::vector<Matrix<NFElement>> at_;
  std::size_t v_ = 0;
  std::optional<std::size_t> kappa_;
  long shift_ = 0;
  bool lhs_leads_ = true;
  bool rhs_leads_ = false;
  std::vector<std::size_t> singular_;
};

// ---------------------------------------------------------------------------

class EVector;

/// f = sum a_n z^n / n! with a_n in K. Backed either by a component of an
/// EVector (a solution of a differential system) or by an explicit stream.
class EFunction {
 public:
  EFunction(NumberField::Ptr field, std::shared_ptr<CoefficientStream> stream, std::size_t component = 0,
            std::optional<CoefficientBound> bound = std::nullopt)
      : K_(std::move(field)), stream_(std::move(stream)), comp_(component), bound_(std::move(bound)) {}

  /// Stream given by a generator n -> a_n.
  static EFunction explicit_stream(NumberField::Ptr field, std::function<NFElement(std::size_t)> gen,
                                   std::optional<CoefficientBound> bound = std::nullopt) {
    auto st = std::make_shared<CoefficientStream>(
        1, [gen = std::move(gen)](std::size_t n, const std::vector<CoefficientStream::Row>&) {
          return CoefficientStream::Row{gen(n)};
        });
    return EFunction(std::move(field), std::move(st), 0, std::move(bound));
  }

  /// Polynomial p(z) as an E-function (a_n = n! p_n).
  static EFunction polynomial(const Poly& p) {
    const auto K = p.zero().field();
    EFunction f = explicit_stream(K, [p](std::size_t n) {
      return p[n] * BigRational(factorial(n));
    });
    f.poly_ = p;
    BigRational k = 0;
    for (std::size_t i = 0; i < p.size(); ++i) k += house_upper_rational(p[i]) * BigRational(factorial(i));
    f.bound_ = CoefficientBound{k, BigRational(1)};
    return f;
  }

  const NumberField::Ptr& field() const { return K_; }
  NFElement coeff(std::size_t n) const { return stream_->at(n, comp_); }
  std::vector<NFElement> coeffs(std::size_t count) const { return stream_->column(comp_, count); }
  /// Taylor coefficient a_n / n!.
  NFElement taylor(std::size_t n) const { return coeff(n) / BigRational(factorial(n)); }
  std::vector<NFElement> taylor_coeffs(std::size_t count) const {
    auto a = coeffs(count);
    for (std::size_t n = 0; n < count; ++n) a[n] = a[n] / BigRational(factorial(n));
    return a;
  }

  const std::optional<CoefficientBound>& bound() const { return bound_; }
  void set_bound(std::optional<CoefficientBound> b) { bound_ = std::move(b); }
  const std::optional<Poly>& as_polynomial() const { return poly_; }

  bool has_system() const { return static_cast<bool>(vec_); }
  const EVector& evector() const;
  std::size_t index() const { return comp_; }

  const std::shared_ptr<CoefficientStream>& stream() const { return stream_; }

 private:
  friend class EVector;
  NumberField::Ptr K_;
  std::shared_ptr<CoefficientStream> stream_;
  std::size_t comp_;
  std::optional<CoefficientBound> bound_;
  std::optional<Poly> poly_;
  std::shared_ptr<const EVector> vec_;
};

/// Solution vector of a differential system, fixed by Taylor seeds.
class EVector {
 public:
  /// `seeds[i]` are Taylor coefficients (of z^n, not z^n/n!) of component i;
  /// all components need the same count, at least the recurrence requires.
  static EVector from_system(const DifferentialSystem& sys, const std::vector<std::vector<NFElement>>& seeds,
                             std::optional<CoefficientBound> bound = std::nullopt) {
    const std::size_t N = sys.dim();
    require(seeds.size() == N, ErrorCode::InvalidInput, "need one seed list per component");
    const std::size_t s = seeds[0].size();
    for (const auto& row : seeds) require(row.size() == s, ErrorCode::InvalidInput, "seed lists must have equal length");
    auto rec = std::make_shared<Recurrence>(sys);
    if (s < rec->required_seeds())
      fail(ErrorCode::InsufficientSeeds, "system needs " + std::to_string(rec->required_seeds()) + " Taylor seeds per component, got " +
                                             std::to_string(s));
    // Transpose into per-index vectors.
    auto cache = std::make_shared<std::vector<std::vector<NFElement>>>();
    for (std::size_t n = 0; n < s; ++n) {
      std::vector<NFElement> v;
      for (std::size_t i = 0; i < N; ++i) {
        require(seeds[i][n].field()->same_as(*sys.field()), ErrorCode::FieldMismatch, "seed outside the system's field");
        v.push_back(seeds[i][n]);
      }
      cache->push_back(std::move(v));
    }
    // Every equation whose top index is a seed index must hold exactly.
    for (std::size_t t = static_cast<std::size_t>(std::max<long>(rec->shift(), 0)); t < s; ++t) {
      auto r = rec->residual(t, *cache, &(*cache)[t]);
      for (const auto& x : r)
        if (!x.is_zero()) fail(ErrorCode::InconsistentSeeds, "seeds violate the system at z^" + std::to_string(t - rec->shift()));
    }
    auto step = [rec, cache, s](std::size_t n, const std::vector<CoefficientStream::Row>&) {
      if (n >= cache->size()) cache->push_back(rec->solve_next(n, *cache));
      CoefficientStream::Row a = (*cache)[n];
      BigRational f(factorial(n));
      for (auto& x : a) x = x * f;
      return a;
    };
    EVector v;
    auto d = std::make_shared<Data>(Data{sys, seeds, std::make_shared<CoefficientStream>(N, step), rec, bound});
    v.d_ = d;
    // Substitution check on the next 2N generated terms.
    auto& st = *v.d_->stream;
    st.row(s + 2 * N);
    {
      std::vector<std::vector<NFElement>> c;
      for (std::size_t n = 0; n <= s + 2 * N; ++n) {
        auto a = st.row(n);
        for (auto& x : a) x = x / BigRational(factorial(n));
        c.push_back(std::move(a));
      }
      for (std::size_t t = s; t <= s + 2 * N; ++t) {
        auto r = rec->residual(t, c, &c[t]);
        for (const auto& x : r) require(x.is_zero(), ErrorCode::InconsistentSeeds, "generated terms fail substitution");
      }
    }
    return v;
  }

  /// Seeds read off existing functions; the resulting vector's recurrence
  /// stream is cross-checked against them up to `verify_order`.
  static EVector from_functions(const DifferentialSystem& sys, const std::vector<EFunction>& comps, std::size_t verify_order = 0,
                                std::optional<CoefficientBound> bound = std::nullopt) {
    Recurrence rec(sys);
    const std::size_t s = std::max<std::size_t>(rec.required_seeds(), 1);
    std::vector<std::vector<NFElement>> seeds;
    for (const auto& f : comps) seeds.push_back(f.taylor_coeffs(s));
    EVector v = from_system(sys, seeds, std::move(bound));
    for (std::size_t i = 0; i < comps.size(); ++i) {
      auto got = v.component(i).coeffs(verify_order);
      auto want = comps[i].coeffs(verify_order);
      for (std::size_t n = 0; n < verify_order; ++n)
        require(got[n] == want[n], ErrorCode::InconsistentSeeds,
                "system stream disagrees with the direct stream at n=" + std::to_string(n));
    }
    return v;
  }

  std::size_t dim() const { return d_->system.dim(); }
  const DifferentialSystem& system() const { return d_->system; }
  const NumberField::Ptr& field() const { return d_->system.field(); }
  const std::vector<std::vector<NFElement>>& seeds() const { return d_->seeds; }
  const std::optional<CoefficientBound>& bound() const { return d_->bound; }
  const Recurrence& recurrence() const { return *d_->recurrence; }

  EFunction component(std::size_t i) const {
    require(i < dim(), ErrorCode::InvalidInput, "component index out of range");
    EFunction f(field(), d_->stream, i, d_->bound);
    f.vec_ = std::make_shared<const EVector>(*this);
    return f;
  }
  std::vector<EFunction> components() const {
    std::vector<EFunction> out;
    for (std::size_t i = 0; i < dim(); ++i) out.push_back(component(i));
    return out;
  }
  /// Taylor coefficient vectors c_0..c_{count-1}.
  std::vector<std::vector<NFElement>> taylor_rows(std::size_t count) const {
    std::vector<std::vector<NFElement>> out;
    for (std::size_t n = 0; n < count; ++n) {
      auto a = d_->stream->row(n);
      for (auto& x : a) x = x / BigRational(factorial(n));
      out.push_back(std::move(a));
    }
    return out;
  }

 private:
  struct Data {
    DifferentialSystem system;
    std::vector<std::vector<NFElement>> seeds;
    std::shared_ptr<CoefficientStream> stream;
    std::shared_ptr<Recurrence> recurrence;
    std::optional<CoefficientBound> bound;
  };
  std::shared_ptr<const Data> d_;
};

inline const EVector& EFunction::evector() const {
  require(static_cast<bool>(vec_), ErrorCode::SystemRequired, "operation needs a system-backed E-function");
  return *vec_;
}

// ---------------------------------------------------------------------------
// Stream-level operations.

namespace detail {

inline void check_fields(const EFunction& f, const EFunction& g) {
  require(f.field()->same_as(*g.field()), ErrorCode::FieldMismatch, "E-functions over different fields");
}

inline std::optional<CoefficientBound> sum_bound(const std::optional<CoefficientBound>& a, const BigRational& la,
                                                 const std::optional<CoefficientBound>& b, const BigRational& lb) {
  if (!a || !b) return std::nullopt;
  return CoefficientBound{la * a->scale + lb * b->scale, std::max(a->rate, b->rate)};
}

}  // namespace detail

/// Exact linear combination sum lambda_j f_j.
inline EFunction linear_combination(const std::vector<NFElement>& lambda, const std::vector<EFunction>& fs) {
  require(!fs.empty() && lambda.size() == fs.size(), ErrorCode::InvalidInput, "coefficient and function counts differ");
  const auto K = fs[0].field();
  for (const auto& f : fs) detail::check_fields(fs[0], f);
  std::optional<CoefficientBound> bound = CoefficientBound{BigRational(0), BigRational(0)};
  for (std::size_t j = 0; j < fs.size(); ++j) {
    if (!bound) break;
    if (lambda[j].is_zero()) continue;
    bound = detail::sum_bound(bound, BigRational(1), fs[j].bound(), house_upper_rational(lambda[j]));
  }
  return EFunction::explicit_stream(
      K,
      [lambda, fs, K](std::size_t n) {
        NFElement acc(K, BigRational(0));
        for (std::size_t j = 0; j < fs.size(); ++j)
          if (!lambda[j].is_zero()) acc += lambda[j] * fs[j].coeff(n);
        return acc;
      },
      bound);
}

inline EFunction operator+(const EFunction& f, const EFunction& g) {
  detail::check_fields(f, g);
  return linear_combination({f.field() ? NFElement(f.field(), 1) : NFElement(), NFElement(f.field(), 1)}, {f, g});
}
inline EFunction operator-(const EFunction& f, const EFunction& g) {
  detail::check_fields(f, g);
  return linear_combination({NFElement(f.field(), 1), NFElement(f.field(), -1)}, {f, g});
}

/// Product by binomial convolution: c_n = sum_k binom(n,k) a_k b_{n-k}.
inline EFunction operator*(const EFunction& f, const EFunction& g) {
  detail::check_fields(f, g);
  std::optional<CoefficientBound> bound;
  if (f.bound() && g.bound())
    bound = CoefficientBound{f.bound()->scale * g.bound()->scale, f.bound()->rate + g.bound()->rate};
  const auto K = f.field();
  return EFunction::explicit_stream(
      K,
      [f, g, K](std::size_t n) {
        NFElement acc(K, BigRational(0));
        for (std::size_t k = 0; k <= n; ++k) {
          NFElement a = f.coeff(k);
          if (a.is_zero()) continue;
          NFElement b = g.coeff(n - k);
          if (b.is_zero()) continue;
          acc += a * b * BigRational(binomial(n, k));
        }
        return acc;
      },
      bound);
}

/// P(z) f(z): a'_n = sum_k p_k n!/(n-k)! a_{n-k}.
inline EFunction multiply_poly(const Poly& p, const EFunction& f) {
  const auto K = f.field();
  std::optional<CoefficientBound> bound;
  if (f.bound()) {
    BigRational s = 0;
    for (std::size_t k = 0; k < p.size(); ++k) s += house_upper_rational(p[k]) * BigRational(factorial(k));
    bound = CoefficientBound{f.bound()->scale * s, 2 * std::max(f.bound()->rate, BigRational(1))};
  }
  return EFunction::explicit_stream(
      K,
      [p, f, K](std::size_t n) {
        NFElement acc(K, BigRational(0));
        for (std::size_t k = 0; k < p.size() && k <= n; ++k) {
          if (p[k].is_zero()) continue;
          BigInt falling = factorial(n) / factorial(n - k);
          acc += p[k] * f.coeff(n - k) * BigRational(falling);
        }
        return acc;
      },
      bound);
}

/// Formal quotient g = f / D (D(0) != 0): sum_k d_k g_{n-k} = c_n on Taylor
/// coefficients. No a priori coefficient bound is attached.
inline EFunction divide_by_poly(const EFunction& f, const Poly& D) {
  require(!D.is_zero() && !D[0].is_zero(), ErrorCode::ConstantTermZero, "divisor must have a non-zero constant term");
  const auto K = f.field();
  auto taylor = std::make_shared<std::vector<NFElement>>();
  NFElement inv0 = D[0].inverse();
  auto st = std::make_shared<CoefficientStream>(1, [f, D, taylor, inv0](std::size_t n, const std::vector<CoefficientStream::Row>&) {
    NFElement acc = f.taylor(n);
    for (std::size_t k = 1; k < D.size() && k <= n; ++k)
      if (!D[k].is_zero()) acc -= D[k] * (*taylor)[n - k];
    acc = acc * inv0;
    taylor->push_back(acc);
    return CoefficientStream::Row{acc * BigRational(factorial(n))};
  });
  return EFunction(K, st, 0, std::nullopt);
}

/// f^sigma: coefficientwise automorphism. The coefficient bound is shared
/// since it holds for every embedding.
inline EFunction conjugate_stream(const EFunction& f, std::size_t sigma) {
  f.field()->require_galois("conjugate");
  if (sigma == 0) return f;
  return EFunction::explicit_stream(
      f.field(), [f, sigma](std::size_t n) { return f.coeff(n).apply_automorphism(sigma); }, f.bound());
}

/// f(alpha z) as a stream: a_n alpha^n.
inline EFunction scale_stream(const EFunction& f, const NFElement& alpha) {
  std::optional<CoefficientBound> bound;
  if (f.bound()) bound = CoefficientBound{f.bound()->scale, f.bound()->rate * house_upper_rational(alpha)};
  auto powers = std::make_shared<std::vector<NFElement>>();
  auto st = std::make_shared<CoefficientStream>(1, [f, alpha, powers](std::size_t n, const std::vector<CoefficientStream::Row>&) {
    powers->push_back(n == 0 ? alpha.one() : powers->back() * alpha);
    return CoefficientStream::Row{f.coeff(n) * (*powers)[n]};
  });
  return EFunction(f.field(), st, 0, bound);
}

/// Lifts an E-function over Q into a larger field (same coefficients).
inline EFunction lift_to(const EFunction& f, const NumberField::Ptr& K) {
  if (f.field()->same_as(*K)) return f;
  require(f.field()->is_rational_field(), ErrorCode::FieldMismatch, "only functions over Q can be lifted");
  return EFunction::explicit_stream(
      K, [f, K](std::size_t n) { return NFElement(K, f.coeff(n).rational_part()); }, f.bound());
}

/// Views a rational-coefficient stream as a function over Q; every coefficient
/// is checked.
inline EFunction restrict_to_rationals(const EFunction& f) {
  auto Q = NumberField::rationals();
  return EFunction::explicit_stream(
      Q,
      [f, Q](std::size_t n) {
        NFElement a = f.coeff(n);
        if (!a.is_rational())
          fail(ErrorCode::RationalityViolation, "coefficient a_" + std::to_string(n) + " = " + a.to_string() + " is not rational");
        return NFElement(Q, a.rational_part());
      },
      f.bound());
}

// ---------------------------------------------------------------------------
// System-level operations.

inline DifferentialSystem sum_system(const DifferentialSystem& s1, const DifferentialSystem& s2) {
  require(s1.field()->same_as(*s2.field()), ErrorCode::FieldMismatch, "systems over different fields");
  const std::size_t n1 = s1.dim(), n2 = s2.dim();
  RatMatrix C(n1 + n2, n1 + n2, RatFun(poly_zero(s1.field())));
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n1; ++j) C(i, j) = s1(i, j);
  for (std::size_t i = 0; i < n2; ++i)
    for (std::size_t j = 0; j < n2; ++j) C(n1 + i, n1 + j) = s2(i, j);
  return DifferentialSystem(s1.field(), C);
}

/// System for the products f_i g_j (index i * N2 + j): A (x) I + I (x) B.
inline DifferentialSystem product_system(const DifferentialSystem& s1, const DifferentialSystem& s2) {
  require(s1.field()->same_as(*s2.field()), ErrorCode::FieldMismatch, "systems over different fields");
  const std::size_t n1 = s1.dim(), n2 = s2.dim();
  RatMatrix C(n1 * n2, n1 * n2, RatFun(poly_zero(s1.field())));
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j) {
      const std::size_t row = i * n2 + j;
      for (std::size_t k = 0; k < n1; ++k)
        if (!s1(i, k).is_zero()) C(row, k * n2 + j) = C(row, k * n2 + j) + s1(i, k);
      for (std::size_t l = 0; l < n2; ++l)
        if (!s2(j, l).is_zero()) C(row, i * n2 + l) = C(row, i * n2 + l) + s2(j, l);
    }
  return DifferentialSystem(s1.field(), C);
}

namespace detail {

// Taylor coefficients of a product of truncated series.
inline std::vector<NFElement> taylor_product(const std::vector<NFElement>& a, const std::vector<NFElement>& b) {
  std::vector<NFElement> c(a.size(), a[0].zero());
  for (std::size_t n = 0; n < a.size(); ++n)
    for (std::size_t k = 0; k <= n; ++k)
      if (!a[k].is_zero() && !b[n - k].is_zero()) c[n] += a[k] * b[n - k];
  return c;
}

inline std::size_t seed_count(const DifferentialSystem& sys) {
  return std::max<std::size_t>(Recurrence(sys).required_seeds(), 1);
}

inline std::optional<CoefficientBound> product_bound(const std::optional<CoefficientBound>& a,
                                                     const std::optional<CoefficientBound>& b) {
  if (!a || !b) return std::nullopt;
  return CoefficientBound{a->scale * b->scale, a->rate + b->rate};
}

}  // namespace detail

/// Solution vector (f_i g_j) of product_system.
inline EVector product_evector(const EVector& f, const EVector& g) {
  auto sys = product_system(f.system(), g.system());
  const std::size_t s = detail::seed_count(sys);
  auto tf = f.taylor_rows(s), tg = g.taylor_rows(s);
  std::vector<std::vector<NFElement>> seeds;
  for (std::size_t i = 0; i < f.dim(); ++i)
    for (std::size_t j = 0; j < g.dim(); ++j) {
      std::vector<NFElement> a, b;
      for (std::size_t n = 0; n < s; ++n) {
        a.push_back(tf[n][i]);
        b.push_back(tg[n][j]);
      }
      seeds.push_back(detail::taylor_product(a, b));
    }
  return EVector::from_system(sys, seeds, detail::product_bound(f.bound(), g.bound()));
}

inline EVector sum_evector(const EVector& f, const EVector& g) {
  auto sys = sum_system(f.system(), g.system());
  const std::size_t s = detail::seed_count(sys);
  auto tf = f.taylor_rows(s), tg = g.taylor_rows(s);
  std::vector<std::vector<NFElement>> seeds;
  for (std::size_t i = 0; i < f.dim(); ++i) {
    std::vector<NFElement> a;
    for (std::size_t n = 0; n < s; ++n) a.push_back(tf[n][i]);
    seeds.push_back(a);
  }
  for (std::size_t j = 0; j < g.dim(); ++j) {
    std::vector<NFElement> a;
    for (std::size_t n = 0; n < s; ++n) a.push_back(tg[n][j]);
    seeds.push_back(a);
  }
  std::optional<CoefficientBound> bound;
  if (f.bound() && g.bound())
    bound = CoefficientBound{std::max(f.bound()->scale, g.bound()->scale), std::max(f.bound()->rate, g.bound()->rate)};
  return EVector::from_system(sys, seeds, bound);
}

/// Exponent vectors (i_1..i_N) with sum D, lexicographically descending.
inline std::vector<std::vector<std::size_t>> monomial_exponents(std::size_t N, std::size_t D) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> e(N, 0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t pos, std::size_t left) {
    if (pos + 1 == N) {
      e[pos] = left;
      out.push_back(e);
      return;
    }
    for (std::size_t x = left + 1; x-- > 0;) {
      e[pos] = x;
      rec(pos + 1, left - x);
    }
  };
  rec(0, D);
  return out;
}

/// System satisfied by all degree-D monomials in the components:
/// (f^e)' = sum_{i,k} e_i A_ik f^(e - e_i + e_k).
inline DifferentialSystem symmetric_power_system(const DifferentialSystem& S, std::size_t D) {
  require(D >= 1, ErrorCode::InvalidInput, "symmetric power needs D >= 1");
  const std::size_t N = S.dim();
  auto mons = monomial_exponents(N, D);
  const std::size_t M = mons.size();
  RatMatrix B(M, M, RatFun(poly_zero(S.field())));
  for (std::size_t r = 0; r < M; ++r)
    for (std::size_t i = 0; i < N; ++i) {
      if (mons[r][i] == 0) continue;
      for (std::size_t k = 0; k < N; ++k) {
        if (S(i, k).is_zero()) continue;
        auto e = mons[r];
        e[i] -= 1;
        e[k] += 1;
        auto it = std::find(mons.begin(), mons.end(), e);
        const std::size_t c = static_cast<std::size_t>(it - mons.begin());
        B(r, c) = B(r, c) + S(i, k) * NFElement(S.field(), BigRational(static_cast<long>(mons[r][i])));
      }
    }
  return DifferentialSystem(S.field(), B);
}

inline EVector symmetric_power(const EVector& f, std::size_t D) {
  auto sys = symmetric_power_system(f.system(), D);
  const std::size_t s = detail::seed_count(sys);
  auto rows = f.taylor_rows(s);
  auto mons = monomial_exponents(f.dim(), D);
  std::vector<std::vector<NFElement>> seeds;
  for (const auto& e : mons) {
    std::vector<NFElement> acc(s, NFElement(f.field(), BigRational(0)));
    acc[0] = acc[0].one();
    for (std::size_t i = 0; i < e.size(); ++i) {
      std::vector<NFElement> fi;
      for (std::size_t n = 0; n < s; ++n) fi.push_back(rows[n][i]);
      for (std::size_t p = 0; p < e[i]; ++p) acc = detail::taylor_product(acc, fi);
    }
    seeds.push_back(acc);
  }
  std::optional<CoefficientBound> bound;
  if (f.bound())
    bound = CoefficientBound{f.bound()->scale.get_num() == 0 ? BigRational(0) : BigRational(1), BigRational(0)};
  if (f.bound()) {
    BigRational sc = 1;
    for (std::size_t p = 0; p < D; ++p) sc *= f.bound()->scale;
    bound = CoefficientBound{sc, f.bound()->rate * BigRational(static_cast<long>(D))};
  }
  return EVector::from_system(sys, seeds, bound);
}

inline DifferentialSystem conjugate_system(const DifferentialSystem& S, std::size_t sigma) {
  S.field()->require_galois("conjugate_system");
  return DifferentialSystem(S.field(), S.matrix().map([sigma](const RatFun& r) { return r.apply_automorphism(sigma); }));
}

inline EVector conjugate_evector(const EVector& f, std::size_t sigma) {
  auto sys = conjugate_system(f.system(), sigma);
  std::vector<std::vector<NFElement>> seeds = f.seeds();
  for (auto& row : seeds)
    for (auto& x : row) x = x.apply_automorphism(sigma);
  return EVector::from_system(sys, seeds, f.bound());
}

/// f^sigma; system-backed inputs give system-backed outputs.
inline EFunction conjugate(const EFunction& f, std::size_t sigma) {
  f.field()->require_galois("conjugate");
  if (f.has_system()) {
    EFunction g = conjugate_evector(f.evector(), sigma).component(f.index());
    return g;
  }
  return conjugate_stream(f, sigma);
}

/// tilde A(z) = alpha A(alpha z); seeds c_n alpha^n.
inline DifferentialSystem scale_system(const DifferentialSystem& S, const NFElement& alpha) {
  const auto K = S.field();
  if (alpha.is_zero()) return DifferentialSystem(K, RatMatrix(S.dim(), S.dim(), RatFun(poly_zero(K))));
  Poly az = Poly::monomial(alpha, 1);
  return DifferentialSystem(K, S.matrix().map([&](const RatFun& r) {
    if (r.is_zero()) return r;
    return RatFun(r.num().compose(az) * alpha, r.den().compose(az));
  }));
}

inline EVector scale_argument(const EVector& f, const NFElement& alpha) {
  auto sys = scale_system(f.system(), alpha);
  const std::size_t s = detail::seed_count(sys);
  auto rows = f.taylor_rows(s);
  std::vector<std::vector<NFElement>> seeds(f.dim());
  NFElement pw = alpha.one();
  for (std::size_t n = 0; n < s; ++n) {
    for (std::size_t i = 0; i < f.dim(); ++i) seeds[i].push_back(rows[n][i] * pw);
    pw = pw * alpha;
  }
  std::optional<CoefficientBound> bound;
  if (f.bound()) bound = CoefficientBound{f.bound()->scale, f.bound()->rate * house_upper_rational(alpha)};
  return EVector::from_system(sys, seeds, bound);
}

/// g = T f for a polynomial matrix T invertible over K(z): g' = (T' + T A) T^-1 g.
inline DifferentialSystem transform_system(const DifferentialSystem& S, const RatMatrix& T) {
  auto Tinv = inverse(T);
  require(Tinv.has_value(), ErrorCode::InvalidInput, "transformation matrix is singular");
  return DifferentialSystem(S.field(), (derivative(T) + T * S.matrix()) * *Tinv);
}

/// P f for every component, with the system A + (P'/P) I.
inline EVector multiply_poly_evector(const EVector& f, const Poly& p) {
  const auto K = f.field();
  RatMatrix T = rat_identity(f.dim(), K);
  for (std::size_t i = 0; i < f.dim(); ++i) T(i, i) = RatFun(p);
  auto sys = transform_system(f.system(), T);
  const std::size_t s = detail::seed_count(sys);
  auto rows = f.taylor_rows(s);
  std::vector<std::vector<NFElement>> seeds;
  std::vector<NFElement> pc;
  for (std::size_t n = 0; n < s; ++n) pc.push_back(p[n]);
  for (std::size_t i = 0; i < f.dim(); ++i) {
    std::vector<NFElement> fi;
    for (std::size_t n = 0; n < s; ++n) fi.push_back(rows[n][i]);
    seeds.push_back(detail::taylor_product(pc, fi));
  }
  std::optional<CoefficientBound> bound;
  if (f.bound()) {
    BigRational sc = 0;
    for (std::size_t k = 0; k < p.size(); ++k) sc += house_upper_rational(p[k]) * BigRational(factorial(k));
    bound = CoefficientBound{f.bound()->scale * sc, 2 * std::max(f.bound()->rate, BigRational(1))};
  }
  return EVector::from_system(sys, seeds, bound);
}

// ---------------------------------------------------------------------------
// Galois constructions.

/// (real part, imaginary part) of f with respect to complex conjugation on
/// the distinguished embedding.
inline std::pair<EFunction, EFunction> real_imag_parts(const EFunction& f) {
  const auto& K = f.field();
  auto c = K->complex_conjugation();
  if (K->is_rational_field() || (c && *c == 0)) {
    EFunction zero = EFunction::explicit_stream(K, [K](std::size_t) { return NFElement(K, BigRational(0)); },
                                                CoefficientBound{BigRational(0), BigRational(0)});
    return {f, zero};
  }
  K->require_galois("real_imag_parts");
  require(c.has_value(), ErrorCode::NotGalois, "complex conjugation is not among the automorphisms");
  // i in K with iota_0(i) = +i.
  Poly x2p1(std::vector<NFElement>{NFElement(K, 1), NFElement(K, 0), NFElement(K, 1)}, NFElement(K, 0));
  auto roots = roots_in_field(x2p1);
  std::optional<NFElement> i_elem;
  for (const auto& r : roots)
    if (r.embed(0, 64).mid_im().sign() > 0) i_elem = r;
  require(i_elem.has_value(), ErrorCode::FieldLacksI, "the field does not contain i");
  const std::size_t cc = *c;
  NFElement inv2i = (*i_elem * BigRational(2)).inverse();
  EFunction re = EFunction::explicit_stream(
      K, [f, cc](std::size_t n) {
        NFElement a = f.coeff(n);
        return (a + a.apply_automorphism(cc)) / BigRational(2);
      },
      f.bound());
  EFunction im = EFunction::explicit_stream(
      K, [f, cc, inv2i](std::size_t n) {
        NFElement a = f.coeff(n);
        return (a - a.apply_automorphism(cc)) * inv2i;
      },
      f.bound());
  return {re, im};
}

/// g = sum_sigma sigma(alpha) g_sigma with g_sigma over Q; result indexed by
/// automorphism index.
inline std::vector<EFunction> normal_basis_decompose(const EFunction& g, const NFElement& alpha) {
  const auto& K = g.field();
  K->require_galois("normal_basis_decompose");
  const std::size_t d = K->degree();
  auto M = conjugate_coordinate_matrix(alpha);  // row s: coords of sigma_s(alpha)
  auto Minv = inverse(M.transpose());
  require(Minv.has_value(), ErrorCode::NotNormalBasis, "conjugates of alpha are not a basis");
  auto Q = NumberField::rationals();
  auto st = std::make_shared<CoefficientStream>(d, [g, Minv, Q, d](std::size_t n, const std::vector<CoefficientStream::Row>&) {
    const NFElement a = g.coeff(n);
    const auto& c = a.coords();
    CoefficientStream::Row row;
    for (std::size_t s = 0; s < d; ++s) {
      BigRational b = 0;
      for (std::size_t j = 0; j < d; ++j) b += (*Minv)(s, j) * c[j];
      row.emplace_back(Q, b);
    }
    return row;
  });
  // No bound is attached; evaluation of the parts falls back to the empirical tail.
  std::vector<EFunction> parts;
  for (std::size_t s = 0; s < d; ++s) parts.emplace_back(Q, st, s, std::nullopt);
  return parts;
}

/// sum_sigma sigma(alpha) g_sigma, lifted back into K.
inline EFunction normal_basis_reconstruct(const std::vector<EFunction>& parts, const NFElement& alpha) {
  const auto& K = alpha.field();
  std::vector<NFElement> lambda;
  std::vector<EFunction> fs;
  for (std::size_t s = 0; s < parts.size(); ++s) {
    lambda.push_back(alpha.apply_automorphism(s));
    fs.push_back(lift_to(parts[s], K));
  }
  return linear_combination(lambda, fs);
}

/// prod_sigma f^sigma with rational coefficients (each checked).
inline EFunction galois_norm(const EFunction& f) {
  const auto& K = f.field();
  K->require_galois("galois_norm");
  if (K->is_rational_field()) return f;
  EFunction prod = f;
  for (std::size_t s = 1; s < K->degree(); ++s) prod = prod * conjugate_stream(f, s);
  EFunction q = restrict_to_rationals(prod);
  if (f.bound()) {
    BigRational sc = 1;
    for (std::size_t p = 0; p < K->degree(); ++p) sc *= f.bound()->scale;
    q.set_bound(CoefficientBound{sc, f.bound()->rate * BigRational(static_cast<long>(K->degree()))});
  }
  return q;
}

/// System-side companion of galois_norm: the iterated product of the
/// conjugate solution vectors, and the index of prod_sigma f^sigma in it.
inline std::pair<EVector, std::size_t> galois_norm_evector(const EFunction& f) {
  const auto& K = f.field();
  K->require_galois("galois_norm");
  const EVector& v = f.evector();
  EVector acc = v;
  std::size_t idx = f.index();
  for (std::size_t s = 1; s < K->degree(); ++s) {
    EVector c = conjugate_evector(v, s);
    idx = idx * c.dim() + f.index();
    acc = product_evector(acc, c);
  }
  return {acc, idx};
}

// ---------------------------------------------------------------------------

struct LinearRelation {
  bool found = false;
  std::vector<Poly> coeffs;  // R_j with sum R_j f_j = 0
  std::size_t degree = 0;
  std::size_t checked_order = 0;
};

/// Bounded search for polynomial relations sum R_j f_j = 0 with deg R_j <=
/// max_deg, found on truncations to max_order and re-verified to twice that
/// order. A negative answer only means "none within these bounds".
inline LinearRelation linear_relation_search(const std::vector<EFunction>& fs, std::size_t max_deg = 8,
                                             std::size_t max_order = 120) {
  require(!fs.empty(), ErrorCode::InvalidInput, "no functions given");
  const auto K = fs[0].field();
  for (const auto& f : fs) detail::check_fields(fs[0], f);
  const std::size_t N = fs.size();
  std::vector<std::vector<NFElement>> taylor;
  for (const auto& f : fs) taylor.push_back(f.taylor_coeffs(2 * max_order));
  const NFElement zero(K, BigRational(0));
  for (std::size_t deg = 0; deg <= max_deg; ++deg) {
    const std::size_t cols = N * (deg + 1);
    if (cols > max_order) break;
    Matrix<NFElement> A(max_order, cols, zero);
    for (std::size_t m = 0; m < max_order; ++m)
      for (std::size_t j = 0; j < N; ++j)
        for (std::size_t k = 0; k <= deg && k <= m; ++k) A(m, j * (deg + 1) + k) = taylor[j][m - k];
    auto ker = kernel(A);
    if (ker.empty()) continue;
    auto v = ker.front();
    std::vector<Poly> R;
    for (std::size_t j = 0; j < N; ++j) {
      std::vector<NFElement> c(v.begin() + static_cast<std::ptrdiff_t>(j * (deg + 1)),
                               v.begin() + static_cast<std::ptrdiff_t>((j + 1) * (deg + 1)));
      R.emplace_back(std::move(c), zero);
    }
    // Normalize: first non-zero polynomial monic.
    for (const auto& p : R)
      if (!p.is_zero()) {
        NFElement inv = p.leading().inverse();
        for (auto& q : R) q = q * inv;
        break;
      }
    bool ok = true;
    for (std::size_t m = 0; m < 2 * max_order && ok; ++m) {
      NFElement acc = zero;
      for (std::size_t j = 0; j < N; ++j)
        for (std::size_t k = 0; k < R[j].size() && k <= m; ++k) acc += R[j][k] * taylor[j][m - k];
      ok = acc.is_zero();
    }
    if (ok) return {true, R, deg, 2 * max_order};
  }
  return {false, {}, max_deg, max_order};
}

}  // namespace efunc
