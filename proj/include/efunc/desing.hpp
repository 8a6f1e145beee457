#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "efunc/efun.hpp"
#include "efunc/error.hpp"
#include "efunc/numeval.hpp"
#include "efunc/parser.hpp"
#include "efunc/ratfun.hpp"

namespace efunc {

/// Numerical evidence about f(z0) = 0 at every available embedding.
struct VanishingReport {
  struct Entry {
    std::size_t automorphism;  // sigma, so the value is f^sigma(sigma z0)
    ComplexBall value;
    bool nonzero_certified;
  };
  std::vector<Entry> entries;
  bool consistent_with_zero() const {
    for (const auto& e : entries)
      if (e.nonzero_certified) return false;
    return true;
  }
};

inline VanishingReport vanishing_certificate(const EFunction& f, const NFElement& z0, long digits) {
  const auto& K = f.field();
  VanishingReport rep;
  std::vector<std::size_t> sigmas{0};
  if (K->is_galois())
    for (std::size_t s = 1; s < K->degree(); ++s) sigmas.push_back(s);
  for (auto s : sigmas) {
    const std::size_t k = K->embedding_of(s);
    auto zc = zero_check([&](long dg) { return evaluate(f, z0, dg, k).value; }, digits);
    rep.entries.push_back({s, zc.value, zc.nonzero_certified});
  }
  return rep;
}

// ---------------------------------------------------------------------------

namespace detail {

// Taylor coefficients of sum_j P_j f_j up to `order`.
inline std::vector<NFElement> taylor_combination(const std::vector<Poly>& P, const std::vector<std::vector<NFElement>>& taylor,
                                                 std::size_t order, const NFElement& zero) {
  std::vector<NFElement> out(order, zero);
  for (std::size_t j = 0; j < P.size(); ++j)
    for (std::size_t k = 0; k < P[j].size(); ++k) {
      if (P[j][k].is_zero()) continue;
      for (std::size_t n = k; n < order; ++n)
        if (!taylor[j][n - k].is_zero()) out[n] += P[j][k] * taylor[j][n - k];
    }
  return out;
}

inline EFunction poly_combination(const std::vector<Poly>& P, const std::vector<EFunction>& fs) {
  std::vector<EFunction> terms;
  std::vector<NFElement> ones;
  for (std::size_t j = 0; j < P.size(); ++j) {
    if (P[j].is_zero()) continue;
    terms.push_back(multiply_poly(P[j], fs[j]));
    ones.push_back(fs[j].field() ? NFElement(fs[j].field(), 1) : NFElement());
  }
  if (terms.empty()) return EFunction::polynomial(poly_zero(fs[0].field()));
  return linear_combination(ones, terms);
}

}  // namespace detail

struct SingularityRelation {
  std::vector<Poly> row;  // coprime, scaled so the first non-zero entry is monic
  std::size_t i0 = 0;
  std::size_t j0 = 0;
  std::size_t pole_order = 0;
  std::optional<VanishingReport> check;  // sum P_j f_j at alpha, when f is given
};

/// From a pole of order k at alpha: row i0 of (z-alpha)^k A, cleared of
/// denominators and content, gives sum_j P_j(alpha) f_j(alpha) = 0 with
/// P_j0(alpha) != 0.
inline SingularityRelation singularity_relation(const DifferentialSystem& S, const NFElement& alpha,
                                                const std::vector<EFunction>* f = nullptr, long check_digits = 30) {
  const auto& A = S.matrix();
  const std::size_t N = S.dim();
  SingularityRelation rel;
  rel.pole_order = max_pole_order(A, alpha);
  if (rel.pole_order == 0) fail(ErrorCode::NotASingularity, alpha.to_string() + " is not a pole of the system");
  bool found = false;
  for (std::size_t i = 0; i < N && !found; ++i)
    for (std::size_t j = 0; j < N; ++j)
      if (A(i, j).pole_order(alpha) == rel.pole_order) {
        rel.i0 = i;
        rel.j0 = j;
        found = true;
        break;
      }
  const auto& K = S.field();
  Poly Qk = Poly::constant(NFElement(K, 1));
  for (std::size_t p = 0; p < rel.pole_order; ++p) Qk = Qk * Poly::linear_root(alpha);
  std::vector<RatFun> r;
  for (std::size_t j = 0; j < N; ++j) r.push_back(A(rel.i0, j) * RatFun(Qk));
  Poly L = Poly::constant(NFElement(K, 1));
  for (const auto& x : r) L = L * (x.den() / poly_gcd(L, x.den()));
  std::vector<Poly> row;
  Poly g = poly_zero(K);
  for (const auto& x : r) {
    Poly p = x.is_zero() ? poly_zero(K) : x.num() * (L / x.den());
    g = g.is_zero() ? (p.is_zero() ? p : p.monic()) : (p.is_zero() ? g : poly_gcd(g, p));
    row.push_back(std::move(p));
  }
  for (auto& p : row) p = p / g;
  for (const auto& p : row)
    if (!p.is_zero()) {
      NFElement inv = p.leading().inverse();
      for (auto& q : row) q = q * inv;
      break;
    }
  require(!row[rel.j0].eval(alpha).is_zero(), ErrorCode::CertificateInconsistent, "P_j0(alpha) vanished; relation extraction failed");
  rel.row = row;
  if (f) rel.check = vanishing_certificate(detail::poly_combination(row, *f), alpha, check_digits);
  return rel;
}

/// Roots of the system's denominator other than z = 0, each once.
inline std::vector<NFElement> nonzero_singularities(const DifferentialSystem& S) {
  Poly L = S.denominator();
  L = L.shift_down(L.valuation());
  if (L.degree() <= 0) return {};
  Poly sf = squarefree_part(L);
  auto roots = roots_in_field(sf);
  if (static_cast<int>(roots.size()) < sf.degree())
    fail(ErrorCode::SingularityOutsideField, "the denominator " + poly_to_string(L) +
                                                 " has roots outside the field; pass a field containing them");
  return roots;
}

struct DesingOptions {
  std::size_t verify_order = 200;
  bool check_independence = true;
  std::size_t relation_max_deg = 8;
  std::size_t relation_max_order = 120;
};

struct DesingStep {
  NFElement alpha;
  std::vector<Poly> relation;
  std::size_t metric_before = 0;
};

struct DesingResult {
  DifferentialSystem B;
  Matrix<Poly> M;  // f = M e
  EVector e;
  std::vector<DesingStep> steps;
};

namespace detail {

inline bool is_power_of_z(const Poly& p) {
  if (p.is_zero()) return false;
  for (std::size_t k = 0; k + 1 < p.size(); ++k)
    if (!p[k].is_zero()) return false;
  return true;
}

inline Matrix<Poly> poly_identity(std::size_t n, const NumberField::Ptr& K) {
  return Matrix<Poly>::identity(n, poly_const(NFElement(K, 1)));
}

// Polynomial matrix from a RatMatrix known to be polynomial.
inline Matrix<Poly> as_poly_matrix(const RatMatrix& m) {
  return m.map([](const RatFun& r) {
    require(r.is_polynomial(), ErrorCode::InvalidInput, "expected a polynomial matrix");
    return r.num();
  });
}

}  // namespace detail

/// Checks f = M e and e' = B e on Taylor coefficients below `order`.
inline void verify_desingularization(const std::vector<EFunction>& f, const Matrix<Poly>& M, const DifferentialSystem& B,
                                     const EVector& e, std::size_t order) {
  const auto& K = B.field();
  const NFElement zero(K, BigRational(0));
  const std::size_t N = e.dim();
  std::vector<std::vector<NFElement>> te;
  for (std::size_t j = 0; j < N; ++j) te.push_back(e.component(j).taylor_coeffs(order + 1));
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto lhs = f[i].taylor_coeffs(order);
    auto rhs = detail::taylor_combination(M.row(i), te, order, zero);
    for (std::size_t n = 0; n < order; ++n)
      require(lhs[n] == rhs[n], ErrorCode::CertificateInconsistent, "f = M e fails at z^" + std::to_string(n));
  }
  // z^m e_i' = sum_j (z^m B_ij) e_j.
  Poly L = B.denominator();
  require(detail::is_power_of_z(L), ErrorCode::CertificateInconsistent, "B has a pole outside z = 0");
  const std::size_t m = static_cast<std::size_t>(L.degree());
  for (std::size_t i = 0; i < N; ++i) {
    std::vector<Poly> row;
    std::size_t maxdeg = 0;
    for (std::size_t j = 0; j < N; ++j) {
      const RatFun& b = B(i, j);
      Poly p = b.is_zero() ? poly_zero(K) : b.num() * (L / b.den());
      maxdeg = std::max<std::size_t>(maxdeg, p.is_zero() ? 0 : static_cast<std::size_t>(p.degree()));
      row.push_back(std::move(p));
    }
    auto rhs = detail::taylor_combination(row, te, order, zero);
    for (std::size_t n = m; n < order; ++n) {
      // coefficient of z^n in z^m e_i' is (n-m+1) c_{n-m+1}.
      NFElement lhs = te[i][n - m + 1] * BigRational(static_cast<long>(n - m + 1));
      require(lhs == rhs[n], ErrorCode::CertificateInconsistent, "e' = B e fails at z^" + std::to_string(n));
    }
  }
}

/// Repeatedly removes a non-zero singularity alpha: with S a unimodular
/// completion of the relation row at alpha, e = diag(1/(z-alpha), 1, ...) S g.
inline DesingResult desingularize(const EVector& f, const DesingOptions& opt = {}) {
  const auto& K = f.field();
  const std::size_t N = f.dim();
  auto fcomps = f.components();
  if (opt.check_independence && N > 1) {
    auto rel = linear_relation_search(fcomps, opt.relation_max_deg, opt.relation_max_order);
    if (rel.found)
      fail(ErrorCode::IndependenceSuspect, "components look linearly dependent over K(z); pass the override to continue anyway");
  }
  DifferentialSystem sys = f.system();
  EVector g = f;
  Matrix<Poly> M = detail::poly_identity(N, K);
  std::vector<DesingStep> steps;
  const std::size_t cap = 50 * (nonzero_pole_degree(sys.matrix()) + 1);
  for (std::size_t iter = 0;; ++iter) {
    auto sing = nonzero_singularities(sys);
    if (sing.empty()) break;
    if (iter >= cap) fail(ErrorCode::LoopCap, "desingularization did not finish within " + std::to_string(cap) + " steps");
    const NFElement alpha = sing.front();
    auto rel = singularity_relation(sys, alpha);
    Matrix<Poly> S = unimodular_complete(rel.row);
    Poly D = Poly::linear_root(alpha);
    // T = diag(1/D, 1, ..., 1) S.
    RatMatrix T = to_rat_matrix(S);
    for (std::size_t j = 0; j < N; ++j) T(0, j) = T(0, j) / RatFun(D);
    DifferentialSystem next(K, transform_system(sys, T).matrix());
    auto gcomps = g.components();
    std::vector<EFunction> ecomps;
    for (std::size_t i = 0; i < N; ++i) {
      EFunction c = detail::poly_combination(S.row(i), gcomps);
      if (i == 0) c = divide_by_poly(c, D);
      ecomps.push_back(c);
    }
    // S^{-1} is polynomial since det S = 1; f = M S^{-1} diag(D, 1, ...) e.
    auto Sinv = inverse(to_rat_matrix(S));
    require(Sinv.has_value(), ErrorCode::CertificateInconsistent, "completion matrix is singular");
    Matrix<Poly> step = detail::as_poly_matrix(*Sinv);
    for (std::size_t i = 0; i < N; ++i) step(i, 0) = step(i, 0) * D;
    M = M * step;
    steps.push_back({alpha, rel.row, nonzero_pole_degree(sys.matrix())});
    g = EVector::from_functions(next, ecomps, 2 * N + 8);
    sys = next;
  }
  verify_desingularization(fcomps, M, sys, g, opt.verify_order);
  return {sys, M, g, steps};
}

// ---------------------------------------------------------------------------

struct Certificate {
  NFElement alpha;  // non-zero point
  Poly value;       // claim: f(alpha) = value(alpha)
};

struct DecompositionOptions {
  std::size_t verify_order = 200;
  long check_digits = 30;
  bool reduce = true;  // deg P < deg Q
};

struct Decomposition {
  Poly P;
  Poly Q;
  EFunction g;
  std::vector<VanishingReport> g_at_alpha;  // g at every consumed alpha
};

/// f = P + Q g, one factor (z - alpha) per certificate.
inline Decomposition decompose(const EFunction& f, const std::vector<Certificate>& certs, const DecompositionOptions& opt = {}) {
  const auto& K = f.field();
  if (f.as_polynomial()) {
    return {*f.as_polynomial(), poly_zero(K), EFunction::polynomial(poly_zero(K)), {}};
  }
  Poly P = poly_zero(K), Q = poly_const(NFElement(K, 1));
  EFunction g = f;
  for (std::size_t c = 0; c < certs.size(); ++c) {
    const auto& cert = certs[c];
    require(!cert.alpha.is_zero(), ErrorCode::InvalidInput, "certificate points must be non-zero");
    require(!Q.eval(cert.alpha).is_zero(), ErrorCode::InvalidInput, "repeated certificate point " + cert.alpha.to_string());
    // g(alpha) = (P0(alpha) - P(alpha)) / Q(alpha).
    NFElement v = (cert.value.eval(cert.alpha) - P.eval(cert.alpha)) / Q.eval(cert.alpha);
    EFunction h = g - EFunction::polynomial(poly_const(v));
    auto check = vanishing_certificate(h, cert.alpha, opt.check_digits);
    if (!check.consistent_with_zero())
      fail(ErrorCode::CertificateInconsistent, "f(" + cert.alpha.to_string() + ") is certified different from the claimed value");
    Poly D = Poly::linear_root(cert.alpha);
    g = divide_by_poly(h, D);
    P = P + Q * v;
    Q = Q * D;
  }
  if (opt.reduce && Q.degree() >= 1) {
    auto [q, r] = Poly::divmod(P, Q);
    if (!q.is_zero()) g = g + EFunction::polynomial(q);
    P = r;
  }
  // Identity check on Taylor coefficients.
  const NFElement zero(K, BigRational(0));
  auto tf = f.taylor_coeffs(opt.verify_order);
  auto tg = g.taylor_coeffs(opt.verify_order);
  auto qg = detail::taylor_combination({Q}, {tg}, opt.verify_order, zero);
  for (std::size_t n = 0; n < opt.verify_order; ++n)
    require(tf[n] == P[n] + qg[n], ErrorCode::CertificateInconsistent, "f = P + Q g fails at z^" + std::to_string(n));
  Decomposition out{P, Q, g, {}};
  for (const auto& cert : certs) out.g_at_alpha.push_back(vanishing_certificate(g, cert.alpha, opt.check_digits));
  return out;
}

}  // namespace efunc
