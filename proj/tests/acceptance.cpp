// Acceptance run: one PASS/FAIL line per criterion, with wall time and a
// short detail. Exit status is the number of failures.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "efunc/efunc.hpp"

using namespace efunc;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

NumberField::Ptr sqrt2() {
  static const auto K = NumberField::create(qpoly({-2, 0, 1}), {{BigRational(0), BigRational(-1)}});
  return K;
}

NumberField::Ptr gauss() {
  static const auto K = NumberField::create(qpoly({1, 0, 1}), {{BigRational(0), BigRational(-1)}});
  return K;
}

NFElement num(const NumberField::Ptr& K, long a, long b = 1) { return NFElement(K, BigRational(a, b)); }

EFunction constant_one(const NumberField::Ptr& K) { return EFunction::polynomial(poly_const(num(K, 1))); }

BigRational random_rational(std::mt19937& rng) {
  std::uniform_int_distribution<int> n(-9, 9), d(1, 4);
  BigRational r(n(rng), d(rng));
  r.canonicalize();
  return r;
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

// Oracle: sum_{n<=N} 1/n! with the tail bound 2/(N+1)!, exact.
RationalInterval e_oracle(int N) {
  BigRational s = 0, f = 1;
  for (int n = 0; n <= N; ++n) {
    if (n) f *= n;
    s += 1 / f;
  }
  return {s, s + 2 / (f * (N + 1))};
}

// Oracle: J0(1) = sum_k (-1)^k / (4^k (k!)^2); alternating with decreasing
// terms, so the value lies between consecutive partial sums.
RationalInterval j0_oracle(int K) {
  BigRational s = 0, term = 1, prev = 0;
  for (int k = 0; k <= K; ++k) {
    if (k) term = -term / (4 * k * k);
    prev = s;
    s += term;
  }
  return {std::min(prev, s), std::max(prev, s)};
}

// Does the ball lie inside the rational interval widened by 10^-digits?
bool agrees(const ComplexBall& b, const RationalInterval& oracle, long digits) {
  auto iv = b.real_interval();
  BigRational eps = detail::pow10_neg(digits);
  return b.may_be_real() && iv.hi - iv.lo <= 2 * eps && iv.lo <= oracle.hi + eps && iv.hi >= oracle.lo - eps &&
         oracle.hi - oracle.lo <= eps;
}

Outcome c1_catalog() {
  const std::size_t n_max = 200;
  // Pascal triangle, independent of the library's binomials.
  std::vector<std::vector<BigInt>> C(2 * n_max + 1);
  for (std::size_t i = 0; i < C.size(); ++i) {
    C[i].assign(i + 1, BigInt(1));
    for (std::size_t k = 1; k < i; ++k) C[i][k] = C[i - 1][k - 1] + C[i - 1][k];
  }
  auto e = catalog::exp().function();
  auto j = catalog::bessel_j0();
  auto a = catalog::apq(2, 2).function();
  if (j.vec->dim() != 2) return {false, "J0 system is not 2-dimensional"};
  for (std::size_t n = 0; n <= n_max; ++n) {
    if (e.coeff(n).rational_part() != 1) return {false, "exp mismatch at n=" + std::to_string(n)};
    BigRational jn = 0;
    if (n % 2 == 0) {
      BigInt p4;
      mpz_ui_pow_ui(p4.get_mpz_t(), 4, n / 2);
      jn = BigRational(C[n][n / 2], p4);
      jn.canonicalize();
      if ((n / 2) % 2) jn = -jn;
    }
    if (j.vec->component(0).coeff(n).rational_part() != jn) return {false, "J0 mismatch at n=" + std::to_string(n)};
    BigInt s = 0;
    for (std::size_t k = 0; k <= n; ++k) s += C[n][k] * C[n][k] * C[n + k][n] * C[n + k][n];
    if (a.coeff(n).rational_part() != BigRational(s)) return {false, "A22 mismatch at n=" + std::to_string(n)};
  }
  return {true, "exp, J0, A22 exact for n <= 200"};
}

Outcome c2_evaluation() {
  auto Q = NumberField::rationals();
  auto re = evaluate(catalog::exp().function(), num(Q, 1), 50);
  auto rj = evaluate(catalog::bessel_j0().function(), num(Q, 1), 30);
  bool ok_e = !re.heuristic && agrees(re.value, e_oracle(70), 50);
  bool ok_j = !rj.heuristic && agrees(rj.value, j0_oracle(25), 30);
  return {ok_e && ok_j, "e: " + re.value.to_string(12) + (ok_e ? " ok" : " MISMATCH") + "; J0(1): " + rj.value.to_string(12) +
                            (ok_j ? " ok" : " MISMATCH")};
}

Outcome c3_conjugation() {
  std::size_t checks = 0;
  for (auto K : {sqrt2(), gauss()}) {
    NFElement t = NFElement::generator(K);
    std::vector<EFunction> fs{catalog::exp_scaled(t).function(), catalog::cos(K).function(),
                              multiply_poly(parse_poly("1 + t*z^2", K), catalog::bessel_j0(K).function()),
                              catalog::exp_scaled(t + BigRational(1)).function()};
    for (std::size_t a = 0; a < fs.size(); ++a)
      for (std::size_t b = 0; b < fs.size(); ++b)
        for (std::size_t s = 0; s < K->automorphism_count(); ++s) {
          auto prod_l = conjugate(fs[a] * fs[b], s), prod_r = conjugate(fs[a], s) * conjugate(fs[b], s);
          auto sum_l = conjugate(fs[a] + fs[b], s), sum_r = conjugate(fs[a], s) + conjugate(fs[b], s);
          for (std::size_t n = 0; n <= 50; ++n) {
            ++checks;
            if (prod_l.coeff(n) != prod_r.coeff(n) || sum_l.coeff(n) != sum_r.coeff(n))
              return {false, "law fails at n=" + std::to_string(n)};
          }
        }
  }
  return {true, std::to_string(checks) + " coefficient checks, 100% pass"};
}

Outcome c4_norm() {
  auto K = sqrt2();
  auto Q = NumberField::rationals();
  auto nf = galois_norm(catalog::exp_scaled(NFElement::generator(K)).function());
  for (std::size_t n = 0; n <= 100; ++n)
    if (nf.coeff(n).rational_part() != (n == 0 ? 1 : 0)) return {false, "norm of e^(sqrt2 z) not 1 at n=" + std::to_string(n)};
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<NFElement> c;
    for (int i = 0; i < 6; ++i) c.push_back(NFElement(K, {random_rational(rng), random_rational(rng)}));
    auto f = multiply_poly(Poly(c, num(K, 0)), catalog::exp_scaled(NFElement::generator(K)).function());
    // Product of conjugates in K, before restriction: theta-coordinates must vanish.
    auto prod = f * conjugate(f, 1);
    for (std::size_t n = 0; n <= 30; ++n)
      if (!prod.coeff(n).is_rational()) return {false, "non-rational norm coefficient, trial " + std::to_string(trial)};
  }
  auto rep = norm_linear_form({num(Q, 87), num(Q, -32)}, {constant_one(Q), catalog::exp().function()}, num(Q, 1), 40);
  bool exact = rep.varpi_product.mid_re().to_rational() == rep.lambda.mid_re().to_rational() &&
               rep.varpi_product.radius().to_rational() == rep.lambda.radius().to_rational();
  if (!exact) return {false, "d = 1: varpi differs from Lambda"};
  return {true, "norm = 1 to n = 100; 20/20 random products rational; d = 1 varpi = Lambda"};
}

Outcome c5_normal_basis() {
  auto K = sqrt2();
  NFElement alpha = NFElement::generator(K) + BigRational(1);
  auto g = catalog::exp_scaled(NFElement::generator(K)).function();
  auto parts = normal_basis_decompose(g, alpha);
  auto back = normal_basis_reconstruct(parts, alpha);
  for (std::size_t n = 0; n <= 100; ++n)
    if (back.coeff(n) != g.coeff(n)) return {false, "reconstruction fails at n=" + std::to_string(n)};
  bool half = parts[0].coeff(0).rational_part() == BigRational(1, 2) && parts[1].coeff(0).rational_part() == BigRational(1, 2);
  return {half, "reconstruction exact to n = 100; g_Id(0) = " + parts[0].coeff(0).to_string() + ", g_sigma(0) = " +
                    parts[1].coeff(0).to_string()};
}

Outcome c6_desing() {
  auto Q = NumberField::rationals();
  auto K = sqrt2();
  struct Case {
    EVector f;
    Poly expected_det;
  };
  std::vector<Case> cases{
      {EVector::from_system(DifferentialSystem(Q, RatMatrix(1, 1, parse_ratfun("z/(z - 1)", Q))), {{num(Q, -1)}}), parse_poly("z - 1", Q)},
      {EVector::from_system(DifferentialSystem(K, RatMatrix(1, 1, parse_ratfun("(z^2 + 2*z - 2)/(z^2 - 2)", K))), {{num(K, -2)}}),
       parse_poly("z^2 - 2", K)}};
  std::string detail;
  for (const auto& c : cases) {
    auto r = desingularize(c.f);
    const std::size_t N = c.f.dim(), order = 200;
    auto e = r.e.taylor_rows(order + 1), fr = c.f.taylor_rows(order + 1);
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t n = 0; n <= order; ++n) {
        NFElement s(c.f.field(), BigRational(0));
        for (std::size_t j = 0; j < N; ++j)
          for (std::size_t k = 0; k < r.M(i, j).size() && k <= n; ++k) s += r.M(i, j)[k] * e[n - k][j];
        if (s != fr[n][i]) return {false, "f != M e at n=" + std::to_string(n)};
      }
    Poly den = common_denominator(r.B.matrix());
    if (!detail::is_power_of_z(den)) return {false, "den(B) = " + poly_to_string(den) + " is not a power of z"};
    RatFun det = determinant(to_rat_matrix(r.M));
    if (!det.is_polynomial() || det.num().monic() != c.expected_det.monic())
      return {false, "det M = " + det.to_string() + ", expected " + poly_to_string(c.expected_det)};
    detail += (detail.empty() ? "" : "; ") + std::string("det M = ") + det.to_string() + ", den(B) = " + poly_to_string(den);
  }
  return {true, detail + "; f = M e to order 200 (e' = B e verified inside desingularize)"};
}

Outcome c7_division() {
  auto Q = NumberField::rationals();
  std::mt19937 rng(77);
  std::vector<EFunction> base{catalog::exp().function(), catalog::bessel_j0().function(), catalog::apq(2, 2).function(),
                              catalog::cos().function()};
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<BigRational> c;
    for (int i = 0; i < 1 + trial % 4; ++i) c.push_back(random_rational(rng));
    if (c[0] == 0) c[0] = 1;
    c.push_back(BigRational(1));
    Poly D = lift_poly(QPoly(c, BigRational(0)), Q);
    const auto& f = base[trial % base.size()];
    auto back = divide_by_poly(multiply_poly(D, f), D);
    for (std::size_t n = 0; n <= 300; ++n)
      if (back.coeff(n) != f.coeff(n)) return {false, "round trip fails, trial " + std::to_string(trial) + " n=" + std::to_string(n)};
  }
  return {true, "20/20 pairs exact to order 300"};
}

ContinuedFraction e_cf;  // shared with criterion 10

Outcome c8_exponent() {
  auto Q = NumberField::rationals();
  auto ev = evaluate(catalog::exp().function(), num(Q, 1), 200).value;
  e_cf = continued_fraction(ev, 100000);
  auto re = exponent_estimate(ev, e_cf);
  auto jv = evaluate(catalog::bessel_j0().function(), num(Q, 1), 150).value;
  auto rj = exponent_estimate(jv, continued_fraction(jv, 100000));
  bool ok = re.samples.size() >= 30 && re.estimate >= 1.9 && re.estimate <= 2.2 &&
            re.estimate <= paper_exponent(BoundKind::Exp, 1).get_d() + 0.2 && rj.estimate <= paper_exponent(BoundKind::BesselJ0, 1).get_d();
  return {ok, "e: " + fmt(re.estimate) + " from " + std::to_string(re.samples.size()) + " convergents (bound 2); J0(1): " +
                  fmt(rj.estimate) + " from " + std::to_string(rj.samples.size()) + " (bound 3)"};
}

Outcome c9_liouville() {
  auto Q = NumberField::rationals();
  struct Case {
    std::string name;
    EFunction f;
    BoundKind kind;
  };
  std::vector<Case> cases{{"e", catalog::exp().function(), BoundKind::Exp},
                          {"J0(1)", catalog::bessel_j0().function(), BoundKind::BesselJ0},
                          {"A22(1)", catalog::apq(2, 2).function(), BoundKind::A22}};
  const unsigned long qmax = 10000;
  std::string detail;
  bool ok = true;
  for (const auto& c : cases) {
    const long kappa = paper_exponent(c.kind, 1).get_si() - 1;
    const long digits = static_cast<long>(std::ceil((kappa + 2) * std::log10(static_cast<double>(qmax)))) + 10;
    auto t0 = std::chrono::steady_clock::now();
    auto r = liouville_scan(evaluate(c.f, num(Q, 1), digits).value, kappa, qmax);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool pass = r.all_excluded && !r.exact_zero && r.c_min.abs_lower().sign() > 0 && secs < 120;
    ok = ok && pass;
    detail += (detail.empty() ? "" : "; ") + c.name + " kappa=" + std::to_string(kappa) + " c_min=" + r.c_min.to_string(4) +
              " at q=" + r.argmin_q.get_str() + (pass ? "" : " FAILED");
  }
  return {ok, detail};
}

Outcome c10_scan() {
  auto Q = NumberField::rationals();
  auto rep = linear_form_scan({constant_one(Q), catalog::exp().function()}, num(Q, 1), 200, 1);
  if (rep.minimum_value.abs_lower().sign() <= 0) return {false, "minimum not certified positive"};
  // Convergents p/q of e with p <= 200, from criterion 8's expansion.
  std::set<std::pair<BigInt, BigInt>> conv;
  for (const auto& c : e_cf.convergents)
    if (c.p <= 200) conv.insert({c.p, c.q});
  std::set<std::pair<BigInt, BigInt>> rec;
  for (const auto& r : rep.records) {
    BigInt p = abs(r.lambda[0].rational_part().get_num()), qd = abs(r.lambda[1].rational_part().get_num());
    if (qd != 0) rec.insert({p, qd});
  }
  BigInt mp = abs(rep.minimum.lambda[0].rational_part().get_num()), mq = abs(rep.minimum.lambda[1].rational_part().get_num());
  bool argmin_ok = conv.count({mp, mq}) > 0;
  std::string list;
  for (const auto& [p, qd] : rec) list += (list.empty() ? "" : " ") + p.get_str() + "/" + qd.get_str();
  return {rec == conv && argmin_ok, "min H|Lambda| = " + rep.minimum_value.to_string(6) + " at " + mp.get_str() + "/" + mq.get_str() +
                                        "; record set {" + list + "} " + (rec == conv ? "==" : "!=") + " convergents"};
}

Outcome c11_bounds() {
  struct Row {
    BoundKind k;
    unsigned long d, N, D;
    long expect;
  };
  std::vector<Row> rows{{BoundKind::Trmes, 1, 2, 1, 1}, {BoundKind::Trmes, 1, 2, 3, 3}, {BoundKind::Trmes, 1, 2, 7, 7},
                        {BoundKind::Exp, 1, 1, 1, 2},   {BoundKind::BesselJ0, 1, 1, 1, 3}, {BoundKind::A22, 1, 1, 1, 5},
                        {BoundKind::Theorem1, 2, 2, 1, 7}, {BoundKind::Exp, 2, 1, 1, 8}};
  for (const auto& r : rows)
    if (paper_exponent(r.k, r.d, r.N, r.D) != r.expect)
      return {false, "kind " + std::to_string(static_cast<int>(r.k)) + " d=" + std::to_string(r.d) + " gives " +
                         paper_exponent(r.k, r.d, r.N, r.D).get_str()};
  return {true, std::to_string(rows.size()) + " table entries exact"};
}

Outcome c12_descent() {
  auto K = gauss();
  auto c = catalog::cos(K).function();
  NFElement i = NFElement::generator(K);
  auto r = relation_descend({i + BigRational(1), -(i + BigRational(1))}, {c, c}, num(K, 1), 60);
  bool exact = r.coeffs.size() == 2 && r.coeffs[0] == num(K, 2) && r.coeffs[1] == num(K, -2);
  bool zero = r.descended_value.contains_zero() && r.descended_value.radius().to_rational() <= detail::pow10_neg(60);
  return {exact && zero, "descended (" + r.coeffs[0].to_string() + ", " + r.coeffs[1].to_string() + "), value " +
                             r.descended_value.to_string(3)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double limit;  // seconds, 0 = none
    std::function<Outcome()> run;
  };
  std::vector<Criterion> all{
      {"catalog correctness", 10, c1_catalog},     {"evaluation", 10, c2_evaluation},
      {"conjugation laws", 0, c3_conjugation},     {"norm construction", 0, c4_norm},
      {"normal-basis decomposition", 0, c5_normal_basis}, {"desingularization", 30, c6_desing},
      {"division round trips", 0, c7_division},     {"exponent consistency", 60, c8_exponent},
      {"Liouville exclusion", 360, c9_liouville},  {"linear-form scan", 0, c10_scan},
      {"bound tables", 0, c11_bounds},             {"trace descent", 0, c12_descent},
  };
  int failures = 0;
  for (std::size_t k = 0; k < all.size(); ++k) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = all[k].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (all[k].limit > 0 && secs > all[k].limit) {
      o.pass = false;
      o.detail += " (over the " + fmt(all[k].limit) + " s limit)";
    }
    if (!o.pass) ++failures;
    std::printf("%s %2zu %-28s %8.2f s  %s\n", o.pass ? "PASS" : "FAIL", k + 1, all[k].name, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(all.size()) - failures, all.size());
  return failures;
}
