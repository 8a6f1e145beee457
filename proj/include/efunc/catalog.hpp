#pragma once

#include <optional>
#include <string>
#include <vector>

#include "efunc/efun.hpp"
#include "efunc/error.hpp"
#include "efunc/parser.hpp"

namespace efunc {

/// A named object: either a system-backed vector (with a selected component)
/// or a bare stream.
struct EObject {
  NumberField::Ptr field;
  std::optional<EVector> vec;
  std::optional<EFunction> stream;
  std::size_t component = 0;
  std::string description;

  EFunction function() const { return vec ? vec->component(component) : *stream; }
  bool has_system() const { return vec.has_value(); }
};

namespace catalog {

inline RatMatrix matrix(const NumberField::Ptr& K, const std::vector<std::vector<std::string>>& rows) {
  RatMatrix A(rows.size(), rows.size(), RatFun(poly_zero(K)));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) A(i, j) = parse_ratfun(rows[i][j], K);
  return A;
}

inline std::vector<NFElement> elems(const NumberField::Ptr& K, const std::vector<BigRational>& v) {
  std::vector<NFElement> out;
  for (const auto& x : v) out.emplace_back(K, x);
  return out;
}

inline EObject exp(const NumberField::Ptr& K = NumberField::rationals()) {
  DifferentialSystem S(K, matrix(K, {{"1"}}));
  return {K, EVector::from_system(S, {elems(K, {1})}, CoefficientBound{1, 1}), std::nullopt, 0, "exp(z): f' = f"};
}

/// e^(alpha z): f' = alpha f.
inline EObject exp_scaled(const NFElement& alpha) {
  const auto& K = alpha.field();
  DifferentialSystem S(K, RatMatrix(1, 1, RatFun::constant(alpha)));
  auto v = EVector::from_system(S, {elems(K, {1})}, CoefficientBound{1, house_upper_rational(alpha)});
  return {K, v, std::nullopt, 0, "exp(alpha z) with alpha = " + alpha.to_t_expression()};
}

/// (J0, J0') from z y'' + y' + z y = 0.
inline EObject bessel_j0(const NumberField::Ptr& K = NumberField::rationals()) {
  DifferentialSystem S(K, matrix(K, {{"0", "1"}, {"-1", "-1/z"}}));
  auto v = EVector::from_system(S, {elems(K, {1, 0, BigRational(-1, 4)}), elems(K, {0, BigRational(-1, 2), 0})},
                                CoefficientBound{1, 1});
  return {K, v, std::nullopt, 0, "Bessel J0 as the vector (y, y') of z y'' + y' + z y = 0"};
}

/// (cos, sin) with f' = [[0, -1], [1, 0]] f.
inline EObject cos(const NumberField::Ptr& K = NumberField::rationals()) {
  DifferentialSystem S(K, matrix(K, {{"0", "-1"}, {"1", "0"}}));
  auto v = EVector::from_system(S, {elems(K, {1, 0}), elems(K, {0, 1})}, CoefficientBound{1, 1});
  return {K, v, std::nullopt, 0, "cos(z) as the vector (cos, sin)"};
}

/// (sin, cos) with f' = [[0, 1], [-1, 0]] f.
inline EObject sin(const NumberField::Ptr& K = NumberField::rationals()) {
  DifferentialSystem S(K, matrix(K, {{"0", "1"}, {"-1", "0"}}));
  auto v = EVector::from_system(S, {elems(K, {0, 1}), elems(K, {1, 0})}, CoefficientBound{1, 1});
  return {K, v, std::nullopt, 0, "sin(z) as the vector (sin, cos)"};
}

/// a_n = sum_k binom(n,k)^p binom(n+k,n)^q.
inline BigInt apq_coefficient(unsigned long n, unsigned long p, unsigned long q) {
  BigInt s = 0;
  for (unsigned long k = 0; k <= n; ++k) {
    BigInt a, b, t;
    mpz_bin_uiui(a.get_mpz_t(), n, k);
    mpz_bin_uiui(b.get_mpz_t(), n + k, n);
    mpz_pow_ui(a.get_mpz_t(), a.get_mpz_t(), p);
    mpz_pow_ui(b.get_mpz_t(), b.get_mpz_t(), q);
    s += a * b;
  }
  return s;
}

inline EObject apq(unsigned long p, unsigned long q, const NumberField::Ptr& K = NumberField::rationals()) {
  // sum_k binom(n,k)^p <= (sum_k binom(n,k))^max(p,1) and binom(n+k,n) <= 4^n.
  BigInt rate;
  mpz_ui_pow_ui(rate.get_mpz_t(), 2, std::max<unsigned long>(p, 1) + 2 * q);
  auto f = EFunction::explicit_stream(
      K, [K, p, q](std::size_t n) { return NFElement(K, BigRational(apq_coefficient(n, p, q))); },
      CoefficientBound{1, BigRational(rate)});
  return {K, std::nullopt, f, 0, "A_{" + std::to_string(p) + "," + std::to_string(q) + "}(z) = sum_n sum_k binom(n,k)^p binom(n+k,n)^q z^n/n!"};
}

inline std::vector<std::string> names() { return {"exp", "bessel-j0", "apq P Q", "exp-scaled ALPHA", "cos", "sin"}; }

/// Builtin by name with arguments, e.g. {"apq", "2", "2"}.
inline EObject lookup(const std::vector<std::string>& words, const NumberField::Ptr& K = NumberField::rationals()) {
  require(!words.empty(), ErrorCode::InvalidInput, "empty catalog name");
  const std::string& n = words[0];
  auto nargs = [&](std::size_t k) {
    require(words.size() == k + 1, ErrorCode::InvalidInput, "'" + n + "' takes " + std::to_string(k) + " argument(s)");
  };
  if (n == "exp") return nargs(0), exp(K);
  if (n == "bessel-j0" || n == "j0") return nargs(0), bessel_j0(K);
  if (n == "cos") return nargs(0), cos(K);
  if (n == "sin") return nargs(0), sin(K);
  if (n == "exp-scaled") {
    nargs(1);
    return exp_scaled(parse_element(words[1], K));
  }
  if (n == "apq") {
    nargs(2);
    long p = 0, q = 0;
    try {
      p = std::stol(words[1]);
      q = std::stol(words[2]);
    } catch (const std::exception&) {
      fail(ErrorCode::InvalidInput, "apq needs two non-negative integers");
    }
    require(p >= 0 && q >= 0, ErrorCode::InvalidInput, "apq needs two non-negative integers");
    return apq(static_cast<unsigned long>(p), static_cast<unsigned long>(q), K);
  }
  fail(ErrorCode::InvalidInput, "unknown catalog entry '" + n + "'");
}

}  // namespace catalog
}  // namespace efunc
