#pragma once

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "efunc/error.hpp"
#include "efunc/number_field.hpp"
#include "efunc/ratfun.hpp"

namespace efunc {

/// Recursive-descent parser for rational functions in z over K, with t the
/// field generator:
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('+' | '-') unary | power
///   power   := primary ('^' ['-'] integer)?
///   primary := number | 't' | 'z' | '(' expr ')'
///
/// Numbers are integers or decimals ("1.25" is read exactly as 5/4).
class RatFunParser {
 public:
  RatFunParser(std::string_view text, NumberField::Ptr field) : s_(text), K_(std::move(field)) {}

  RatFun parse() {
    RatFun r = expr();
    skip();
    if (pos_ != s_.size()) error("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return r;
  }

 private:
  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorCode::SyntaxError, "at position " + std::to_string(pos_) + ": " + what + " in \"" + std::string(s_) + "\"");
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  RatFun expr() {
    RatFun acc = term();
    while (true) {
      if (accept('+')) {
        acc = acc + term();
      } else if (accept('-')) {
        acc = acc - term();
      } else {
        return acc;
      }
    }
  }
  RatFun term() {
    RatFun acc = unary();
    while (true) {
      if (accept('*')) {
        acc = acc * unary();
      } else if (accept('/')) {
        std::size_t at = pos_;
        RatFun d = unary();
        if (d.is_zero()) {
          pos_ = at;
          fail(ErrorCode::DivisionByZeroPolynomial, "at position " + std::to_string(at) + ": division by zero");
        }
        acc = acc / d;
      } else {
        return acc;
      }
    }
  }
  RatFun unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }
  RatFun power() {
    RatFun base = primary();
    if (!accept('^')) return base;
    bool neg = accept('-');
    skip();
    if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) error("expected integer exponent");
    long e = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      e = e * 10 + (s_[pos_++] - '0');
      if (e > 100000) error("exponent too large");
    }
    if (neg && base.is_zero()) fail(ErrorCode::DivisionByZeroPolynomial, "zero raised to a negative power");
    return base.pow(neg ? -e : e);
  }
  RatFun primary() {
    skip();
    if (pos_ >= s_.size()) error("unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      RatFun r = expr();
      if (!accept(')')) error("expected ')'");
      return r;
    }
    if (c == 't') {
      ++pos_;
      return RatFun::constant(NFElement::generator(K_));
    }
    if (c == 'z') {
      ++pos_;
      return RatFun::z(K_);
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return RatFun::constant(NFElement(K_, number()));
    error("unexpected character '" + std::string(1, c) + "'");
  }
  BigRational number() {
    std::string digits;
    std::size_t frac = 0;
    bool dot = false;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || (s_[pos_] == '.' && !dot))) {
      if (s_[pos_] == '.') {
        dot = true;
      } else {
        digits += s_[pos_];
        if (dot) ++frac;
      }
      ++pos_;
    }
    if (digits.empty()) error("malformed number");
    BigRational q(BigInt(digits, 10), 1);
    if (frac) {
      BigInt p10;
      mpz_ui_pow_ui(p10.get_mpz_t(), 10, frac);
      q /= BigRational(p10);
      q.canonicalize();
    }
    return q;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  NumberField::Ptr K_;
};

inline RatFun parse_ratfun(std::string_view text, const NumberField::Ptr& K) { return RatFunParser(text, K).parse(); }

/// Field element from "[c0, c1, ...]" or from a constant expression in t.
inline NFElement parse_element(std::string_view text, const NumberField::Ptr& K) {
  std::size_t b = text.find_first_not_of(" \t");
  if (b != std::string_view::npos && text[b] == '[') {
    std::size_t e = text.find(']', b);
    if (e == std::string_view::npos) fail(ErrorCode::SyntaxError, "unterminated coordinate list");
    if (text.find_first_not_of(" \t", e + 1) != std::string_view::npos)
      fail(ErrorCode::SyntaxError, "trailing characters after coordinate list");
    std::vector<BigRational> coords;
    std::string_view body = text.substr(b + 1, e - b - 1);
    std::size_t start = 0;
    while (start <= body.size()) {
      std::size_t comma = body.find(',', start);
      std::string_view item = body.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      RatFun r = parse_ratfun(item, NumberField::rationals());
      if (!r.is_constant()) fail(ErrorCode::SyntaxError, "coordinate must be a rational constant");
      coords.push_back(r.num().coeff(0).rational_part());
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    require(coords.size() <= K->degree(), ErrorCode::InvalidInput, "too many coordinates for the field degree");
    return NFElement(K, coords);
  }
  RatFun r = parse_ratfun(text, K);
  if (!r.is_constant()) fail(ErrorCode::SyntaxError, "expected a field element (no z), got \"" + std::string(text) + "\"");
  return r.num().coeff(0);
}

inline Poly parse_poly(std::string_view text, const NumberField::Ptr& K) {
  RatFun r = parse_ratfun(text, K);
  if (!r.is_polynomial()) fail(ErrorCode::SyntaxError, "expected a polynomial in z, got \"" + std::string(text) + "\"");
  return r.num();
}

// ---------------------------------------------------------------------------
// Canonical printing. parse(print(x)) == x for every RatFun.

inline std::string element_expression(const NFElement& c) { return c.to_t_expression(); }

inline std::string poly_to_string(const Poly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  for (int k = p.degree(); k >= 0; --k) {
    const NFElement& c = p[static_cast<std::size_t>(k)];
    if (c.is_zero()) continue;
    std::size_t nonzero = 0;
    for (const auto& x : c.coords())
      if (sgn(x) != 0) ++nonzero;
    bool compound = nonzero > 1;
    bool neg = false;
    std::string coef;
    if (compound) {
      coef = "(" + c.to_t_expression() + ")";
    } else {
      neg = c.is_rational() ? sgn(c.rational_part()) < 0 : false;
      NFElement a = c;
      if (!c.is_rational()) {
        for (const auto& x : c.coords())
          if (sgn(x) < 0) neg = true;
      }
      if (neg) a = -c;
      coef = a.to_t_expression();
    }
    std::string mono;
    if (k >= 1) mono = k == 1 ? "z" : "z^" + std::to_string(k);
    std::string piece;
    if (mono.empty()) {
      piece = coef;
    } else if (coef == "1") {
      piece = mono;
    } else {
      piece = coef + "*" + mono;
    }
    if (out.empty()) {
      out = neg ? "-" + piece : piece;
    } else {
      out += neg ? " - " : " + ";
      out += piece;
    }
  }
  return out;
}

inline std::string RatFun::to_string() const {
  if (is_polynomial()) return poly_to_string(num_);
  std::string n = poly_to_string(num_);
  std::string d = poly_to_string(den_);
  bool n_simple = num_.degree() <= 0 && n.find_first_of(" +") == std::string::npos;
  bool d_simple = d == "z";
  return (n_simple ? n : "(" + n + ")") + "/" + (d_simple ? d : "(" + d + ")");
}

}  // namespace efunc
