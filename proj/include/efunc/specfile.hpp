#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "efunc/catalog.hpp"
#include "efunc/error.hpp"
#include "efunc/parser.hpp"

namespace efunc {

// Spec file, one object per file:
//
//   # comment
//   field: -2, 0, 1            minimal polynomial, constant term first
//   automorphism: -t           one line per automorphism image (identity implied)
//   system:                    N rows of comma-separated rational functions
//     1 + 2*z/(z^2 - 2)
//   seeds:                     N rows of Taylor coefficients (of z^n)
//     -2
//   bound: 1, 2                optional K, C with |sigma(a_n)| <= K C^n
//   component: 0               optional
//
// or `generator: apq 2 2` in place of system/seeds.

struct SpecFile {
  std::vector<BigRational> minpoly{0, 1};
  std::vector<std::string> automorphisms;  // t-expressions
  std::vector<std::string> system;         // raw rows
  std::vector<std::string> seeds;          // raw rows
  std::string generator;
  std::optional<std::pair<BigRational, BigRational>> bound;
  std::size_t component = 0;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

inline std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

inline BigRational parse_rational(const std::string& s) {
  RatFun r = parse_ratfun(s, NumberField::rationals());
  if (!r.is_constant()) fail(ErrorCode::SyntaxError, "expected a rational number, got \"" + s + "\"");
  return r.num().coeff(0).rational_part();
}

}  // namespace detail

inline SpecFile parse_spec_text(const std::string& text) {
  SpecFile spec;
  std::istringstream in(text);
  std::string line, section;
  std::size_t lineno = 0;
  auto bad = [&](const std::string& what) { fail(ErrorCode::SyntaxError, "line " + std::to_string(lineno) + ": " + what); };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::string t = detail::trim(line);
    if (t.empty()) continue;
    const auto colon = t.find(':');
    const std::string key = colon == std::string::npos ? "" : detail::trim(t.substr(0, colon));
    if (!key.empty() && key.find_first_not_of("abcdefghijklmnopqrstuvwxyz_") == std::string::npos) {
      const std::string rest = detail::trim(t.substr(colon + 1));
      section.clear();
      if (key == "field") {
        spec.minpoly.clear();
        for (const auto& c : detail::split(rest, ',')) spec.minpoly.push_back(detail::parse_rational(c));
      } else if (key == "automorphism") {
        spec.automorphisms.push_back(rest);
      } else if (key == "system" || key == "seeds") {
        section = key;
        if (!rest.empty()) (key == "system" ? spec.system : spec.seeds).push_back(rest);
      } else if (key == "generator") {
        spec.generator = rest;
      } else if (key == "bound") {
        auto parts = detail::split(rest, ',');
        if (parts.size() != 2) bad("bound needs two values K, C");
        spec.bound = std::make_pair(detail::parse_rational(parts[0]), detail::parse_rational(parts[1]));
      } else if (key == "component") {
        try {
          spec.component = static_cast<std::size_t>(std::stoul(rest));
        } catch (const std::exception&) {
          bad("component must be a non-negative integer");
        }
      } else {
        bad("unknown key '" + key + "'");
      }
      continue;
    }
    if (section == "system") {
      spec.system.push_back(t);
    } else if (section == "seeds") {
      spec.seeds.push_back(t);
    } else {
      bad("text outside a section: \"" + t + "\"");
    }
  }
  if (!spec.generator.empty() && (!spec.system.empty() || !spec.seeds.empty()))
    fail(ErrorCode::SyntaxError, "give either a generator or system + seeds, not both");
  if (spec.generator.empty() && (spec.system.empty() || spec.seeds.empty()))
    fail(ErrorCode::SyntaxError, "spec needs a generator or both system and seeds");
  return spec;
}

inline NumberField::Ptr build_field(const SpecFile& spec) {
  if (spec.minpoly.size() == 2 && spec.minpoly[1] == 1 && spec.automorphisms.empty()) {
    if (spec.minpoly[0] == 0) return NumberField::rationals();
  }
  QPoly m(spec.minpoly, BigRational(0));
  // Images are t-expressions; parse them in a provisional field without
  // automorphisms, then pass coordinates.
  auto bare = NumberField::create(m);
  std::vector<std::vector<BigRational>> images;
  for (const auto& a : spec.automorphisms) images.push_back(parse_element(a, bare).coords());
  return images.empty() ? bare : NumberField::create(m, images);
}

inline EObject build_object(const SpecFile& spec) {
  auto K = build_field(spec);
  EObject obj;
  if (!spec.generator.empty()) {
    obj = catalog::lookup(detail::words(spec.generator), K);
  } else {
    const std::size_t N = spec.system.size();
    require(spec.seeds.size() == N, ErrorCode::InvalidInput, "need one seed row per system row");
    RatMatrix A(N, N, RatFun(poly_zero(K)));
    for (std::size_t i = 0; i < N; ++i) {
      auto cells = detail::split(spec.system[i], ',');
      require(cells.size() == N, ErrorCode::InvalidInput, "system row " + std::to_string(i) + " has " + std::to_string(cells.size()) +
                                                              " entries, expected " + std::to_string(N));
      for (std::size_t j = 0; j < N; ++j) A(i, j) = parse_ratfun(cells[j], K);
    }
    std::vector<std::vector<NFElement>> seeds;
    for (const auto& row : spec.seeds) {
      std::vector<NFElement> r;
      for (const auto& c : detail::split(row, ',')) r.push_back(parse_element(c, K));
      seeds.push_back(std::move(r));
    }
    std::optional<CoefficientBound> bound;
    if (spec.bound) bound = CoefficientBound{spec.bound->first, spec.bound->second};
    obj.field = K;
    obj.vec = EVector::from_system(DifferentialSystem(K, A), seeds, bound);
    obj.description = "system of dimension " + std::to_string(N);
  }
  if (spec.bound && obj.stream) obj.stream->set_bound(CoefficientBound{spec.bound->first, spec.bound->second});
  if (spec.component) {
    require(obj.vec && spec.component < obj.vec->dim(), ErrorCode::InvalidInput, "component index out of range");
    obj.component = spec.component;
  }
  return obj;
}

inline std::string rational_list(const std::vector<BigRational>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + v[i].get_str();
  return out;
}

/// Canonical text of a system-backed vector; parse_spec_text inverts it.
inline std::string print_spec(const EVector& v, std::size_t component = 0) {
  const auto& K = v.field();
  std::ostringstream out;
  if (!K->is_rational_field() || K->minpoly().degree() != 1 || K->minpoly()[0] != 0) {
    out << "field: " << rational_list(K->minpoly().coeffs()) << "\n";
    for (std::size_t s = 1; s < K->automorphism_count(); ++s)
      out << "automorphism: " << NFElement(K, K->automorphism_image(s)).to_t_expression() << "\n";
  }
  out << "system:\n";
  for (std::size_t i = 0; i < v.dim(); ++i) {
    out << "  ";
    for (std::size_t j = 0; j < v.dim(); ++j) out << (j ? ", " : "") << v.system()(i, j).to_string();
    out << "\n";
  }
  out << "seeds:\n";
  for (const auto& row : v.seeds()) {
    out << "  ";
    for (std::size_t n = 0; n < row.size(); ++n) out << (n ? ", " : "") << row[n].to_t_expression();
    out << "\n";
  }
  if (v.bound()) out << "bound: " << v.bound()->scale.get_str() << ", " << v.bound()->rate.get_str() << "\n";
  if (component) out << "component: " << component << "\n";
  return out.str();
}

/// SPEC argument: a catalog name with arguments ("apq 2 2") or a file path.
inline EObject resolve_spec(const std::string& arg) {
  auto w = detail::words(arg);
  require(!w.empty(), ErrorCode::InvalidInput, "empty SPEC argument");
  const auto names = catalog::names();
  for (const auto& n : names)
    if (detail::words(n)[0] == w[0] && w[0] != "") {
      std::ifstream probe(arg);
      if (!probe) return catalog::lookup(w);
    }
  if (w[0] == "j0") return catalog::lookup(w);
  std::ifstream in(arg);
  if (!in) fail(ErrorCode::InvalidInput, "'" + arg + "' is neither a catalog entry nor a readable spec file");
  std::stringstream buf;
  buf << in.rdbuf();
  return build_object(parse_spec_text(buf.str()));
}

}  // namespace efunc
