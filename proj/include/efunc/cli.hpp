#pragma once

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "efunc/catalog.hpp"
#include "efunc/desing.hpp"
#include "efunc/dioph.hpp"
#include "efunc/efun.hpp"
#include "efunc/error.hpp"
#include "efunc/numeval.hpp"
#include "efunc/specfile.hpp"

namespace efunc {

namespace cli {

/// A real number given on the command line: exact enclosure plus a ball.
struct Value {
  RationalInterval interval;
  ComplexBall ball;
};

inline NFElement parse_point(const std::string& text, const NumberField::Ptr& K) { return parse_element(text, K); }

/// SPEC@POINT, "MID+/-RAD", or an exact rational/decimal.
inline Value parse_value(const std::string& text, long digits) {
  if (auto at = text.rfind('@'); at != std::string::npos) {
    EObject obj = resolve_spec(text.substr(0, at));
    NFElement z = parse_point(text.substr(at + 1), obj.field);
    ComplexBall b = evaluate(obj.function(), z, digits).value;
    require(b.may_be_real(), ErrorCode::InvalidInput, "value is not real: " + b.to_string(20));
    ComplexBall r = b;
    r.make_real();
    BigFloat im(64);
    mpfr_abs(im.get(), b.mid_im().get(), MPFR_RNDU);
    r.add_error(im);
    return {r.real_interval(), r};
  }
  const mpfr_prec_t prec = static_cast<mpfr_prec_t>(std::max<long>(digits, 20) * 4 + 64);
  if (auto pm = text.find("+/-"); pm != std::string::npos) {
    BigRational mid = detail::parse_rational(text.substr(0, pm));
    BigRational rad = detail::parse_rational(text.substr(pm + 3));
    require(rad >= 0, ErrorCode::InvalidInput, "radius must be non-negative");
    return {{mid - rad, mid + rad}, ComplexBall::real_with_radius(mid, rad, prec)};
  }
  BigRational q = detail::parse_rational(text);
  return {{q, q}, ComplexBall::real_with_radius(q, BigRational(0), prec)};
}

inline std::string elem_text(const NFElement& a) { return a.to_t_expression(); }

inline void print_matrix(std::ostream& out, const RatMatrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out << "  ";
    for (std::size_t j = 0; j < m.cols(); ++j) out << (j ? ", " : "") << m(i, j).to_string();
    out << "\n";
  }
}

inline void print_matrix(std::ostream& out, const Matrix<Poly>& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out << "  ";
    for (std::size_t j = 0; j < m.cols(); ++j) out << (j ? ", " : "") << poly_to_string(m(i, j));
    out << "\n";
  }
}

inline void print_coeffs(std::ostream& out, const EFunction& f, std::size_t count) {
  for (std::size_t n = 0; n < count; ++n) out << elem_text(f.coeff(n)) << "\n";
}

inline std::string print_object(const EObject& obj) {
  if (obj.vec) return print_spec(*obj.vec, obj.component);
  std::ostringstream out;
  out << "# explicit coefficient stream\n";
  if (obj.stream && obj.stream->bound())
    out << "bound: " << obj.stream->bound()->scale.get_str() << ", " << obj.stream->bound()->rate.get_str() << "\n";
  return out.str();
}

inline std::vector<Certificate> read_certificates(const std::string& path, const NumberField::Ptr& K) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::InvalidInput, "cannot read certificate file '" + path + "'");
  std::vector<Certificate> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    if (detail::trim(line).empty()) continue;
    auto parts = detail::split(line, ';');
    require(parts.size() == 2, ErrorCode::SyntaxError, "certificate line " + std::to_string(lineno) + ": expected 'ALPHA ; POLY'");
    out.push_back({parse_element(parts[0], K), parse_poly(parts[1], K)});
  }
  return out;
}

inline std::string yes_no(bool b) { return b ? "yes" : "no"; }

}  // namespace cli

/// Runs the command line `args` (without the program name). Returns the
/// process exit status.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using namespace cli;
  CLI::App app{"Exact E-function toolkit", "efunc"};
  app.require_subcommand(1);
  std::function<void()> action;

  // catalog
  auto* cat = app.add_subcommand("catalog", "List or show built-in E-functions");
  std::vector<std::string> cat_args;
  cat->add_option("what", cat_args, "list | show NAME [ARGS]")->required()->expected(1, -1);
  cat->callback([&] {
    action = [&] {
      if (cat_args[0] == "list") {
        for (const auto& n : catalog::names()) out << n << "\n";
        return;
      }
      require(cat_args[0] == "show" && cat_args.size() >= 2, ErrorCode::InvalidInput, "usage: catalog list | catalog show NAME [ARGS]");
      std::vector<std::string> w(cat_args.begin() + 1, cat_args.end());
      EObject obj = catalog::lookup(w);
      out << "# " << obj.description << "\n";
      if (!obj.vec) {
        std::string g;
        for (const auto& x : w) g += (g.empty() ? "" : " ") + x;
        out << "generator: " << g << "\n";
      }
      out << print_object(obj);
    };
  });

  // coeffs
  std::string spec, spec2, at_text, by_text, alpha_text, cert_path, kind_text;
  std::vector<std::string> specs;
  std::size_t count = 10;
  long digits = 30;
  std::size_t sigma = 0, embedding = 0;
  bool machine = false;
  auto* co = app.add_subcommand("coeffs", "Dump exact coefficients a_0..a_N of f = sum a_n z^n/n!");
  co->add_option("SPEC", spec, "catalog name or spec file")->required();
  co->add_option("-n", count, "last index N")->required();
  co->callback([&] {
    action = [&] { print_coeffs(out, resolve_spec(spec).function(), count + 1); };
  });

  // eval
  auto* ev = app.add_subcommand("eval", "Evaluate at a point with a certified radius");
  ev->add_option("SPEC", spec)->required();
  ev->add_option("--at", at_text, "field element, [c0, c1, ...], or MID+/-RAD")->required();
  ev->add_option("--digits", digits, "target radius 10^-D")->default_val(30);
  ev->add_option("--embedding", embedding, "embedding index k (value of f^sigma at sigma(z0))")->default_val(0);
  ev->add_flag("--machine", machine, "exact binary output");
  ev->callback([&] {
    action = [&] {
      EObject obj = resolve_spec(spec);
      EvalResult r = at_text.find("+/-") != std::string::npos
                         ? evaluate_at(obj.function(), parse_value(at_text, digits).ball, digits)
                         : evaluate(obj.function(), parse_point(at_text, obj.field), digits, embedding);
      out << "value: " << (machine ? r.value.to_machine_string() : r.value.to_string(static_cast<int>(digits) + 2)) << "\n";
      out << "terms: " << r.terms << "\n";
      out << "certification: " << (r.heuristic ? "heuristic" : "rigorous") << "\n";
    };
  });

  // conjugate
  auto* cj = app.add_subcommand("conjugate", "Apply an automorphism coefficientwise");
  cj->add_option("SPEC", spec)->required();
  cj->add_option("--sigma", sigma, "automorphism index")->required();
  cj->add_option("-n", count, "for explicit streams: last index")->default_val(10);
  cj->callback([&] {
    action = [&] {
      EObject obj = resolve_spec(spec);
      if (obj.vec) {
        out << print_spec(conjugate_evector(*obj.vec, sigma), obj.component);
      } else {
        print_coeffs(out, conjugate(obj.function(), sigma), count + 1);
      }
    };
  });

  // norm
  auto* nm = app.add_subcommand("norm", "Galois norm prod_sigma f^sigma (rational coefficients)");
  nm->add_option("SPEC", spec)->required();
  nm->add_option("-n", count, "last index")->default_val(10);
  nm->callback([&] {
    action = [&] {
      EObject obj = resolve_spec(spec);
      EFunction f = obj.function();
      EFunction g = galois_norm(f);
      print_coeffs(out, g, count + 1);
      if (obj.vec && !obj.field->is_rational_field()) {
        auto [pv, idx] = galois_norm_evector(f);
        auto a = g.coeffs(count + 1);
        auto b = pv.component(idx).coeffs(count + 1);
        bool ok = true;
        for (std::size_t n = 0; n <= count; ++n) ok = ok && a[n].rational_part() == b[n].rational_part() && b[n].is_rational();
        require(ok, ErrorCode::RationalityViolation, "product-system stream disagrees with the norm stream");
        out << "# product system dimension " << pv.dim() << ", streams agree\n";
      }
    };
  });

  // decompose-basis
  auto* db = app.add_subcommand("decompose-basis", "Split g = sum sigma(alpha) g_sigma with g_sigma over Q");
  db->add_option("SPEC", spec)->required();
  db->add_option("--alpha", alpha_text, "normal-basis element (default: search)");
  db->add_option("-n", count, "last index")->default_val(10);
  db->callback([&] {
    action = [&] {
      EObject obj = resolve_spec(spec);
      NFElement alpha = alpha_text.empty() ? normal_basis_element(obj.field) : parse_element(alpha_text, obj.field);
      auto parts = normal_basis_decompose(obj.function(), alpha);
      out << "# alpha = " << elem_text(alpha) << "\n";
      for (std::size_t s = 0; s < parts.size(); ++s) {
        out << "sigma " << s << ":";
        for (std::size_t n = 0; n <= count; ++n) out << " " << elem_text(parts[s].coeff(n));
        out << "\n";
      }
      EFunction back = normal_basis_reconstruct(parts, alpha);
      for (std::size_t n = 0; n <= count; ++n)
        require(back.coeff(n) == obj.function().coeff(n), ErrorCode::HeuristicCheckFailed, "reconstruction failed");
      out << "# reconstruction exact to n = " << count << "\n";
    };
  });

  // product
  auto* pr = app.add_subcommand("product", "Product of two E-functions (system when both are system-backed)");
  pr->add_option("SPEC1", spec)->required();
  pr->add_option("SPEC2", spec2)->required();
  pr->add_option("-n", count, "for explicit streams: last index")->default_val(10);
  pr->callback([&] {
    action = [&] {
      EObject a = resolve_spec(spec), b = resolve_spec(spec2);
      if (a.vec && b.vec) {
        EVector p = product_evector(*a.vec, *b.vec);
        out << print_spec(p, a.component * b.vec->dim() + b.component);
      } else {
        print_coeffs(out, a.function() * b.function(), count + 1);
      }
    };
  });

  // sympow
  std::size_t D = 2;
  auto* sp = app.add_subcommand("sympow", "System for all degree-D monomials in the components");
  sp->add_option("SPEC", spec)->required();
  sp->add_option("-D", D, "degree")->required();
  sp->callback([&] {
    action = [&] {
      EObject obj = resolve_spec(spec);
      require(obj.vec.has_value(), ErrorCode::SystemRequired, "sympow needs a system-backed spec");
      out << print_spec(symmetric_power(*obj.vec, D));
    };
  });

  // desing
  bool no_indep = false;
  std::size_t order = 200;
  auto* ds = app.add_subcommand("desing", "Remove non-zero singularities: f = M e, e' = B e");
  ds->add_option("SPEC", spec)->required();
  ds->add_flag("--no-independence-check", no_indep, "skip the heuristic independence test");
  ds->add_option("--order", order, "verification order")->default_val(200);
  ds->callback([&] {
    action = [&] {
      EObject obj = resolve_spec(spec);
      require(obj.vec.has_value(), ErrorCode::SystemRequired, "desing needs a system-backed spec");
      DesingOptions o;
      o.check_independence = !no_indep;
      o.verify_order = order;
      DesingResult r = desingularize(*obj.vec, o);
      out << "steps: " << r.steps.size() << "\n";
      for (const auto& s : r.steps) out << "  alpha = " << elem_text(s.alpha) << "\n";
      out << "B:\n";
      print_matrix(out, r.B.matrix());
      out << "M:\n";
      print_matrix(out, r.M);
      out << "e seeds:\n";
      for (const auto& row : r.e.seeds()) {
        out << "  ";
        for (std::size_t n = 0; n < row.size(); ++n) out << (n ? ", " : "") << elem_text(row[n]);
        out << "\n";
      }
      out << "# verified f = M e and e' = B e to order " << order << "\n";
    };
  });

  // divide
  auto* dv = app.add_subcommand("divide", "Formal quotient g = f / D (D(0) != 0)");
  dv->add_option("SPEC", spec)->required();
  dv->add_option("--by", by_text, "polynomial in z")->required();
  dv->add_option("-n", count, "last index")->default_val(10);
  dv->callback([&] {
    action = [&] {
      EObject obj = resolve_spec(spec);
      EFunction g = divide_by_poly(obj.function(), parse_poly(by_text, obj.field));
      print_coeffs(out, g, count + 1);
      auto rep = growth_report(g, std::max<std::size_t>(count, 2));
      out << "# growth: C_hat = " << rep.c_hat << ", stabilization = " << rep.stabilization << "\n";
    };
  });

  // pqg
  auto* pq = app.add_subcommand("pqg", "Decompose f = P + Q g from value certificates");
  pq->add_option("SPEC", spec)->required();
  pq->add_option("--cert", cert_path, "file with lines 'ALPHA ; POLY' asserting f(ALPHA) = POLY(ALPHA)")->required();
  pq->add_option("-n", count, "coefficients of g to print")->default_val(10);
  pq->callback([&] {
    action = [&] {
      EObject obj = resolve_spec(spec);
      auto certs = read_certificates(cert_path, obj.field);
      Decomposition d = decompose(obj.function(), certs);
      out << "P: " << poly_to_string(d.P) << "\n";
      out << "Q: " << poly_to_string(d.Q) << "\n";
      out << "g:";
      for (std::size_t n = 0; n <= count; ++n) out << " " << elem_text(d.g.coeff(n));
      out << "\n";
      for (std::size_t c = 0; c < certs.size(); ++c)
        out << "g(" << elem_text(certs[c].alpha) << "): "
            << (d.g_at_alpha[c].consistent_with_zero() ? "consistent with zero (certificate list may be incomplete)" : "nonzero certified")
            << "\n";
    };
  });

  // cf
  std::size_t terms = 40;
  auto* cf = app.add_subcommand("cf", "Continued fraction certified by the enclosure");
  std::string value_text;
  cf->add_option("VALUE", value_text, "SPEC@POINT, MID+/-RAD, or an exact rational")->required();
  cf->add_option("--terms", terms, "maximum number of partial quotients")->default_val(40);
  cf->add_option("--digits", digits, "evaluation digits for SPEC@POINT")->default_val(60);
  cf->callback([&] {
    action = [&] {
      Value v = parse_value(value_text, digits);
      ContinuedFraction c = continued_fraction(v.interval, terms);
      out << "quotients:";
      for (const auto& a : c.quotients) out << " " << a.get_str();
      out << "\nconvergents:\n";
      for (const auto& k : c.convergents) out << "  " << k.p.get_str() << "/" << k.q.get_str() << "\n";
      out << "status: " << (c.terminated ? "terminated" : c.precision_stop ? "PrecisionStop" : "complete") << "\n";
    };
  });

  // exponent
  auto* ex = app.add_subcommand("exponent", "Empirical irrationality exponent from convergents");
  ex->add_option("VALUE", value_text)->required();
  ex->add_option("--digits", digits, "evaluation digits")->default_val(200);
  ex->add_option("--kind", kind_text, "compare with the exponent of this bound kind at d = 1");
  ex->callback([&] {
    action = [&] {
      Value v = parse_value(value_text, digits);
      ContinuedFraction c = continued_fraction(v.interval, 100000);
      if (c.terminated) fail(ErrorCode::RationalDetected, "value is rational: " + c.convergents.back().p.get_str() + "/" + c.convergents.back().q.get_str());
      ExponentReport r = exponent_estimate(v.ball, c);
      out << "samples:\n";
      for (const auto& s : r.samples) out << "  " << s.q.get_str() << " " << std::setprecision(6) << s.mu << "\n";
      out << "convergents used: " << r.samples.size() << " (dropped " << r.dropped << ")\n";
      out << "estimate: " << std::setprecision(6) << r.estimate << "\n";
      if (!kind_text.empty()) {
        auto k = parse_bound_kind(kind_text);
        require(k.has_value(), ErrorCode::InvalidInput, "unknown bound kind '" + kind_text + "'");
        BigInt kappa = paper_exponent(*k, 1, 2, 1);
        out << "bound exponent: " << kappa.get_str() << (r.estimate <= kappa.get_d() ? " (estimate within)" : " (estimate above)") << "\n";
      }
    };
  });

  // scan
  long hmax = 20, kappa = 1;
  bool no_constant = false;
  std::size_t budget = 4000000;
  unsigned jobs = 1;
  auto* sc = app.add_subcommand("scan", "Exhaustive linear-form scan of (1, f_1, ...) at a point");
  sc->add_option("SPEC", specs, "one or more specs")->required()->expected(1, -1);
  sc->add_option("--hmax", hmax, "height bound")->required();
  sc->add_option("--kappa", kappa, "exponent in H^kappa |Lambda|")->required();
  sc->add_option("--at", at_text, "point z0")->default_val("1");
  sc->add_option("--digits", digits, "evaluation digits")->default_val(60);
  sc->add_option("--budget", budget, "maximum N * number of forms")->default_val(4000000);
  sc->add_option("--jobs", jobs, "worker threads")->default_val(1);
  sc->add_flag("--no-constant", no_constant, "do not prepend the constant function 1");
  sc->callback([&] {
    action = [&] {
      std::vector<EFunction> fs;
      NumberField::Ptr K;
      for (const auto& s : specs) {
        EObject obj = resolve_spec(s);
        if (!K) K = obj.field;
        fs.push_back(obj.function());
      }
      if (!no_constant) fs.insert(fs.begin(), EFunction::polynomial(poly_const(NFElement(K, 1))));
      ScanOptions o;
      o.digits = digits;
      o.budget = budget;
      o.jobs = jobs;
      auto r = linear_form_scan(fs, parse_point(at_text, K), hmax, kappa, o);
      auto lam = [](const std::vector<NFElement>& l) {
        std::string s = "(";
        for (std::size_t i = 0; i < l.size(); ++i) s += (i ? ", " : "") + elem_text(l[i]);
        return s + ")";
      };
      out << "forms: " << r.forms << "\n";
      if (r.power_basis_caveat) out << "# coefficients range over Z[theta], possibly a proper subring of the integers of K\n";
      out << "minimum H^" << kappa << "|Lambda|: " << r.minimum_value.to_string(12) << " at " << lam(r.minimum.lambda) << "\n";
      out << "records:\n";
      for (const auto& rec : r.records) out << "  H=" << rec.height.get_str() << " " << lam(rec.lambda) << " |Lambda|=" << rec.value.to_string(8) << "\n";
      out << "vanishing candidates: " << r.vanishing_candidates.size() << "\n";
      for (std::size_t i = 0; i < std::min<std::size_t>(r.vanishing_candidates.size(), 10); ++i)
        out << "  " << lam(r.vanishing_candidates[i]) << "\n";
    };
  });

  // liouville
  unsigned long qmax = 10000;
  long ldigits = 0;
  auto* lv = app.add_subcommand("liouville", "min over q <= Q of q^kappa |q xi - p|");
  lv->add_option("VALUE", value_text)->required();
  lv->add_option("--kappa", kappa, "exponent")->required();
  lv->add_option("--qmax", qmax, "largest denominator")->default_val(10000);
  lv->add_option("--digits", ldigits, "evaluation digits (default: enough for the precondition)");
  lv->callback([&] {
    action = [&] {
      long dg = ldigits;
      if (dg <= 0) dg = static_cast<long>(std::ceil((kappa + 2) * std::log10(static_cast<double>(qmax)))) + 10;
      Value v = parse_value(value_text, dg);
      LiouvilleReport r = liouville_scan(v.ball, kappa, qmax);
      out << "c_min: " << r.c_min.to_string(12) << "\n";
      out << "argmin: q=" << r.argmin_q.get_str() << " p=" << r.argmin_p.get_str() << "\n";
      if (r.exact_zero) {
        out << "exact zero: value is " << r.argmin_p.get_str() << "/" << r.argmin_q.get_str() << "\n";
      } else {
        out << "certified positive: " << yes_no(r.all_excluded) << "\n";
      }
    };
  });

  // bounds
  unsigned long bd = 1, bN = 1, bD = 1;
  auto* bo = app.add_subcommand("bounds", "Exponent kappa of the lower bounds");
  bo->add_option("--kind", kind_text, "theorem1 | exp | besselJ0 | A22 | trmes")->required();
  bo->add_option("-d", bd, "field degree")->required();
  bo->add_option("-N", bN, "number of functions")->default_val(1);
  bo->add_option("-D", bD, "symmetric power degree")->default_val(1);
  bo->callback([&] {
    action = [&] {
      auto k = parse_bound_kind(kind_text);
      require(k.has_value(), ErrorCode::InvalidInput, "unknown bound kind '" + kind_text + "'");
      out << paper_exponent(*k, bd, bN, bD).get_str() << "\n";
    };
  });

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  try {
    if (action) action();
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace efunc
