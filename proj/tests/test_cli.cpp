#include <sstream>

#include "efunc/cli.hpp"
#include "test_util.hpp"

using namespace efunc;
using namespace testutil;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string spec(const std::string& name) { return std::string(EFUNC_SPECS_DIR) + "/" + name; }

}  // namespace

TEST(Cli, CatalogList) {
  auto r = run({"catalog", "list"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "exp\nbessel-j0\napq P Q\nexp-scaled ALPHA\ncos\nsin\n");
}

TEST(Cli, CatalogShowRoundTrips) {
  auto r = run({"catalog", "show", "bessel-j0"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out,
            "# Bessel J0 as the vector (y, y') of z y'' + y' + z y = 0\n"
            "system:\n  0, 1\n  -1, -1/z\nseeds:\n  1, 0, -1/4\n  0, -1/2, 0\nbound: 1, 1\n");
  EObject obj = build_object(parse_spec_text(r.out));
  for (std::size_t n = 0; n < 20; ++n) EXPECT_EQ(obj.function().coeff(n), catalog::bessel_j0().function().coeff(n));
  auto g = run({"catalog", "show", "apq", "2", "2"});
  EXPECT_NE(g.out.find("generator: apq 2 2"), std::string::npos);
}

TEST(Cli, Coeffs) {
  EXPECT_EQ(run({"coeffs", "exp", "-n", "3"}).out, "1\n1\n1\n1\n");
  EXPECT_EQ(run({"coeffs", "apq 2 2", "-n", "3"}).out, "1\n5\n73\n1445\n");
  EXPECT_EQ(run({"coeffs", "bessel-j0", "-n", "4"}).out, "1\n0\n-1/2\n0\n3/8\n");
  EXPECT_EQ(run({"coeffs", "exp-scaled 2", "-n", "3"}).out, "1\n2\n4\n8\n");
}

TEST(Cli, Eval) {
  auto r = run({"eval", "exp", "--at", "1", "--digits", "20"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("value: 2.7182818284590452353", 0), 0u) << r.out;
  EXPECT_NE(r.out.find("certification: rigorous"), std::string::npos);
  auto m = run({"eval", "exp", "--at", "1/2", "--digits", "10", "--machine"});
  EXPECT_EQ(m.code, 0);
  auto b = run({"eval", "exp", "--at", "1+/-0", "--digits", "10"});
  EXPECT_EQ(b.out.rfind("value: 2.718281828", 0), 0u) << b.out;
  auto k = run({"eval", spec("exp_sqrt2.spec"), "--at", "1", "--digits", "15", "--embedding", "1"});
  EXPECT_EQ(k.out.rfind("value: 2.43116734434214", 0), 0u) << k.out;  // e^(-sqrt 2)
}

TEST(Cli, ConjugateAndNorm) {
  auto c = run({"conjugate", spec("exp_sqrt2.spec"), "--sigma", "1"});
  EXPECT_EQ(c.code, 0);
  EXPECT_NE(c.out.find("system:\n  -t\n"), std::string::npos) << c.out;
  EXPECT_EQ(run({"norm", spec("exp_sqrt2.spec"), "-n", "3"}).out, "1\n0\n0\n0\n# product system dimension 1, streams agree\n");
  EXPECT_EQ(run({"norm", spec("cos_gauss.spec"), "-n", "4"}).out, "1\n0\n-2\n0\n8\n# product system dimension 4, streams agree\n");
}

TEST(Cli, DecomposeBasis) {
  auto r = run({"decompose-basis", spec("exp_sqrt2.spec"), "--alpha", "1+t", "-n", "3"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "# alpha = 1 + t\nsigma 0: 1/2 1/2 1 1\nsigma 1: 1/2 -1/2 1 -1\n# reconstruction exact to n = 3\n");
}

TEST(Cli, ProductAndSympow) {
  EXPECT_EQ(run({"product", "exp", "cos"}).out, "system:\n  1, -1\n  1, 1\nseeds:\n  1\n  0\nbound: 1, 2\n");
  // e^z times sum 2^n z^n/n! is e^(3z).
  EXPECT_EQ(run({"product", "exp", "apq 1 0", "-n", "3"}).out, "1\n3\n9\n27\n");
  EXPECT_EQ(run({"sympow", "cos", "-D", "2"}).out, "system:\n  0, -2, 0\n  1, 0, -1\n  0, 2, 0\nseeds:\n  1\n  0\n  0\nbound: 1, 2\n");
  EXPECT_EQ(run({"sympow", "apq 1 1", "-D", "2"}).code, 3);  // SystemRequired
}

TEST(Cli, Desing) {
  auto r = run({"desing", spec("zm1_exp.spec")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "steps: 1\n  alpha = 1\nB:\n  1\nM:\n  z - 1\ne seeds:\n  1\n# verified f = M e and e' = B e to order 200\n");
  auto q2 = run({"desing", spec("z2m2_exp.spec")});
  EXPECT_NE(q2.out.find("M:\n  z^2 - 2\n"), std::string::npos) << q2.out;
}

TEST(Cli, DivideAndPqg) {
  auto d = run({"divide", "exp", "--by", "1 - z", "-n", "5"});
  EXPECT_EQ(d.code, 0);
  EXPECT_EQ(d.out.substr(0, 16), "1\n2\n5\n16\n65\n326\n");
  EXPECT_EQ(run({"divide", "exp", "--by", "z"}).code, 3);  // ConstantTermZero
  auto p = run({"pqg", spec("zm1_exp.spec"), "--cert", spec("zm1_exp.cert"), "-n", "4"});
  EXPECT_EQ(p.code, 0);
  EXPECT_EQ(p.out, "P: 0\nQ: z - 1\ng: 1 1 1 1 1\ng(1): nonzero certified\n");
}

TEST(Cli, ContinuedFractionAndExponent) {
  auto r = run({"cf", "exp@1", "--terms", "8"});
  EXPECT_EQ(r.out.rfind("quotients: 2 1 2 1 1 4 1 1\n", 0), 0u) << r.out;
  EXPECT_EQ(run({"cf", "1/3"}).out, "quotients: 0 3\nconvergents:\n  0/1\n  1/3\nstatus: terminated\n");
  auto x = run({"exponent", "exp@1", "--digits", "200", "--kind", "exp"});
  EXPECT_EQ(x.code, 0);
  EXPECT_NE(x.out.find("bound exponent: 2"), std::string::npos);
  EXPECT_EQ(run({"exponent", "5/7"}).code, 3);  // RationalDetected
}

TEST(Cli, LiouvilleAndScan) {
  auto l = run({"liouville", "exp@1", "--kappa", "1", "--qmax", "1000"});
  EXPECT_NE(l.out.find("argmin: q=71 p=193"), std::string::npos) << l.out;
  EXPECT_NE(l.out.find("certified positive: yes"), std::string::npos);
  EXPECT_NE(run({"liouville", "1/2", "--kappa", "1", "--qmax", "10"}).out.find("exact zero"), std::string::npos);
  auto s = run({"scan", "exp", "--hmax", "20", "--kappa", "1", "--jobs", "2"});
  EXPECT_EQ(s.code, 0);
  EXPECT_NE(s.out.find("forms: 1680"), std::string::npos);
  EXPECT_NE(s.out.find("at (19, -7)"), std::string::npos) << s.out;
  EXPECT_EQ(run({"scan", "exp", "--hmax", "2000", "--kappa", "1", "--budget", "10"}).code, 3);  // BudgetExceeded
}

TEST(Cli, Bounds) {
  EXPECT_EQ(run({"bounds", "--kind", "exp", "-d", "2"}).out, "8\n");
  EXPECT_EQ(run({"bounds", "--kind", "theorem1", "-d", "2", "-N", "2"}).out, "7\n");
  EXPECT_EQ(run({"bounds", "--kind", "trmes", "-d", "1", "-N", "2", "-D", "4"}).out, "4\n");
  EXPECT_EQ(run({"bounds", "--kind", "bogus", "-d", "1"}).code, 2);
}

TEST(Cli, UsageErrorsAndExitCodes) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"eval", "exp"}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"coeffs", "no-such-thing", "-n", "2"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(exit_code(ErrorCode::PrecisionExhausted), 4);
  EXPECT_EQ(exit_code(ErrorCode::IndependenceSuspect), 5);
  EXPECT_EQ(exit_code(ErrorCode::NotGalois), 3);
}

TEST(SpecFile, RoundTripIsIdentityOnCanonicalForms) {
  for (const char* name : {"exp_sqrt2.spec", "zm1_exp.spec", "z2m2_exp.spec", "cos_gauss.spec"}) {
    EObject a = resolve_spec(spec(name));
    std::string once = print_spec(*a.vec, a.component);
    EObject b = build_object(parse_spec_text(once));
    EXPECT_EQ(print_spec(*b.vec, b.component), once) << name;
    for (std::size_t n = 0; n < 30; ++n) EXPECT_EQ(a.function().coeff(n), b.function().coeff(n));
  }
}

TEST(SpecFile, SyntaxErrorsCarryLineNumbers) {
  try {
    parse_spec_text("system:\n  1\nwhat: 3\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SyntaxError);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  expect_code([] { parse_spec_text("system:\n  1\n"); }, ErrorCode::SyntaxError);
  expect_code([] { parse_spec_text("generator: exp\nsystem:\n 1\nseeds:\n 1\n"); }, ErrorCode::SyntaxError);
}
