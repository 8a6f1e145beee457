#include <set>

#include "test_util.hpp"

using namespace efunc;
using namespace testutil;

namespace {

ComplexBall value_at_one(const EFunction& f, long digits) { return evaluate(f, q(f.field(), 1), digits).value; }

EFunction one_over(const NumberField::Ptr& K) { return EFunction::polynomial(poly_const(q(K, 1))); }

}  // namespace

TEST(ContinuedFraction, EulerPattern) {
  auto cf = continued_fraction(value_at_one(catalog::exp().function(), 200), 60);
  ASSERT_GE(cf.quotients.size(), 60u);
  EXPECT_EQ(cf.quotients[0], 2);
  for (std::size_t i = 1; i < 60; ++i) {
    // e = [2; 1, 2, 1, 1, 4, 1, 1, 6, ...]
    BigInt expect = (i % 3 == 2) ? BigInt(2 * (i + 1) / 3) : BigInt(1);
    EXPECT_EQ(cf.quotients[i], expect) << i;
  }
  // Convergents satisfy p_k q_{k-1} - p_{k-1} q_k = (-1)^(k-1).
  for (std::size_t k = 1; k < cf.convergents.size(); ++k) {
    BigInt det = cf.convergents[k].p * cf.convergents[k - 1].q - cf.convergents[k - 1].p * cf.convergents[k].q;
    EXPECT_EQ(det, k % 2 ? 1 : -1);
  }
}

TEST(ContinuedFraction, GoldenRatioGivesFibonacci) {
  mpfr_prec_t p = 600;
  BigFloat s(p);
  mpfr_sqrt_ui(s.get(), 5, MPFR_RNDN);
  mpfr_add_ui(s.get(), s.get(), 1, MPFR_RNDN);
  mpfr_div_ui(s.get(), s.get(), 2, MPFR_RNDN);
  auto phi = ComplexBall::real_with_radius(s.to_rational(), BigRational(1, 1) / BigRational(BigInt(1) << 590), p);
  auto cf = continued_fraction(phi, 2000);
  EXPECT_GT(cf.convergents.size(), 300u);
  BigInt a = 1, b = 1;
  for (std::size_t k = 0; k < cf.convergents.size(); ++k) {
    EXPECT_EQ(cf.quotients[k], 1);
    EXPECT_EQ(cf.convergents[k].q, a);
    BigInt c = a + b;
    a = b, b = c;
  }
  EXPECT_TRUE(cf.precision_stop);
}

TEST(ContinuedFraction, RationalsTerminate) {
  auto cf = continued_fraction(RationalInterval{BigRational(1, 3), BigRational(1, 3)}, 10);
  EXPECT_TRUE(cf.terminated);
  ASSERT_EQ(cf.quotients.size(), 2u);
  EXPECT_EQ(cf.quotients[1], 3);
  auto cf2 = continued_fraction(RationalInterval{BigRational(355, 113), BigRational(355, 113)}, 10);
  EXPECT_EQ(cf2.convergents.back().p, 355);
  EXPECT_EQ(cf2.convergents.back().q, 113);
}

TEST(Exponent, EAndBessel) {
  auto ev = value_at_one(catalog::exp().function(), 200);
  auto rep = exponent_estimate(ev, continued_fraction(ev, 100000));
  EXPECT_GE(rep.samples.size(), 30u);
  EXPECT_GE(rep.estimate, 1.9);
  EXPECT_LE(rep.estimate, 2.2);
  auto jv = value_at_one(catalog::bessel_j0().function(), 150);
  auto rj = exponent_estimate(jv, continued_fraction(jv, 100000));
  EXPECT_LE(rj.estimate, 3.0);
}

TEST(Exponent, RationalRejected) {
  auto b = ComplexBall::from_rational(BigRational(1, 2), 256);
  auto cf = continued_fraction(RationalInterval{BigRational(1, 2), BigRational(1, 2)}, 10);
  expect_code([&] { exponent_estimate(b, cf); }, ErrorCode::RationalDetected);
}

TEST(Liouville, PositiveForE) {
  auto ev = value_at_one(catalog::exp().function(), 40);
  auto r = liouville_scan(ev, 1, 10000);
  EXPECT_TRUE(r.all_excluded);
  EXPECT_GT(r.c_min.abs_lower().to_double(), 0.0);
  // The minimum of q |q e - p| sits at a convergent denominator.
  auto cf = continued_fraction(ev, 100);
  bool found = false;
  for (const auto& c : cf.convergents) found = found || c.q == r.argmin_q;
  EXPECT_TRUE(found);
}

TEST(Liouville, ExactZeroAndPrecision) {
  auto half = ComplexBall::from_rational(BigRational(1, 2), 256);
  auto r = liouville_scan(half, 1, 10);
  EXPECT_TRUE(r.exact_zero);
  EXPECT_EQ(r.argmin_q, 2);
  auto rough = ComplexBall::real_with_radius(BigRational(1, 3), BigRational(1, 1000), 64);
  expect_code([&] { liouville_scan(rough, 2, 10000); }, ErrorCode::PrecisionTooLow);
}

TEST(Bounds, ExponentTable) {
  EXPECT_EQ(paper_exponent(BoundKind::Exp, 1), 2);
  EXPECT_EQ(paper_exponent(BoundKind::Exp, 2), 8);
  EXPECT_EQ(paper_exponent(BoundKind::BesselJ0, 1), 3);
  EXPECT_EQ(paper_exponent(BoundKind::A22, 1), 5);
  EXPECT_EQ(paper_exponent(BoundKind::Theorem1, 2, 2), 7);
  EXPECT_EQ(paper_exponent(BoundKind::Theorem1, 1, 2), 1);
  for (unsigned long D = 1; D < 6; ++D) EXPECT_EQ(paper_exponent(BoundKind::Trmes, 1, 2, D), BigInt(D));
  EXPECT_EQ(*parse_bound_kind("besselJ0"), BoundKind::BesselJ0);
  EXPECT_FALSE(parse_bound_kind("nope").has_value());
}

TEST(Scan, MinimaAtConvergentsOfE) {
  auto Q = testutil::Q();
  auto e = catalog::exp().function();
  auto rep = linear_form_scan({one_over(Q), e}, q(Q, 1), 200, 1);
  EXPECT_GT(rep.minimum_value.abs_lower().to_double(), 0.0);
  EXPECT_TRUE(rep.vanishing_candidates.empty());
  auto cf = continued_fraction(value_at_one(e, 60), 100);
  std::set<BigInt> dens;
  for (const auto& c : cf.convergents) dens.insert(c.q);
  for (const auto& r : rep.records) {
    BigInt qd = abs(r.lambda[1].rational_part().get_num());
    if (qd == 0) continue;  // the constant form -1 at H = 1
    EXPECT_TRUE(dens.count(qd)) << qd;
  }
  EXPECT_TRUE(dens.count(BigInt(abs(rep.minimum.lambda[1].rational_part().get_num()))));
}

TEST(Scan, JobsDoNotChangeTheResult) {
  auto Q = testutil::Q();
  std::vector<EFunction> fs{one_over(Q), catalog::exp().function(), catalog::bessel_j0().function()};
  ScanOptions o1, o3;
  o3.jobs = 3;
  auto a = linear_form_scan(fs, q(Q, 1), 6, 2, o1);
  auto b = linear_form_scan(fs, q(Q, 1), 6, 2, o3);
  EXPECT_EQ(a.forms, b.forms);
  EXPECT_EQ(a.minimum.lambda, b.minimum.lambda);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) EXPECT_EQ(a.records[i].lambda, b.records[i].lambda);
}

TEST(Scan, DetectsVanishingForms) {
  auto Q = testutil::Q();
  auto c = catalog::cos().function();
  auto rep = linear_form_scan({c, c}, q(Q, 1), 2, 1);
  EXPECT_FALSE(rep.vanishing_candidates.empty());
  for (const auto& l : rep.vanishing_candidates) EXPECT_EQ(l[0], -l[1]);
}

TEST(Scan, Budget) {
  auto Q = testutil::Q();
  ScanOptions o;
  o.budget = 100;
  expect_code([&] { linear_form_scan({one_over(Q), catalog::exp().function()}, q(Q, 1), 200, 1, o); }, ErrorCode::BudgetExceeded);
}

TEST(NormForm, DegreeOneIsTheFormItself) {
  auto Q = testutil::Q();
  auto rep = norm_linear_form({q(Q, 3), q(Q, -1)}, {one_over(Q), catalog::exp().function()}, q(Q, 1), 40);
  EXPECT_TRUE(rep.routes_agree);
  EXPECT_TRUE(rep.varpi_product.overlaps(rep.lambda));
  EXPECT_EQ(rep.varpi_product.mid_re().to_rational(), rep.lambda.mid_re().to_rational());
}

TEST(NormForm, QuadraticRoutesAgree) {
  auto K = sqrt2();
  auto es = catalog::exp_scaled(NFElement::generator(K)).function();
  auto rep = norm_linear_form({q(K, 1), q(K, 1)}, {one_over(K), es}, q(K, 1), 40);
  EXPECT_TRUE(rep.routes_agree);
  EXPECT_TRUE(rep.trivial_bound_holds);
  // (1 + e^sqrt2)(1 + e^-sqrt2) = 2 + 2 cosh(sqrt 2)
  EXPECT_NEAR(rep.varpi_product.mid_re().to_double(), 2 + 2 * std::cosh(std::sqrt(2.0)), 1e-12);
}

TEST(Descent, DuplicateCosOverGaussian) {
  auto K = gauss();
  auto c = catalog::cos(K).function();
  NFElement i = NFElement::generator(K);
  auto r = relation_descend({i + BigRational(1), -(i + BigRational(1))}, {c, c}, q(K, 1));
  ASSERT_EQ(r.coeffs.size(), 2u);
  EXPECT_EQ(r.coeffs[0], q(K, 2));
  EXPECT_EQ(r.coeffs[1], q(K, -2));
  EXPECT_EQ(r.index, 2u);
  EXPECT_TRUE(r.descended_value.contains_zero());
  EXPECT_LE(r.descended_value.radius().to_double(), 1e-59);
}

TEST(Bounds, Theorem1StrictlyIncreasing) {
  for (unsigned long d = 1; d < 5; ++d)
    for (unsigned long N = 2; N < 6; ++N) {
      EXPECT_LT(paper_exponent(BoundKind::Theorem1, d, N), paper_exponent(BoundKind::Theorem1, d + 1, N));
      EXPECT_LT(paper_exponent(BoundKind::Theorem1, d, N), paper_exponent(BoundKind::Theorem1, d, N + 1));
    }
}
