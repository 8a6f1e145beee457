#include <cmath>

#include "test_util.hpp"

using namespace efunc;
using namespace testutil;

TEST(BigFloat, RationalRoundTripIsExactForDyadics) {
  for (long num : {1L, -3L, 5L, 1023L}) {
    BigRational x(num, 1024);
    EXPECT_EQ(BigFloat::from_rational(x, 64, MPFR_RNDN).to_rational(), x);
  }
}

TEST(BigFloat, DirectedRoundingBracketsExactSum) {
  BigFloat a = BigFloat::from_rational(BigRational(1, 3), 53, MPFR_RNDN);
  BigFloat b = BigFloat::from_rational(BigRational(1, 7), 53, MPFR_RNDN);
  BigRational exact = a.to_rational() + b.to_rational();
  EXPECT_LE(rnd::add(a, b, MPFR_RNDD, 20).to_rational(), exact);
  EXPECT_GE(rnd::add(a, b, MPFR_RNDU, 20).to_rational(), exact);
}

TEST(ComplexBall, ArithmeticEnclosesExactRationalResults) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    BigRational x = rand_rational(rng), y = rand_rational(rng);
    if (y == 0) y = 1;
    auto bx = ComplexBall::from_rational(x, 40), by = ComplexBall::from_rational(y, 40);
    EXPECT_TRUE(encloses(bx + by, x + y));
    EXPECT_TRUE(encloses(bx - by, x - y));
    EXPECT_TRUE(encloses(bx * by, x * y));
    EXPECT_TRUE(encloses(bx / by, x / y));
    EXPECT_TRUE(encloses(bx.pow(5), x * x * x * x * x));
  }
}

TEST(ComplexBall, ZeroExclusionAndOverlap) {
  auto a = ComplexBall::real_with_radius(BigRational(1), BigRational(1, 2), 64);
  EXPECT_TRUE(a.excludes_zero());
  auto b = ComplexBall::real_with_radius(BigRational(1, 4), BigRational(1, 2), 64);
  EXPECT_TRUE(b.contains_zero());
  EXPECT_TRUE(a.overlaps(b));
  EXPECT_FALSE(a.overlaps(ComplexBall::from_integer(3, 64)));
}

TEST(Poly, DivmodReconstructs) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<BigRational> ca, cb;
    for (int i = 0; i < 7; ++i) ca.push_back(rand_rational(rng));
    for (int i = 0; i < 3; ++i) cb.push_back(rand_rational(rng));
    cb.push_back(BigRational(1));
    QPoly a(ca, BigRational(0)), b(cb, BigRational(0));
    auto [qq, r] = QPoly::divmod(a, b);
    EXPECT_EQ(qq * b + r, a);
    EXPECT_LT(r.degree(), b.degree());
  }
}

TEST(Poly, ExtendedGcdGivesBezoutIdentity) {
  QPoly a = qpoly({-1, 0, 1}) * qpoly({2, 1});  // (z^2-1)(z+2)
  QPoly b = qpoly({-1, 1}) * qpoly({5, 0, 1});  // (z-1)(z^2+5)
  auto [g, s, t] = poly_gcd_ext(a, b);
  EXPECT_EQ(g.monic(), qpoly({-1, 1}));
  EXPECT_EQ(s * a + t * b, g);
}

TEST(Poly, ComposeAndDerivative) {
  QPoly p = qpoly({1, 2, 3});
  QPoly shifted = p.compose(qpoly({1, 1}));  // p(z+1) = 3z^2 + 8z + 6
  EXPECT_EQ(shifted, qpoly({6, 8, 3}));
  EXPECT_EQ(p.derivative(), qpoly({2, 6}));
}

TEST(Linalg, VandermondeDeterminantMatchesProductFormula) {
  std::vector<BigRational> x{BigRational(1), BigRational(-2), BigRational(1, 3), BigRational(5, 2)};
  Matrix<BigRational> V(4, 4, BigRational(0));
  for (std::size_t i = 0; i < 4; ++i) {
    BigRational p = 1;
    for (std::size_t j = 0; j < 4; ++j, p *= x[i]) V(i, j) = p;
  }
  BigRational oracle = 1;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) oracle *= x[j] - x[i];
  EXPECT_EQ(determinant(V), oracle);
  auto inv = inverse(V);
  ASSERT_TRUE(inv.has_value());
  auto I = V * *inv;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(I(i, j), BigRational(i == j ? 1 : 0));
}

TEST(Linalg, KernelVectorsAnnihilate) {
  Matrix<BigRational> m(2, 4, BigRational(0));
  m(0, 0) = 1, m(0, 1) = 2, m(0, 2) = 3, m(0, 3) = 4;
  m(1, 0) = 2, m(1, 1) = 4, m(1, 2) = 7, m(1, 3) = 1;
  auto ker = kernel(m);
  EXPECT_EQ(ker.size(), 2u);
  for (const auto& v : ker)
    for (std::size_t i = 0; i < 2; ++i) {
      BigRational s = 0;
      for (std::size_t j = 0; j < 4; ++j) s += m(i, j) * v[j];
      EXPECT_EQ(s, 0);
    }
  EXPECT_EQ(rank(m), 2u);
}

TEST(NumberField, QuadraticArithmeticAgainstClosedForms) {
  auto K = sqrt2();
  NFElement t = NFElement::generator(K);
  EXPECT_EQ(t * t, q(K, 2));
  std::mt19937 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    BigRational a = rand_rational(rng), b = rand_rational(rng);
    NFElement x = elem(K, {a, b});
    EXPECT_EQ(x.trace(), 2 * a);
    EXPECT_EQ(x.norm(), a * a - 2 * b * b);
    if (!x.is_zero()) EXPECT_EQ(x * x.inverse(), q(K, 1));
  }
}

TEST(NumberField, AutomorphismsAreRingHomomorphisms) {
  for (auto K : {sqrt2(), gauss()}) {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
      NFElement x = rand_elem(K, rng), y = rand_elem(K, rng);
      for (std::size_t s = 0; s < K->automorphism_count(); ++s) {
        EXPECT_EQ((x * y).apply_automorphism(s), x.apply_automorphism(s) * y.apply_automorphism(s));
        EXPECT_EQ((x + y).apply_automorphism(s), x.apply_automorphism(s) + y.apply_automorphism(s));
      }
    }
  }
}

TEST(NumberField, EmbeddingsMatchDoubleArithmetic) {
  auto K = sqrt2();
  NFElement x = elem(K, {BigRational(1), BigRational(1)});
  double e0 = x.embed(0, 128).mid_re().to_double();
  double e1 = x.embed(1, 128).mid_re().to_double();
  EXPECT_NEAR(std::max(e0, e1), 1 + std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(std::min(e0, e1), 1 - std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(x.house(128).mid_re().to_double(), 1 + std::sqrt(2.0), 1e-14);
}

TEST(NumberField, GaussianFieldHasComplexConjugation) {
  auto K = gauss();
  auto cc = K->complex_conjugation();
  ASSERT_TRUE(cc.has_value());
  NFElement i = NFElement::generator(K);
  EXPECT_EQ(i.apply_automorphism(*cc), -i);
  EXPECT_FALSE(sqrt2()->complex_conjugation().has_value() && *sqrt2()->complex_conjugation() != 0);
}

TEST(NumberField, CyclicCubicAutomorphismSearch) {
  FieldOptions o;
  o.automorphism_search_height = 2;
  auto K = NumberField::create(qpoly({-1, -2, 1, 1}), {}, o);
  EXPECT_EQ(K->automorphism_count(), 3u);
  EXPECT_TRUE(K->is_galois());
  // Every image of theta is a root of the minimal polynomial.
  for (std::size_t s = 0; s < 3; ++s) {
    NFElement r(K, K->automorphism_image(s));
    EXPECT_TRUE((r * r * r + r * r - r * BigRational(2) - BigRational(1)).is_zero());
  }
}

TEST(NumberField, RejectsBadInput) {
  expect_code([] { NumberField::create(qpoly({-1, 0, 1}) * qpoly({-1, 1})); }, ErrorCode::NotSquarefree);
  expect_code([] { NumberField::create(qpoly({-2, 0, 1}), {{BigRational(1), BigRational(1)}}); }, ErrorCode::AutomorphismInvalid);
  expect_code([] { NumberField::create(qpoly({-2, 0, 1})).get()->require_galois("test"); }, ErrorCode::NotGalois);
}

TEST(NumberField, NormalBasisElement) {
  auto K = sqrt2();
  EXPECT_TRUE(is_normal_basis(elem(K, {BigRational(1), BigRational(1)})));
  EXPECT_FALSE(is_normal_basis(q(K, 1)));
  EXPECT_TRUE(is_normal_basis(normal_basis_element(K)));
}
