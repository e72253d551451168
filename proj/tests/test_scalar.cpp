#include <gtest/gtest.h>

#include "recap/scalar.hpp"
#include "support.hpp"

using namespace recap;
using recap::testing::random_point;
using recap::testing::random_ratfunc;
using recap::testing::random_rational;

namespace {

RatFunc q() { return RatFunc::q(); }

bool defined_at(const RatFunc& x, const Rational& q0) { return sgn(x.den().eval(q0)) != 0; }

}  // namespace

TEST(FixedBackend, AddsThirds) {
  auto qf = fixed_field(Rational(2));
  EXPECT_EQ(Rational(1, 3) + Rational(2, 3), qf.one());
}

TEST(SymbolicBackend, InverseOfQMinusQInverse) {
  RatFunc x = q() - q().inverse();
  EXPECT_EQ(x.inverse() * x, RatFunc(Rational(1)));
  EXPECT_EQ((q() * q().inverse()).str(), "1");
}

TEST(SymbolicBackend, DivisionByZeroIsDistinct) {
  EXPECT_THROW(RatFunc().inverse(), DivisionByZero);
  EXPECT_THROW(inverse(Rational(0)), DivisionByZero);
}

TEST(QNumbers, SmallValues) {
  auto qf = symbolic_field();
  EXPECT_EQ(qf.qnum(0).str(), "0");
  EXPECT_EQ(qf.qnum(1).str(), "1");
  EXPECT_EQ(qf.qnum(2), q() + q().inverse());
  EXPECT_EQ(qf.qnum(3), q() * q() + RatFunc(Rational(1)) + qf.pow(-2));
}

TEST(QNumbers, EqualKAtQOne) {
  auto qf = fixed_field(Rational(1));
  for (int k = 0; k <= 10; ++k) EXPECT_EQ(qf.qnum(k), Rational(k));
}

TEST(QNumbers, PalindromicUpToTen) {
  auto qf = symbolic_field();
  for (int k = 1; k <= 10; ++k) {
    RatFunc x = qf.qnum(k);
    ASSERT_TRUE(x.is_laurent());
    const LaurentPoly& p = x.num();
    EXPECT_EQ(p.low(), -p.high());
    for (int e = p.low(); e <= p.high(); ++e) EXPECT_EQ(p.coefficient(e), p.coefficient(-e));
  }
}

TEST(QPowers, Examples) {
  auto qf = fixed_field(Rational(3, 2));
  EXPECT_EQ(qf.pow(0), Rational(1));
  EXPECT_EQ(qf.pow(2), Rational(9, 4));
  auto qs = symbolic_field();
  EXPECT_EQ(qs.pow(-1) * qs.pow(1), RatFunc(Rational(1)));
}

TEST(Evaluation, Examples) {
  EXPECT_EQ(eval_at(q() + q().inverse(), Rational(2)), Rational(5, 2));
  EXPECT_EQ(eval_at(RatFunc(Rational(1)), Rational(7, 3)), Rational(1));
  RatFunc pole = (q() - RatFunc(Rational(1))).inverse();
  EXPECT_THROW(eval_at(pole, Rational(1)), PoleError);
}

TEST(Parser, Examples) {
  EXPECT_EQ(parse_ratfunc("q - q^(-1)"), q() - q().inverse());
  EXPECT_TRUE(parse_ratfunc("0").is_zero());
  RatFunc x = parse_ratfunc("(q^2-1)/(q-1)");
  EXPECT_TRUE(x.is_laurent());
  // Oracle: polynomial long division, checked pointwise.
  for (int t = 2; t < 8; ++t) EXPECT_EQ(eval_at(x, Rational(t)), Rational(t + 1));
  EXPECT_EQ(x.str(), "q + 1");
}

TEST(Parser, Grammar) {
  EXPECT_EQ(parse_ratfunc("2*q^3 - 3/4"), RatFunc(LaurentPoly(0, std::vector<Rational>{Rational(-3, 4), Rational(0), Rational(0), Rational(2)})));
  EXPECT_EQ(parse_ratfunc("-(q+1)*(q-1)"), RatFunc(Rational(1)) - q() * q());
  EXPECT_EQ(parse_ratfunc("q^(-2)"), symbolic_field().pow(-2));
  EXPECT_EQ(parse_rational("3/5"), Rational(3, 5));
}

TEST(Parser, ErrorsCarryPositions) {
  try {
    parse_ratfunc("q + * 2");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position, 4u);
  }
  EXPECT_THROW(parse_ratfunc("(q + 1"), ParseError);
  EXPECT_THROW(parse_ratfunc("q^x"), ParseError);
  EXPECT_THROW(parse_ratfunc("1/(q-q)"), ParseError);
  EXPECT_THROW(parse_rational("q"), ParseError);
}

TEST(Canonical, UniqueStoredForm) {
  RatFunc a = parse_ratfunc("(q^2 - 1)/(q - 1)");
  RatFunc b = parse_ratfunc("q + 1");
  EXPECT_EQ(a.str(), b.str());
  RatFunc c = parse_ratfunc("(2*q)/(4*q^3 + 4*q)");
  EXPECT_EQ(c.str(), parse_ratfunc("1/(2*q^2 + 2)").str());
  // Denominator monic with nonzero constant term.
  EXPECT_EQ(c.den().low(), 0);
  EXPECT_EQ(c.den().leading(), 1);
  EXPECT_EQ(RatFunc().str(), "0");
}

TEST(Canonical, RecanonicalizingIsIdentity) {
  for (int i = 0; i < 50; ++i) {
    RatFunc x = random_ratfunc();
    RatFunc y(x.num(), x.den());
    EXPECT_EQ(x.str(), y.str());
    EXPECT_EQ(x.num().coeffs(), y.num().coeffs());
  }
}

TEST(FieldAxioms, SymbolicRandomTriples) {
  for (int i = 0; i < 40; ++i) {
    RatFunc a = random_ratfunc(), b = random_ratfunc(), c = random_ratfunc();
    EXPECT_EQ((a + b) + c, a + (b + c));
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_EQ(a * (b + c), a * b + a * c);
    EXPECT_EQ(a + b, b + a);
    if (!a.is_zero()) EXPECT_EQ(a * a.inverse(), RatFunc(Rational(1)));
    EXPECT_TRUE((a - a).is_zero());
  }
}

TEST(FieldAxioms, FixedRandomTriples) {
  for (int i = 0; i < 200; ++i) {
    Rational a = random_rational(), b = random_rational(), c = random_rational();
    EXPECT_EQ(Rational((a + b) + c), Rational(a + (b + c)));
    EXPECT_EQ(Rational(a * (b + c)), Rational(a * b + a * c));
    if (sgn(a) != 0) EXPECT_EQ(Rational(a * inverse(a)), Rational(1));
  }
}

TEST(Evaluation, CommutesWithRingOperations) {
  for (int i = 0; i < 60; ++i) {
    RatFunc a = random_ratfunc(), b = random_ratfunc();
    Rational q0 = random_point();
    if (!defined_at(a, q0) || !defined_at(b, q0)) continue;
    EXPECT_EQ(eval_at(a + b, q0), Rational(eval_at(a, q0) + eval_at(b, q0)));
    EXPECT_EQ(eval_at(a * b, q0), Rational(eval_at(a, q0) * eval_at(b, q0)));
  }
}

TEST(QConfigTest, RejectsForbiddenValues) {
  EXPECT_THROW(QConfig::fixed(Rational(0)).validate(), ConfigError);
  EXPECT_THROW(QConfig::fixed(Rational(-1)).validate(), ConfigError);
  EXPECT_THROW(QConfig::fixed(Rational(1)).validate(), ConfigError);
  EXPECT_NO_THROW(QConfig::fixed(Rational(1), true).validate());
  EXPECT_NO_THROW(QConfig::fixed(Rational(3, 5)).validate());
  EXPECT_NO_THROW(QConfig::symbolic().validate());
}

TEST(ScalarVariant, MixedBackendsAreAConfigurationError) {
  Scalar a(Rational(2)), b(parse_ratfunc("q"));
  EXPECT_THROW(a + b, ConfigError);
  EXPECT_THROW(a * b, ConfigError);
  EXPECT_EQ((a + a).str(), "4");
  EXPECT_EQ(eval_at(parse_scalar("q + q^(-1)"), Rational(2)), Scalar(Rational(5, 2)));
  EXPECT_THROW(eval_at(a, Rational(2)), ConfigError);
}

TEST(TrackedScalar, BoundsFollowRingOperations) {
  Tracked q0 = Tracked::with_bounds(Rational(2), 0, 1, 1, 2);
  Tracked one(Rational(1));
  Tracked x = q0 * q0 + one;  // q^2 + 1
  EXPECT_EQ(x.value, 5);
  EXPECT_EQ(x.lo, 0);
  EXPECT_EQ(x.hi, 2);
  EXPECT_EQ(x.points_needed(), 3);
  Tracked deep = Tracked::with_bounds(Rational(1, 3), 1, 0, 1, 2);
  Tracked s = deep + x;  // (N + x Delta) / Delta: window widens by deg Delta
  EXPECT_EQ(s.depth, 1);
  EXPECT_EQ(s.hi, 4);
  EXPECT_TRUE(Tracked().structurally_zero());
  EXPECT_FALSE((x - x).structurally_zero());
  EXPECT_TRUE(vanishes(x - x));
  EXPECT_THROW(x.inverse(), ConfigError);
  EXPECT_EQ(q0.inverse().lo, -1);
}
