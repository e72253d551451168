#include <gtest/gtest.h>

#include "recap/capelli.hpp"

using namespace recap;

namespace {

using P = NCPoly<Rational>;
const Rational kQ(3, 5);

const Context<Rational>& dj2() {
  static const auto ctx = make_context(dj_fixed(2, kQ), fixed_field(kQ), 3);
  return ctx;
}
const Context<Rational>& dj1() {
  static const auto ctx = make_context(dj_fixed(1, kQ), fixed_field(kQ), 3);
  return ctx;
}
const Context<Rational>& flip2() {
  static const auto ctx = make_context(flip(2), fixed_field(Rational(1)), 3);
  return ctx;
}

IdentitySpec spec(IdentityId id, int k = 2, int p = 1, std::string alpha = "q") {
  IdentitySpec s;
  s.id = id;
  s.k = k;
  s.p = p;
  s.alpha = std::move(alpha);
  return s;
}

std::string describe(const VerificationReport& r) { return r.to_text(); }

char mch(int i, int j, int N) { return static_cast<char>(Gen{GenKind::m, i, j}.code(N)); }
char dch(int i, int j, int N) { return static_cast<char>(Gen{GenKind::d, i, j}.code(N)); }

}  // namespace

TEST(Identities, NamesRoundTrip) {
  for (const auto& [id, name] : identity_names()) EXPECT_EQ(parse_identity(name), id);
  EXPECT_THROW(parse_identity("capelli"), ConfigError);
}

TEST(Identities, SpecValidation) {
  EXPECT_THROW(spec(IdentityId::exchange_general, 2, 2).validate(2, 8), ConfigError);
  EXPECT_THROW(spec(IdentityId::exchange_general, 3, 0).validate(2, 8), ConfigError);
  EXPECT_THROW(spec(IdentityId::th, 0).validate(2, 8), ConfigError);
  EXPECT_THROW(spec(IdentityId::th, 9).validate(2, 8), ResourceCapError);
  EXPECT_THROW(verify(dj2(), spec(IdentityId::th, 5), 4), ResourceCapError);
}

TEST(Shifts, ColumnAndRowValues) {
  auto qs = make_context(dj_symbolic(1), symbolic_field(), 4);
  RatFunc q = RatFunc::q();
  EXPECT_TRUE(qs.column_shift(1).is_zero());
  EXPECT_EQ(qs.column_shift(2), q);
  EXPECT_EQ(qs.column_shift(3), q * q * q + q);
  EXPECT_EQ(qs.row_shift(2), RatFunc(-q.inverse()));
  // q^(k-1) (k-1)_q = q + q^3 + ... + q^(2k-3).
  for (int k = 2; k <= 5; ++k) {
    RatFunc sum = 0L;
    for (int e = 1; e <= 2 * k - 3; e += 2) sum = sum + qs.qf.pow(e);
    EXPECT_EQ(qs.column_shift(k), sum);
  }
}

TEST(Column, BaseCaseIsTautological) {
  auto [lhs, rhs] = column_sides(dj2(), 1, false, std::optional<Rational>(), false);
  Builder<Rational> b(dj2(), false);
  EXPECT_EQ(lhs, rhs);
  auto [l1, r1] = column_sides(dj1(), 1);
  EXPECT_EQ(l1(0, 0), P::term(Word(std::string{mch(0, 0, 1), dch(0, 0, 1)}), 1));
  EXPECT_EQ(l1, r1);
}

TEST(Column, OneDimensionalSecondOrder) {
  // N = 1, A^(2) = 0 so both sides vanish; S^(2) = 1 on the row side.
  auto rep = verify(dj1(), spec(IdentityId::th, 2));
  EXPECT_TRUE(rep.pass) << describe(rep);
  auto row = verify(dj1(), spec(IdentityId::th_s, 2));
  EXPECT_TRUE(row.pass) << describe(row);
}

TEST(Column, OneDimensionalRowClosedForm) {
  // m d (m d - q^-1) = q^-2 m m d d using d m = q^-2 m d + q^-1.
  const auto& ctx = dj1();
  P md = P::term(Word(std::string{mch(0, 0, 1), dch(0, 0, 1)}), 1);
  P lhs = ctx.qd.reduce(md * (md - P::constant(Rational(5, 3))));
  P rhs = P::term(Word(std::string{mch(0, 0, 1), mch(0, 0, 1), dch(0, 0, 1), dch(0, 0, 1)}), Rational(25, 9));
  EXPECT_EQ(lhs, ctx.qd.reduce(rhs));
}

class FixedIdentity : public ::testing::TestWithParam<IdentitySpec> {};

TEST_P(FixedIdentity, PassesForDJ2) {
  auto rep = verify(dj2(), GetParam());
  EXPECT_TRUE(rep.pass) << describe(rep);
  EXPECT_EQ(rep.residual_terms, 0u);
}

INSTANTIATE_TEST_SUITE_P(
    All, FixedIdentity,
    ::testing::Values(spec(IdentityId::th, 1), spec(IdentityId::th, 2), spec(IdentityId::th_s, 2),
                      spec(IdentityId::cap_as, 1), spec(IdentityId::cap_as, 2), spec(IdentityId::cap_s, 2),
                      spec(IdentityId::cap1), spec(IdentityId::mre), spec(IdentityId::re_ideal),
                      spec(IdentityId::h_copy, 2, 1), spec(IdentityId::h_copy, 2, 2),
                      spec(IdentityId::exchange_general, 2, 1), spec(IdentityId::exchange_general, 3, 2),
                      spec(IdentityId::shift_scan, 2, 1, "q"), spec(IdentityId::consum, 3),
                      spec(IdentityId::classical)));

TEST(ShiftScan, WrongShiftsFail) {
  for (const char* alpha : {"0", "1", "q^2", "q^(-1)"}) {
    auto rep = verify(dj2(), spec(IdentityId::shift_scan, 2, 1, alpha));
    EXPECT_FALSE(rep.pass) << alpha;
    EXPECT_GT(rep.residual_terms, 0u) << alpha;
    EXPECT_FALSE(rep.residual_sample.empty());
  }
}

TEST(ShiftScan, BadAlphaIsConfigError) {
  EXPECT_THROW(verify(dj2(), spec(IdentityId::shift_scan, 2, 1, "q +")), ParseError);
}

TEST(Lazy, AgreesWithEager) {
  auto [le, re] = column_sides(dj2(), 2, true);
  auto [ll, rl] = column_sides(dj2(), 2, false);
  EXPECT_EQ(le, ll);
  EXPECT_EQ(re, rl);
  IdentitySpec s = spec(IdentityId::th, 2);
  s.lazy = true;
  EXPECT_TRUE(verify(dj2(), s).pass);
}

TEST(Elementary, Examples) {
  EXPECT_EQ(e_k(dj2(), 0), P::constant(1));
  Builder<Rational> b(dj2(), true);
  EXPECT_EQ(e_k(dj2(), 1), r_trace_all(b.M(), dj2().c));
  EXPECT_EQ(e_k(dj1(), 1), P::term(Word(std::string{mch(0, 0, 1)}), Rational(5, 3)));
  EXPECT_TRUE(e_k(dj2(), 3).is_zero());
}

TEST(Determinants, OneDimensional) {
  auto dm = det_r(dj1()), dd = det_rinv(dj1());
  P m = P::term(Word(std::string{mch(0, 0, 1)}), 1), d = P::term(Word(std::string{dch(0, 0, 1)}), 1);
  EXPECT_EQ(dm.r_trace_form, m);
  EXPECT_EQ(dm.uv_form, m);
  EXPECT_EQ(dd.r_trace_form, d);
  EXPECT_EQ(dd.uv_form, d);
}

TEST(Determinants, ClassicalTwoByTwo) {
  const int N = 2;
  auto dm = det_r(flip2());
  P expect = P::term(Word(std::string{mch(0, 0, N), mch(1, 1, N)}), 1) -
             P::term(Word(std::string{mch(0, 1, N), mch(1, 0, N)}), 1);
  EXPECT_EQ(flip2().qd.reduce(dm.uv_form), flip2().qd.reduce(expect));
  EXPECT_EQ(flip2().qd.reduce(dm.r_trace_form), flip2().qd.reduce(expect));
}

TEST(Determinants, FormsAgreeAndAreGaugeInvariant) {
  auto dm = det_r(dj2());
  EXPECT_EQ(dm.r_trace_form, dm.uv_form);
  auto dd = det_rinv(dj2());
  EXPECT_EQ(dd.r_trace_form, dd.uv_form);
  auto g = regauge(dj2().uv, Rational(-5, 11));
  EXPECT_EQ(det_r(dj2(), &g).uv_form, dm.uv_form);
  EXPECT_EQ(det_rinv(dj2(), &g).uv_form, dd.uv_form);
}

TEST(Cap1, ReportRecordsReversedOrder) {
  auto rep = verify(dj2(), spec(IdentityId::cap1));
  ASSERT_TRUE(rep.pass) << describe(rep);
  bool saw_recorded = false;
  for (const auto& c : rep.checks)
    if (c.recorded) saw_recorded = true;
  EXPECT_TRUE(saw_recorded);
}

TEST(Cap1, OneDimensional) {
  auto rep = verify(dj1(), spec(IdentityId::cap1));
  EXPECT_TRUE(rep.pass) << describe(rep);
}

TEST(Classical, FlipMatchesOracle) {
  for (auto id : {IdentityId::th, IdentityId::th_s, IdentityId::cap1, IdentityId::exchange_general}) {
    auto rep = verify(flip2(), spec(id, 2, 1));
    EXPECT_TRUE(rep.pass) << describe(rep);
  }
  auto rep = verify(flip2(), spec(IdentityId::classical));
  EXPECT_TRUE(rep.pass) << describe(rep);
  int oracle_checks = 0;
  for (const auto& c : rep.checks)
    if (c.name.find("oracle") != std::string::npos) ++oracle_checks;
  EXPECT_EQ(oracle_checks, 2);
}

TEST(Classical, WeylCapelli) {
  for (int N = 1; N <= 3; ++N) EXPECT_TRUE(weyl::capelli(N, weyl::capelli_shifts(N)).holds) << N;
  EXPECT_TRUE(weyl::capelli(2, {1, 0}).holds);
  EXPECT_FALSE(weyl::capelli(2, {0, 0}).holds);
  EXPECT_EQ(weyl::capelli(1, {0}).lhs, weyl::Element::x(1, 0, 0) * weyl::Element::d(1, 0, 0));
}

TEST(Weyl, CanonicalCommutation) {
  using weyl::Element;
  // D_ij differentiates x_ji.
  Element d12 = Element::d(2, 0, 1), x21 = Element::x(2, 1, 0), x12 = Element::x(2, 0, 1);
  EXPECT_EQ(d12 * x21 - x21 * d12, Element::constant(2, 1));
  EXPECT_TRUE((d12 * x12 - x12 * d12).is_zero());
  Element sq = x21 * x21;
  EXPECT_EQ(d12 * sq, sq * d12 + weyl::Q(2) * x21);
}

TEST(Consum, NonHeckeControl) {
  auto rep = verify(dj2(), spec(IdentityId::consum, 3));
  ASSERT_TRUE(rep.pass) << describe(rep);
  bool control = false;
  for (const auto& c : rep.checks)
    if (c.name.find("non-Hecke") != std::string::npos) control = c.pass;
  EXPECT_TRUE(control);
}

TEST(Symbolic, ColumnIdentityOverRationalFunctions) {
  auto ctx = make_context(dj_symbolic(2), symbolic_field(), 2);
  auto rep = verify(ctx, spec(IdentityId::th, 2));
  EXPECT_TRUE(rep.pass) << describe(rep);
  EXPECT_EQ(rep.backend, "symbolic");
  auto bad = verify(ctx, spec(IdentityId::shift_scan, 2, 1, "1"));
  EXPECT_FALSE(bad.pass);
}

TEST(Rigor, CertifiesColumnIdentity) {
  auto ctx = make_context(dj_symbolic(2), symbolic_field(), 2);
  auto rep = verify_rigorous(ctx, spec(IdentityId::th, 2));
  EXPECT_TRUE(rep.pass) << describe(rep);
  EXPECT_EQ(rep.backend, "rigor");
  EXPECT_GE(rep.q_points.size(), static_cast<std::size_t>(rep.params["degree_bound"].get<int>()) + 1);
  auto bad = verify_rigorous(ctx, spec(IdentityId::shift_scan, 2, 1, "1"));
  EXPECT_FALSE(bad.pass);
  EXPECT_THROW(verify_rigorous(ctx, spec(IdentityId::consum, 2)), ConfigError);
}

TEST(Rigor, SamplePointsAvoidExcludedValues) {
  auto pts = sample_points(6, [](const Rational& q0) { return q0 != 2; });
  EXPECT_EQ(pts.size(), 6u);
  for (const auto& p : pts) {
    EXPECT_NE(p, 2);
    EXPECT_NE(p, 1);
    EXPECT_GT(p, 0);
  }
  EXPECT_EQ(pts[0], Rational(1, 2));
}

TEST(DJ3, ColumnIdentityAtFixedQ) {
  auto ctx = make_context(dj_fixed(3, Rational(2)), fixed_field(Rational(2)), 3);
  auto rep = verify(ctx, spec(IdentityId::th, 2));
  EXPECT_TRUE(rep.pass) << describe(rep);
  auto mre = verify(ctx, spec(IdentityId::mre));
  EXPECT_TRUE(mre.pass) << describe(mre);
}
