#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

#include "recap/rcatalog.hpp"

using namespace recap;

namespace {

RatFunc q() { return RatFunc::q(); }

std::string write_temp(const std::string& name, const std::string& body) {
  std::string path = ::testing::TempDir() + name;
  std::ofstream(path) << body;
  return path;
}

}  // namespace

TEST(Catalog, DJOne) {
  auto h = dj_symbolic(1);
  EXPECT_EQ(h.r(0, 0), q());
  EXPECT_EQ(h.rank(), 1);
  EXPECT_EQ(h.skew.c_matrix(0, 0), q().inverse());
}

TEST(Catalog, DJTwoExplicit) {
  auto h = dj_symbolic(2);
  QMatrix<RatFunc> e(2, 2);
  e(0, 0) = q();
  e(1, 1) = q() - q().inverse();
  e(1, 2) = 1L;
  e(2, 1) = 1L;
  e(3, 3) = q();
  EXPECT_EQ(h.r, e);
  EXPECT_TRUE(h.validation.braid);
  EXPECT_TRUE(h.validation.hecke);
  EXPECT_TRUE(h.validation.skew_invertible);
  EXPECT_EQ(h.rank(), 2);
}

TEST(Catalog, DJThreeRank) { EXPECT_EQ(dj_symbolic(3).rank(), 3); }

TEST(Catalog, DJFixedAgreesWithSymbolic) {
  Rational q0(3, 5);
  auto s = dj_symbolic(3);
  auto f = dj_fixed(3, q0);
  EXPECT_EQ(s.r.map<Rational>([&](const RatFunc& x) { return eval_at(x, q0); }), f.r);
  EXPECT_EQ(s.skew.c_matrix.map<Rational>([&](const RatFunc& x) { return eval_at(x, q0); }), f.skew.c_matrix);
}

TEST(Catalog, Flip) {
  auto h = flip(2);
  EXPECT_EQ(h.r * h.r, QMatrix<Rational>::identity(2, 2));
  EXPECT_TRUE(check_hecke(h.r, fixed_field(Rational(1))));
  EXPECT_EQ(h.rank(), 2);
  EXPECT_TRUE(h.q_config.involutive);
  EXPECT_EQ(flip(3).rank(), 3);
}

TEST(Catalog, BadN) {
  EXPECT_THROW(dj_symbolic(0), ConfigError);
  EXPECT_THROW(flip(0), ConfigError);
}

TEST(FileFormat, RoundTripSymbolic) {
  auto h = dj_symbolic(2);
  std::string text = serialize_rmatrix(h.r, QConfig::symbolic());
  auto back = load_symbolic(parse_rmatrix(text), "rt");
  EXPECT_EQ(back.r, h.r);
  EXPECT_EQ(back.rank(), 2);
  auto fixed = load_fixed(parse_rmatrix(text), "rt", Rational(2));
  EXPECT_EQ(fixed.r, dj_fixed(2, Rational(2)).r);
}

TEST(FileFormat, LoadFromDisk) {
  auto h = dj_fixed(2, Rational(3, 5));
  std::string path = write_temp("recap_dj2.rmx", serialize_rmatrix(h.r, QConfig::fixed(Rational(3, 5))));
  auto back = load(path);
  EXPECT_EQ(back.r, h.r);
  EXPECT_THROW(load(path, Rational(2)), ConfigError);
  std::remove(path.c_str());
  EXPECT_THROW(load(path), ConfigError);
}

TEST(FileFormat, NonBraidFails) {
  std::string text = R"({"N": 2, "q": "2", "entries": [
    {"i":1,"j":1,"k":1,"l":1,"value":"2"}, {"i":1,"j":2,"k":2,"l":1,"value":"1"},
    {"i":2,"j":1,"k":1,"l":2,"value":"1"}, {"i":2,"j":2,"k":2,"l":2,"value":"2"},
    {"i":1,"j":1,"k":2,"l":2,"value":"1"}]})";
  try {
    load_fixed(parse_rmatrix(text), "bad");
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.check, "braid");
  }
}

TEST(FileFormat, EmptyEntriesFailHecke) {
  try {
    load_fixed(parse_rmatrix(R"({"N": 2, "q": "2", "entries": []})"), "zero");
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.check, "hecke");
  }
}

TEST(FileFormat, MalformedInputs) {
  EXPECT_THROW(parse_rmatrix("{"), ParseError);
  EXPECT_THROW(parse_rmatrix(R"({"q": "2", "entries": []})"), ParseError);
  EXPECT_THROW(parse_rmatrix(R"({"N": 0, "q": "2", "entries": []})"), ParseError);
  EXPECT_THROW(parse_rmatrix(R"({"N": 1, "q": "2", "entries": [{"i":1,"j":1,"k":1,"l":2,"value":"q"}]})"),
               ParseError);
  EXPECT_THROW(parse_rmatrix(R"({"N": 1, "q": "2", "entries": [{"i":1,"j":1,"k":1,"l":1,"value":"q"},
                                                              {"i":1,"j":1,"k":1,"l":1,"value":"q"}]})"),
               ParseError);
  EXPECT_THROW(parse_rmatrix(R"({"N": 1, "q": "-1", "entries": []})"), ConfigError);
  EXPECT_THROW(load_fixed(parse_rmatrix(R"({"N": 1, "q": "symbolic", "entries": []})"), "x"), ConfigError);
}
