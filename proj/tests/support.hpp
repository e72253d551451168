#pragma once

#include <random>
#include <vector>

#include "recap/scalar.hpp"

namespace recap::testing {

/// Deterministic generator for property tests.
inline std::mt19937& rng() {
  static std::mt19937 gen(20240611u);
  return gen;
}

inline int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng()); }

inline Rational random_rational(int bound = 9) {
  int num = uniform(-bound, bound);
  int den = uniform(1, bound);
  return make_rational(num, den);
}

inline Rational random_nonzero_rational(int bound = 9) {
  Rational r;
  do r = random_rational(bound);
  while (sgn(r) == 0);
  return r;
}

inline LaurentPoly random_laurent(int lo = -3, int hi = 3) {
  int a = uniform(lo, hi), b = uniform(lo, hi);
  if (a > b) std::swap(a, b);
  std::vector<Rational> c;
  for (int e = a; e <= b; ++e) c.push_back(random_rational());
  return LaurentPoly(a, c);
}

inline RatFunc random_ratfunc() {
  LaurentPoly den;
  do den = random_laurent(0, 2);
  while (den.is_zero());
  return RatFunc(random_laurent(), den);
}

/// Positive rational sample point, never 1.
inline Rational random_point() {
  Rational r;
  do r = make_rational(uniform(1, 9), uniform(1, 9));
  while (r == 1);
  return r;
}

}  // namespace recap::testing
