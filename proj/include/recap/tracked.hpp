#pragma once

// Value at a sample point paired with a structural bound on the q-degree of
// the exact rational function it came from. Used to turn finitely many
// point evaluations into a proof that a rational-function identity holds.
//
// A Tracked x stands for N(q) / Delta(q)^depth, where Delta is a fixed common
// denominator with exponents in [0, delta_degree] and N is a Laurent
// polynomial whose exponents lie in [lo, hi]. Only ring operations are
// tracked; division is confined to constants that are monomials.

#include <algorithm>
#include <string>

#include "recap/errors.hpp"
#include "recap/laurent.hpp"

namespace recap {

struct Tracked {
  Rational value = 0;
  int depth = 0;
  int lo = 1;
  int hi = 0;
  int delta_degree = 0;

  Tracked() = default;
  Tracked(const Rational& c)  // NOLINT: constants embed with depth 0
      : value(c) {
    if (sgn(c) != 0) lo = hi = 0;
  }
  Tracked(long c) : Tracked(Rational(c)) {}  // NOLINT

  static Tracked with_bounds(Rational v, int depth, int lo, int hi, int delta_degree) {
    Tracked t;
    t.value = std::move(v);
    t.depth = depth;
    t.lo = lo;
    t.hi = hi;
    t.delta_degree = delta_degree;
    if (lo > hi) t.value = 0;
    return t;
  }

  /// Structurally zero: the tracked numerator is the zero polynomial.
  bool structurally_zero() const { return lo > hi; }
  /// Number of distinct sample points that certify a vanishing numerator.
  int points_needed() const { return structurally_zero() ? 0 : hi - lo + 1; }

  Tracked operator-() const {
    Tracked r = *this;
    r.value = -r.value;
    return r;
  }

  friend Tracked operator+(const Tracked& a, const Tracked& b) {
    if (a.structurally_zero()) return b;
    if (b.structurally_zero()) return a;
    Tracked r;
    r.delta_degree = std::max(a.delta_degree, b.delta_degree);
    r.depth = std::max(a.depth, b.depth);
    r.lo = std::min(a.lo, b.lo);
    r.hi = std::max(a.hi + (r.depth - a.depth) * r.delta_degree,
                    b.hi + (r.depth - b.depth) * r.delta_degree);
    r.value = a.value + b.value;
    return r;
  }
  friend Tracked operator-(const Tracked& a, const Tracked& b) { return a + (-b); }

  friend Tracked operator*(const Tracked& a, const Tracked& b) {
    if (a.structurally_zero() || b.structurally_zero()) return {};
    Tracked r;
    r.delta_degree = std::max(a.delta_degree, b.delta_degree);
    r.depth = a.depth + b.depth;
    r.lo = a.lo + b.lo;
    r.hi = a.hi + b.hi;
    r.value = a.value * b.value;
    return r;
  }

  Tracked inverse() const {
    if (sgn(value) == 0) throw DivisionByZero();
    if (depth != 0 || lo != hi) {
      throw ConfigError("tracked scalars only invert monomial constants");
    }
    Tracked r;
    r.value = 1 / value;
    r.lo = r.hi = -lo;
    r.delta_degree = delta_degree;
    return r;
  }
  friend Tracked operator/(const Tracked& a, const Tracked& b) { return a * b.inverse(); }

  Tracked& operator+=(const Tracked& o) { return *this = *this + o; }
  Tracked& operator-=(const Tracked& o) { return *this = *this - o; }
  Tracked& operator*=(const Tracked& o) { return *this = *this * o; }

  friend bool operator==(const Tracked& a, const Tracked& b) { return a.value == b.value; }

  std::string str() const {
    return value.get_str() + "{d" + std::to_string(depth) + ",[" + std::to_string(lo) + "," +
           std::to_string(hi) + "]}";
  }
};

}  // namespace recap
