#pragma once

// Laurent polynomials in q over the rationals and the field of rational
// functions built from them.

#include <gmpxx.h>

#include <algorithm>
#include <compare>
#include <cstddef>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "recap/errors.hpp"

namespace recap {

using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
  if (den == 0) throw DivisionByZero();
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline std::string to_string(const Rational& r) { return r.get_str(); }

/// Sum of c[i] * q^(low + i). Normalized: no zero coefficient at either end;
/// the zero polynomial has no coefficients and low == 0.
class LaurentPoly {
 public:
  LaurentPoly() = default;
  LaurentPoly(const Rational& c) {  // NOLINT: implicit constant embedding
    if (sgn(c) != 0) coeffs_.push_back(c);
  }
  LaurentPoly(int low, std::vector<Rational> coeffs) : low_(low), coeffs_(std::move(coeffs)) {
    normalize();
  }

  static LaurentPoly monomial(int exponent, Rational c = 1) {
    return LaurentPoly(exponent, std::vector<Rational>{std::move(c)});
  }

  bool is_zero() const { return coeffs_.empty(); }
  int low() const { return low_; }
  int high() const { return low_ + static_cast<int>(coeffs_.size()) - 1; }
  /// Number of stored coefficients, i.e. high() - low() + 1.
  std::size_t length() const { return coeffs_.size(); }
  const std::vector<Rational>& coeffs() const { return coeffs_; }
  const Rational& leading() const { return coeffs_.back(); }
  const Rational& trailing() const { return coeffs_.front(); }

  Rational coefficient(int exponent) const {
    int idx = exponent - low_;
    if (idx < 0 || idx >= static_cast<int>(coeffs_.size())) return 0;
    return coeffs_[idx];
  }

  bool is_constant() const { return coeffs_.empty() || (coeffs_.size() == 1 && low_ == 0); }
  bool is_one() const { return coeffs_.size() == 1 && low_ == 0 && coeffs_[0] == 1; }

  LaurentPoly shifted(int by) const {
    LaurentPoly r = *this;
    if (!r.is_zero()) r.low_ += by;
    return r;
  }

  LaurentPoly operator-() const {
    LaurentPoly r = *this;
    for (auto& c : r.coeffs_) c = -c;
    return r;
  }

  friend LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    int lo = std::min(a.low_, b.low_);
    int hi = std::max(a.high(), b.high());
    std::vector<Rational> c(hi - lo + 1);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) c[a.low_ - lo + i] += a.coeffs_[i];
    for (std::size_t i = 0; i < b.coeffs_.size(); ++i) c[b.low_ - lo + i] += b.coeffs_[i];
    return LaurentPoly(lo, std::move(c));
  }
  friend LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b) { return a + (-b); }

  friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Rational> c(a.coeffs_.size() + b.coeffs_.size() - 1);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return LaurentPoly(a.low_ + b.low_, std::move(c));
  }

  LaurentPoly scaled(const Rational& s) const {
    if (sgn(s) == 0) return {};
    LaurentPoly r = *this;
    for (auto& c : r.coeffs_) c *= s;
    return r;
  }

  /// Horner evaluation; q0 must be nonzero when low() < 0.
  Rational eval(const Rational& q0) const {
    if (is_zero()) return 0;
    Rational acc = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * q0 + *it;
    if (low_ != 0) {
      if (sgn(q0) == 0) {
        if (low_ < 0) throw PoleError("pole at q = 0");
        return 0;
      }
      Rational p = 1;
      Rational base = low_ > 0 ? q0 : Rational(1 / q0);
      for (int i = 0; i < std::abs(low_); ++i) p *= base;
      acc *= p;
    }
    return acc;
  }

  friend bool operator==(const LaurentPoly& a, const LaurentPoly& b) {
    return a.low_ == b.low_ && a.coeffs_ == b.coeffs_;
  }

  std::size_t hash() const {
    std::size_t h = std::hash<int>{}(low_);
    for (const auto& c : coeffs_) {
      h ^= std::hash<std::string>{}(c.get_str()) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }

  std::string str() const;

 private:
  void normalize() {
    std::size_t first = 0;
    while (first < coeffs_.size() && sgn(coeffs_[first]) == 0) ++first;
    if (first == coeffs_.size()) {
      coeffs_.clear();
      low_ = 0;
      return;
    }
    std::size_t last = coeffs_.size();
    while (sgn(coeffs_[last - 1]) == 0) --last;
    if (first > 0 || last < coeffs_.size()) {
      coeffs_ = std::vector<Rational>(coeffs_.begin() + first, coeffs_.begin() + last);
      low_ += static_cast<int>(first);
    }
  }

  int low_ = 0;
  std::vector<Rational> coeffs_;
};

namespace detail {

// Dense ascending-coefficient polynomials for the Euclidean algorithm.
using DensePoly = std::vector<Rational>;

inline void trim(DensePoly& p) {
  while (!p.empty() && sgn(p.back()) == 0) p.pop_back();
}

/// Remainder of a modulo b (b nonzero); quotient returned through `quot` if set.
inline DensePoly poly_divmod(DensePoly a, const DensePoly& b, DensePoly* quot = nullptr) {
  trim(a);
  const std::size_t db = b.size() - 1;
  if (quot) quot->assign(a.size() >= b.size() ? a.size() - db : 0, Rational(0));
  while (a.size() >= b.size()) {
    Rational f = a.back() / b.back();
    std::size_t shift = a.size() - b.size();
    if (quot) (*quot)[shift] = f;
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= f * b[i];
    a.pop_back();
    trim(a);
  }
  return a;
}

inline DensePoly poly_gcd(DensePoly a, DensePoly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    DensePoly r = poly_divmod(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {
    Rational lc = a.back();
    for (auto& c : a) c /= lc;
  }
  return a;
}

inline DensePoly exact_quotient(const DensePoly& a, const DensePoly& b) {
  DensePoly q;
  poly_divmod(a, b, &q);
  trim(q);
  return q;
}

inline DensePoly dense_of(const LaurentPoly& p) { return p.coeffs(); }

}  // namespace detail

/// Element of Q(q), stored as num/den with den a monic polynomial with
/// nonzero constant term and gcd(num, den) = 1. The form is unique.
class RatFunc {
 public:
  RatFunc() : den_(Rational(1)) {}
  RatFunc(const Rational& c) : num_(c), den_(Rational(1)) {}  // NOLINT
  RatFunc(long c) : RatFunc(Rational(c)) {}                     // NOLINT
  RatFunc(LaurentPoly num) : num_(std::move(num)), den_(Rational(1)) {}  // NOLINT
  RatFunc(const LaurentPoly& num, const LaurentPoly& den) { assign(num, den); }

  static RatFunc q() { return RatFunc(LaurentPoly::monomial(1)); }

  const LaurentPoly& num() const { return num_; }
  const LaurentPoly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_laurent() const { return den_.is_one(); }

  RatFunc operator-() const {
    RatFunc r = *this;
    r.num_ = -r.num_;
    return r;
  }

  friend RatFunc operator+(const RatFunc& a, const RatFunc& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.den_ == b.den_) {
      if (a.is_laurent()) return RatFunc(a.num_ + b.num_);
      return RatFunc(a.num_ + b.num_, a.den_);
    }
    return RatFunc(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend RatFunc operator-(const RatFunc& a, const RatFunc& b) { return a + (-b); }

  friend RatFunc operator*(const RatFunc& a, const RatFunc& b) {
    if (a.is_zero() || b.is_zero()) return {};
    if (a.is_laurent() && b.is_laurent()) return RatFunc(a.num_ * b.num_);
    return RatFunc(a.num_ * b.num_, a.den_ * b.den_);
  }

  RatFunc inverse() const {
    if (is_zero()) throw DivisionByZero();
    return RatFunc(den_, num_);
  }

  friend RatFunc operator/(const RatFunc& a, const RatFunc& b) { return a * b.inverse(); }

  RatFunc& operator+=(const RatFunc& o) { return *this = *this + o; }
  RatFunc& operator-=(const RatFunc& o) { return *this = *this - o; }
  RatFunc& operator*=(const RatFunc& o) { return *this = *this * o; }

  friend bool operator==(const RatFunc& a, const RatFunc& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

  /// Exact value at q0; throws PoleError when the denominator vanishes there.
  Rational eval(const Rational& q0) const {
    Rational d = den_.eval(q0);
    if (sgn(d) == 0) throw PoleError("pole at q = " + q0.get_str());
    return num_.eval(q0) / d;
  }

  std::string str() const {
    if (is_laurent()) return num_.str();
    return "(" + num_.str() + ")/(" + den_.str() + ")";
  }

 private:
  void assign(const LaurentPoly& n, const LaurentPoly& d) {
    if (d.is_zero()) throw DivisionByZero("division by the zero polynomial");
    if (n.is_zero()) {
      num_ = {};
      den_ = LaurentPoly(Rational(1));
      return;
    }
    int shift = n.low() - d.low();
    detail::DensePoly pn = detail::dense_of(n);
    detail::DensePoly pd = detail::dense_of(d);
    if (pd.size() > 1) {
      detail::DensePoly g = detail::poly_gcd(pn, pd);
      if (g.size() > 1) {
        pn = detail::exact_quotient(pn, g);
        pd = detail::exact_quotient(pd, g);
      }
    }
    Rational lc = pd.back();
    for (auto& c : pn) c /= lc;
    for (auto& c : pd) c /= lc;
    num_ = LaurentPoly(shift, std::move(pn));
    den_ = LaurentPoly(0, std::move(pd));
  }

  LaurentPoly num_;
  LaurentPoly den_;
};

inline std::string LaurentPoly::str() const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int e = high(); e >= low_; --e) {
    Rational c = coefficient(e);
    if (sgn(c) == 0) continue;
    bool neg = sgn(c) < 0;
    Rational a = abs(c);
    if (first) {
      if (neg) os << "-";
    } else {
      os << (neg ? " - " : " + ");
    }
    first = false;
    if (e == 0) {
      os << a.get_str();
      continue;
    }
    if (a != 1) os << a.get_str() << "*";
    os << "q";
    if (e < 0) os << "^(" << e << ")";
    else if (e != 1) os << "^" << e;
  }
  return os.str();
}

inline std::ostream& operator<<(std::ostream& os, const LaurentPoly& p) { return os << p.str(); }
inline std::ostream& operator<<(std::ostream& os, const RatFunc& f) { return os << f.str(); }

}  // namespace recap
