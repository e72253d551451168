#pragma once

// Exact coefficient fields. Two interchangeable backends share one generic
// interface: Rational (q fixed to a rational sample value) and RatFunc (q kept
// symbolic). Tracked is a third, ring-only backend used by rigor mode.

#include <cctype>
#include <concepts>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "recap/errors.hpp"
#include "recap/laurent.hpp"
#include "recap/tracked.hpp"

namespace recap {

// ---------------------------------------------------------------------------
// Uniform free-function interface over the backends.

inline bool is_zero(const Rational& x) { return sgn(x) == 0; }
inline bool is_zero(const RatFunc& x) { return x.is_zero(); }
inline bool is_zero(const Tracked& x) { return x.structurally_zero(); }

/// Zero at the point of evaluation. Differs from is_zero only for Tracked,
/// whose terms are never dropped on a vanishing value.
inline bool vanishes(const Rational& x) { return sgn(x) == 0; }
inline bool vanishes(const RatFunc& x) { return x.is_zero(); }
inline bool vanishes(const Tracked& x) { return sgn(x.value) == 0; }

inline Rational inverse(const Rational& x) {
  if (sgn(x) == 0) throw DivisionByZero();
  return Rational(1 / x);
}
inline RatFunc inverse(const RatFunc& x) { return x.inverse(); }
inline Tracked inverse(const Tracked& x) { return x.inverse(); }

inline std::string to_string(const RatFunc& x) { return x.str(); }
inline std::string to_string(const Tracked& x) { return x.str(); }

template <class F>
concept CoefficientField = requires(F a, F b) {
  F(Rational(1));
  { a + b } -> std::convertible_to<F>;
  { a - b } -> std::convertible_to<F>;
  { a * b } -> std::convertible_to<F>;
  { -a } -> std::convertible_to<F>;
  { is_zero(a) } -> std::same_as<bool>;
  { vanishes(a) } -> std::same_as<bool>;
  { inverse(a) } -> std::convertible_to<F>;
  { to_string(a) } -> std::convertible_to<std::string>;
};

// ---------------------------------------------------------------------------

/// Which backend and, in fixed mode, the sample value of q.
struct QConfig {
  enum class Mode { fixed, symbolic };

  Mode mode = Mode::symbolic;
  std::optional<Rational> q_value;
  /// q = 1 is admitted only for involutive symmetries such as the flip.
  bool involutive = false;

  static QConfig symbolic() { return {}; }
  static QConfig fixed(Rational q0, bool involutive = false) {
    QConfig c;
    c.mode = Mode::fixed;
    c.q_value = std::move(q0);
    c.involutive = involutive;
    c.validate();
    return c;
  }

  void validate() const {
    if (mode == Mode::symbolic) {
      if (q_value) throw ConfigError("symbolic mode carries no q value");
      return;
    }
    if (!q_value) throw ConfigError("fixed mode requires a q value");
    const Rational& q0 = *q_value;
    if (sgn(q0) == 0) throw ConfigError("q must be nonzero");
    if (q0 == -1) throw ConfigError("q = -1 is excluded");
    if (q0 == 1 && !involutive) throw ConfigError("q = 1 is only admitted for involutive symmetries");
  }

  std::string str() const { return mode == Mode::symbolic ? "symbolic" : q_value->get_str(); }
};

/// The element q of a backend together with derived constants.
template <class F>
class QField {
 public:
  explicit QField(F q) : q_(std::move(q)) {}

  const F& q() const { return q_; }
  F zero() const { return F(Rational(0)); }
  F one() const { return F(Rational(1)); }
  F constant(const Rational& c) const { return F(c); }

  /// q^n for any integer n.
  F pow(int n) const {
    F base = n >= 0 ? q_ : inverse(q_);
    F r = one();
    for (int i = 0; i < (n >= 0 ? n : -n); ++i) r = r * base;
    return r;
  }

  /// k_q = q^(k-1) + q^(k-3) + ... + q^(1-k); zero for k = 0.
  F qnum(int k) const {
    if (k < 0) throw ConfigError("q-number of a negative integer");
    F r = zero();
    for (int j = 0; j < k; ++j) r = r + pow(k - 1 - 2 * j);
    return r;
  }

 private:
  F q_;
};

inline QField<RatFunc> symbolic_field() { return QField<RatFunc>(RatFunc::q()); }
inline QField<Rational> fixed_field(const Rational& q0) { return QField<Rational>(q0); }

// ---------------------------------------------------------------------------
// Parsing: integers, q, + - * / ^, parentheses; exponents are integers and
// negative ones are parenthesized, e.g. q^(-1).

namespace detail {

class ScalarParser {
 public:
  explicit ScalarParser(std::string_view text) : s_(text) {}

  RatFunc parse() {
    skip();
    if (pos_ >= s_.size()) throw ParseError("empty expression", pos_);
    RatFunc r = expr();
    skip();
    if (pos_ != s_.size()) throw ParseError("unexpected character '" + std::string(1, s_[pos_]) + "'", pos_);
    return r;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  RatFunc expr() {
    RatFunc r = term();
    for (;;) {
      if (accept('+')) r = r + term();
      else if (accept('-')) r = r - term();
      else return r;
    }
  }

  RatFunc term() {
    RatFunc r = unary();
    for (;;) {
      if (accept('*')) {
        r = r * unary();
      } else if (accept('/')) {
        std::size_t at = pos_;
        RatFunc d = unary();
        if (d.is_zero()) throw ParseError("division by zero", at);
        r = r / d;
      } else {
        return r;
      }
    }
  }

  RatFunc unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  RatFunc power() {
    RatFunc base = primary();
    if (!accept('^')) return base;
    long e = 0;
    if (accept('(')) {
      bool neg = accept('-');
      if (!neg) accept('+');
      e = integer();
      if (neg) e = -e;
      if (!accept(')')) throw ParseError("expected ')'", pos_);
    } else {
      e = integer();
    }
    if (e < 0 && base.is_zero()) throw ParseError("zero raised to a negative power", pos_);
    RatFunc b = e >= 0 ? base : base.inverse();
    RatFunc r(1L);
    for (long i = 0; i < (e >= 0 ? e : -e); ++i) r = r * b;
    return r;
  }

  RatFunc primary() {
    skip();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      RatFunc r = expr();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return r;
    }
    if (c == 'q') {
      ++pos_;
      return RatFunc::q();
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      return RatFunc(Rational(mpz_class(std::string(s_.substr(start, pos_ - start)))));
    }
    throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
  }

  long integer() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) throw ParseError("expected integer exponent", pos_);
    if (pos_ - start > 6) throw ParseError("exponent too large", start);
    return std::stol(std::string(s_.substr(start, pos_ - start)));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses the scalar grammar into a canonical rational function of q.
inline RatFunc parse_ratfunc(std::string_view text) { return detail::ScalarParser(text).parse(); }

/// Parses a rational literal such as "3/5" or "-2" (no q allowed).
inline Rational parse_rational(std::string_view text) {
  RatFunc f = parse_ratfunc(text);
  if (!f.num().is_constant() || !f.is_laurent()) {
    throw ParseError("expected a rational constant, got '" + std::string(text) + "'", 0);
  }
  return f.num().coefficient(0);
}

/// Exact evaluation at q0; throws PoleError at a pole.
inline Rational eval_at(const RatFunc& s, const Rational& q0) { return s.eval(q0); }

// ---------------------------------------------------------------------------

/// Backend-tagged scalar for code that selects the backend at run time.
/// Arithmetic between different backends is a configuration error.
class Scalar {
 public:
  Scalar() = default;
  explicit Scalar(Rational r) : v_(std::move(r)) {}
  explicit Scalar(RatFunc f) : v_(std::move(f)) {}

  bool is_fixed() const { return std::holds_alternative<Rational>(v_); }
  bool is_symbolic() const { return std::holds_alternative<RatFunc>(v_); }
  const Rational& fixed() const { return std::get<Rational>(v_); }
  const RatFunc& symbolic() const { return std::get<RatFunc>(v_); }

  friend Scalar operator+(const Scalar& a, const Scalar& b) {
    check_same(a, b);
    if (a.is_fixed()) return Scalar(Rational(a.fixed() + b.fixed()));
    return Scalar(a.symbolic() + b.symbolic());
  }
  friend Scalar operator*(const Scalar& a, const Scalar& b) {
    check_same(a, b);
    if (a.is_fixed()) return Scalar(Rational(a.fixed() * b.fixed()));
    return Scalar(a.symbolic() * b.symbolic());
  }
  friend Scalar operator-(const Scalar& a, const Scalar& b) { return a + (-b); }
  Scalar operator-() const {
    if (is_fixed()) return Scalar(Rational(-fixed()));
    return Scalar(-symbolic());
  }
  Scalar inverse() const {
    return std::visit([](const auto& x) { return Scalar(recap::inverse(x)); }, v_);
  }
  bool is_zero() const {
    return std::visit([](const auto& x) { return recap::is_zero(x); }, v_);
  }
  friend bool operator==(const Scalar& a, const Scalar& b) { return a.v_ == b.v_; }

  std::string str() const {
    return std::visit([](const auto& x) { return recap::to_string(x); }, v_);
  }

 private:
  static void check_same(const Scalar& a, const Scalar& b) {
    if (a.v_.index() != b.v_.index()) throw ConfigError("mixed scalar backends");
  }

  std::variant<Rational, RatFunc> v_{Rational(0)};
};

inline Scalar parse_scalar(std::string_view text) { return Scalar(parse_ratfunc(text)); }

inline Scalar eval_at(const Scalar& s, const Rational& q0) {
  if (!s.is_symbolic()) throw ConfigError("eval_at expects a symbolic scalar");
  return Scalar(s.symbolic().eval(q0));
}

}  // namespace recap
