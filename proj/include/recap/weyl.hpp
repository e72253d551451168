#pragma once

// Commutative Weyl algebra in N^2 coordinates x_ij and derivatives
// D_ij = d/dx_ji, kept in normal order (coordinates left). Standalone: shares
// nothing with the noncommutative engine.

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace recap::weyl {

using Q = mpq_class;

/// x-exponents followed by D-exponents, each of length N^2, row-major.
struct Monomial {
  std::vector<int> x;
  std::vector<int> d;
  friend auto operator<=>(const Monomial&, const Monomial&) = default;
};

class Element {
 public:
  explicit Element(int N = 1) : N_(N) {}

  static Element constant(int N, const Q& c) {
    Element e(N);
    e.add(Monomial{std::vector<int>(N * N), std::vector<int>(N * N)}, c);
    return e;
  }
  static Element x(int N, int i, int j) {
    Monomial m{std::vector<int>(N * N), std::vector<int>(N * N)};
    m.x[i * N + j] = 1;
    Element e(N);
    e.add(m, 1);
    return e;
  }
  static Element d(int N, int i, int j) {
    Monomial m{std::vector<int>(N * N), std::vector<int>(N * N)};
    m.d[i * N + j] = 1;
    Element e(N);
    e.add(m, 1);
    return e;
  }

  int base() const { return N_; }
  const std::map<Monomial, Q>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add(const Monomial& m, const Q& c) {
    if (c == 0) return;
    auto [it, fresh] = terms_.emplace(m, c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  friend Element operator+(Element a, const Element& b) {
    for (const auto& [m, c] : b.terms_) a.add(m, c);
    return a;
  }
  friend Element operator-(Element a, const Element& b) {
    for (const auto& [m, c] : b.terms_) a.add(m, -c);
    return a;
  }
  friend Element operator*(const Q& s, Element a) {
    if (s == 0) return Element(a.N_);
    for (auto& [m, c] : a.terms_) c *= s;
    return a;
  }
  friend bool operator==(const Element& a, const Element& b) { return a.terms_ == b.terms_; }

  friend Element operator*(const Element& a, const Element& b) {
    Element r(a.N_);
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) r.multiply_into(ma, mb, ca * cb);
    return r;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string s;
    bool first = true;
    for (const auto& [m, c] : terms_) {
      if (!first) s += " + ";
      first = false;
      s += c.get_str();
      for (int v = 0; v < N_ * N_; ++v)
        for (int e = 0; e < m.x[v]; ++e) s += "*x" + std::to_string(v / N_ + 1) + std::to_string(v % N_ + 1);
      for (int v = 0; v < N_ * N_; ++v)
        for (int e = 0; e < m.d[v]; ++e) s += "*D" + std::to_string(v / N_ + 1) + std::to_string(v % N_ + 1);
    }
    return s;
  }

 private:
  static Q binom(int n, int k) {
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return Q(r);
  }
  static Q falling(int n, int k) {
    Q r = 1;
    for (int i = 0; i < k; ++i) r *= n - i;
    return r;
  }

  /// (x^a D^b)(x^c D^e) = sum_k prod binom(b,k) falling(c,k) x^(a+c-k) D^(b-k+e).
  /// D-slot (i,j) differentiates x-slot (j,i); that pairing is a bijection,
  /// so every slot is handled independently.
  void multiply_into(const Monomial& left, const Monomial& right, const Q& coef) {
    const int n2 = N_ * N_;
    std::vector<int> pair(n2);
    for (int v = 0; v < n2; ++v) pair[v] = (v % N_) * N_ + v / N_;
    std::vector<int> k(n2, 0);
    for (;;) {
      Q c = coef;
      Monomial m{left.x, left.d};
      for (int w = 0; w < n2; ++w) m.x[w] += right.x[w];
      for (int v = 0; v < n2; ++v) {
        c *= binom(left.d[v], k[v]) * falling(right.x[pair[v]], k[v]);
        m.x[pair[v]] -= k[v];
        m.d[v] += right.d[v] - k[v];
      }
      add(m, c);
      int v = 0;
      for (; v < n2; ++v) {
        if (k[v] < std::min(left.d[v], right.x[pair[v]])) {
          ++k[v];
          break;
        }
        k[v] = 0;
      }
      if (v == n2) break;
    }
  }

  int N_;
  std::map<Monomial, Q> terms_;
};

using Matrix = std::vector<std::vector<Element>>;

inline Matrix coordinates(int N) {
  Matrix m(N, std::vector<Element>(N, Element(N)));
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) m[i][j] = Element::x(N, i, j);
  return m;
}

inline Matrix derivatives(int N) {
  Matrix m(N, std::vector<Element>(N, Element(N)));
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) m[i][j] = Element::d(N, i, j);
  return m;
}

inline Matrix multiply(const Matrix& a, const Matrix& b) {
  const int N = static_cast<int>(a.size());
  Matrix r(N, std::vector<Element>(N, Element(N)));
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int s = 0; s < N; ++s) r[i][j] = r[i][j] + a[i][s] * b[s][j];
  return r;
}

inline int permutation_sign(const std::vector<int>& p) {
  int sign = 1;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) sign = -sign;
  return sign;
}

/// sum_sigma sgn(sigma) X_{sigma(1),1} X_{sigma(2),2} ... X_{sigma(N),N}.
inline Element column_det(const Matrix& x) {
  const int N = static_cast<int>(x.size());
  std::vector<int> p(N);
  std::iota(p.begin(), p.end(), 0);
  Element acc(N);
  do {
    Element prod = Element::constant(N, permutation_sign(p));
    for (int col = 0; col < N; ++col) prod = prod * x[p[col]][col];
    acc = acc + prod;
  } while (std::next_permutation(p.begin(), p.end()));
  return acc;
}

/// sum_sigma sgn(sigma) X_{1,sigma(1)} X_{2,sigma(2)} ... X_{N,sigma(N)}.
inline Element row_det(const Matrix& x) {
  const int N = static_cast<int>(x.size());
  std::vector<int> p(N);
  std::iota(p.begin(), p.end(), 0);
  Element acc(N);
  do {
    Element prod = Element::constant(N, permutation_sign(p));
    for (int row = 0; row < N; ++row) prod = prod * x[row][p[row]];
    acc = acc + prod;
  } while (std::next_permutation(p.begin(), p.end()));
  return acc;
}

struct CapelliCheck {
  Element lhs;
  Element rhs;
  bool holds = false;
  /// "column" or "row": the determinant convention that validated, or the
  /// last one tried.
  std::string convention;
};

/// det(M D + K) against det M * det D, with K = diag(shifts). The column
/// determinant is tried first, then the row determinant.
inline CapelliCheck capelli(int N, const std::vector<Q>& shifts) {
  Matrix m = coordinates(N), d = derivatives(N);
  Matrix l = multiply(m, d);
  for (int i = 0; i < N; ++i) l[i][i] = l[i][i] + Element::constant(N, shifts.at(i));
  CapelliCheck c;
  c.rhs = column_det(m) * column_det(d);
  c.lhs = column_det(l);
  c.convention = "column";
  c.holds = c.lhs == c.rhs;
  if (!c.holds) {
    Element alt = row_det(l);
    if (alt == c.rhs) {
      c.lhs = alt;
      c.convention = "row";
      c.holds = true;
    }
  }
  return c;
}

/// diag(N-1, ..., 1, 0).
inline std::vector<Q> capelli_shifts(int N) {
  std::vector<Q> s;
  for (int i = N - 1; i >= 0; --i) s.emplace_back(i);
  return s;
}

}  // namespace recap::weyl
