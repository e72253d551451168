#pragma once

// Free noncommutative polynomials in the generators m_i^j and d_i^j (the
// quantum partial derivatives), and tensor-legged matrices with such entries.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "recap/qlinalg.hpp"

namespace recap {

enum class GenKind : std::uint8_t { m, d };

/// Letter codes: m_i^j -> i*N + j, d_i^j -> kDOffset + i*N + j (0-based), so
/// every derivative generator sorts above every coordinate generator.
inline constexpr unsigned char kDOffset = 64;

struct Gen {
  GenKind kind;
  int i;  ///< row, 0-based
  int j;  ///< column, 0-based

  unsigned char code(int N) const {
    return static_cast<unsigned char>((kind == GenKind::d ? kDOffset : 0) + i * N + j);
  }
  static Gen decode(unsigned char c, int N) {
    GenKind k = c >= kDOffset ? GenKind::d : GenKind::m;
    int idx = c >= kDOffset ? c - kDOffset : c;
    return {k, idx / N, idx % N};
  }
};

inline bool is_d_letter(char c) { return static_cast<unsigned char>(c) >= kDOffset; }

/// A word in the generators; ordered degree-first, then lexicographically by
/// letter code.
struct Word {
  std::string letters;

  Word() = default;
  explicit Word(std::string s) : letters(std::move(s)) {}

  std::size_t size() const { return letters.size(); }
  bool empty() const { return letters.empty(); }

  std::size_t m_degree() const {
    return static_cast<std::size_t>(std::count_if(letters.begin(), letters.end(), [](char c) { return !is_d_letter(c); }));
  }
  std::size_t d_degree() const { return size() - m_degree(); }

  /// All m letters precede all d letters.
  bool is_normal_ordered() const {
    bool seen_d = false;
    for (char c : letters) {
      if (is_d_letter(c)) seen_d = true;
      else if (seen_d) return false;
    }
    return true;
  }

  friend Word operator+(const Word& a, const Word& b) { return Word(a.letters + b.letters); }
  friend bool operator==(const Word& a, const Word& b) = default;
  friend std::strong_ordering operator<=>(const Word& a, const Word& b) {
    if (a.size() != b.size()) return a.size() <=> b.size();
    int c = a.letters.compare(b.letters);
    return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
  }

  std::string str(int N) const {
    if (letters.empty()) return "1";
    std::string s;
    for (std::size_t t = 0; t < letters.size(); ++t) {
      Gen g = Gen::decode(static_cast<unsigned char>(letters[t]), N);
      if (t) s += "*";
      s += (g.kind == GenKind::m ? "m" : "d");
      s += std::to_string(g.i + 1) + std::to_string(g.j + 1);
    }
    return s;
  }
};

struct WordHash {
  std::size_t operator()(const Word& w) const { return std::hash<std::string>{}(w.letters); }
};

template <class F>
class NCPoly {
 public:
  using Map = std::unordered_map<Word, F, WordHash>;

  NCPoly() = default;

  static NCPoly constant(const F& c) { return term(Word{}, c); }
  static NCPoly term(const Word& w, const F& c) {
    NCPoly p;
    p.add(w, c);
    return p;
  }
  static NCPoly gen(const Gen& g, int N) { return term(Word(std::string(1, static_cast<char>(g.code(N)))), F(Rational(1))); }

  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  const Map& terms() const { return terms_; }

  /// True when every coefficient vanishes at the evaluation point.
  bool vanishes_everywhere() const {
    for (const auto& [w, c] : terms_)
      if (!vanishes(c)) return false;
    return true;
  }

  F coefficient(const Word& w) const {
    auto it = terms_.find(w);
    return it == terms_.end() ? F(Rational(0)) : it->second;
  }

  void add(const Word& w, const F& c) {
    if (is_zero_coef(c)) return;
    auto [it, inserted] = terms_.try_emplace(w, c);
    if (!inserted) {
      it->second = it->second + c;
      if (is_zero_coef(it->second)) terms_.erase(it);
    }
  }

  /// this += a * x
  void axpy(const F& a, const NCPoly& x) {
    if (is_zero_coef(a)) return;
    for (const auto& [w, c] : x.terms_) add(w, F(a * c));
  }

  void add_poly(const NCPoly& x) {
    for (const auto& [w, c] : x.terms_) add(w, c);
  }

  NCPoly scaled(const F& a) const {
    NCPoly r;
    r.axpy(a, *this);
    return r;
  }

  NCPoly operator-() const { return scaled(F(Rational(-1))); }
  friend NCPoly operator+(NCPoly a, const NCPoly& b) {
    a.add_poly(b);
    return a;
  }
  friend NCPoly operator-(NCPoly a, const NCPoly& b) {
    a.axpy(F(Rational(-1)), b);
    return a;
  }
  /// Free product: concatenation of words.
  friend NCPoly operator*(const NCPoly& a, const NCPoly& b) {
    NCPoly r;
    for (const auto& [wa, ca] : a.terms_)
      for (const auto& [wb, cb] : b.terms_) r.add(wa + wb, F(ca * cb));
    return r;
  }

  /// Terms sorted by the monomial order, largest first.
  std::vector<std::pair<Word, F>> sorted_terms() const {
    std::vector<std::pair<Word, F>> v(terms_.begin(), terms_.end());
    std::sort(v.begin(), v.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
    return v;
  }

  std::string str(int N, std::size_t limit = 0) const {
    if (terms_.empty()) return "0";
    std::string s;
    std::size_t n = 0;
    for (const auto& [w, c] : sorted_terms()) {
      if (limit && n == limit) {
        s += " + ...";
        break;
      }
      if (n) s += " + ";
      s += "(" + to_string(c) + ")";
      if (!w.empty()) s += "*" + w.str(N);
      ++n;
    }
    return s;
  }

  template <class G, class Fn>
  NCPoly<G> map_coefficients(Fn&& fn) const {
    NCPoly<G> r;
    for (const auto& [w, c] : terms_) r.add(w, fn(c));
    return r;
  }

  friend bool operator==(const NCPoly& a, const NCPoly& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    for (const auto& [w, c] : a.terms_) {
      auto it = b.terms_.find(w);
      if (it == b.terms_.end() || !vanishes(F(it->second - c))) return false;
    }
    return true;
  }

 private:
  static bool is_zero_coef(const F& c) { return recap::is_zero(c); }
  Map terms_;
};

/// Maximal letter counts (m-degree, d-degree) over the words of x.
template <class F>
std::pair<std::size_t, std::size_t> nc_degree(const NCPoly<F>& x) {
  std::size_t dm = 0, dd = 0;
  for (const auto& [w, c] : x.terms()) {
    dm = std::max(dm, w.m_degree());
    dd = std::max(dd, w.d_degree());
  }
  return {dm, dd};
}

/// Counit of the derivative algebra: the coefficient of the empty word.
template <class F>
F counit(const NCPoly<F>& x) {
  for (const auto& [w, c] : x.terms())
    if (w.m_degree() > 0) throw ConfigError("counit is defined on the derivative algebra only");
  return x.coefficient(Word{});
}

/// Product in the free algebra.
struct FreeAlgebra {
  template <class F>
  NCPoly<F> mul(const NCPoly<F>& a, const NCPoly<F>& b) const {
    return a * b;
  }
};

// ---------------------------------------------------------------------------

template <class F>
class NCMatrix {
 public:
  NCMatrix() = default;
  NCMatrix(int N, int legs) : N_(N), legs_(legs), dim_(ipow(N, legs)), data_(dim_ * dim_) {}

  int base() const { return N_; }
  int legs() const { return legs_; }
  std::size_t dim() const { return dim_; }

  NCPoly<F>& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
  const NCPoly<F>& operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }

  const std::vector<NCPoly<F>>& entries() const { return data_; }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const auto& p) { return p.is_zero(); });
  }

  friend NCMatrix operator+(NCMatrix a, const NCMatrix& b) {
    a.check_shape(b);
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i].add_poly(b.data_[i]);
    return a;
  }
  friend NCMatrix operator-(NCMatrix a, const NCMatrix& b) {
    a.check_shape(b);
    for (std::size_t i = 0; i < a.data_.size(); ++i) a.data_[i].axpy(F(Rational(-1)), b.data_[i]);
    return a;
  }
  friend NCMatrix operator*(const F& s, const NCMatrix& a) {
    NCMatrix r(a.N_, a.legs_);
    for (std::size_t i = 0; i < a.data_.size(); ++i) r.data_[i] = a.data_[i].scaled(s);
    return r;
  }

  friend bool operator==(const NCMatrix& a, const NCMatrix& b) {
    return a.N_ == b.N_ && a.legs_ == b.legs_ && a.data_ == b.data_;
  }

  /// X + s * I
  NCMatrix shifted(const F& s) const {
    NCMatrix r = *this;
    for (std::size_t i = 0; i < dim_; ++i) r(i, i).add(Word{}, s);
    return r;
  }

  friend NCMatrix operator*(const QMatrix<F>& a, const NCMatrix& x) {
    x.check_shape(a);
    NCMatrix r(x.N_, x.legs_);
    for (std::size_t i = 0; i < x.dim_; ++i)
      for (std::size_t s = 0; s < x.dim_; ++s) {
        const F& ais = a(i, s);
        if (recap::is_zero(ais)) continue;
        for (std::size_t j = 0; j < x.dim_; ++j) r(i, j).axpy(ais, x(s, j));
      }
    return r;
  }
  friend NCMatrix operator*(const NCMatrix& x, const QMatrix<F>& a) {
    x.check_shape(a);
    NCMatrix r(x.N_, x.legs_);
    for (std::size_t s = 0; s < x.dim_; ++s)
      for (std::size_t j = 0; j < x.dim_; ++j) {
        const F& asj = a(s, j);
        if (recap::is_zero(asj)) continue;
        for (std::size_t i = 0; i < x.dim_; ++i) r(i, j).axpy(asj, x(i, s));
      }
    return r;
  }

  template <class G, class Fn>
  NCMatrix<G> map_coefficients(Fn&& fn) const {
    NCMatrix<G> r(N_, legs_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) r(i, j) = (*this)(i, j).template map_coefficients<G>(fn);
    return r;
  }

  template <class Fn>
  NCMatrix transform(Fn&& fn) const {
    NCMatrix r(N_, legs_);
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = fn(data_[i]);
    return r;
  }

  void check_shape(const NCMatrix& b) const {
    if (N_ != b.N_ || legs_ != b.legs_) throw ConfigError("matrix shape mismatch");
  }
  void check_shape(const QMatrix<F>& b) const {
    if (N_ != b.base() || legs_ != b.legs()) throw ConfigError("matrix shape mismatch");
  }

 private:
  int N_ = 1;
  int legs_ = 0;
  std::size_t dim_ = 1;
  std::vector<NCPoly<F>> data_;
};

/// Entries sum_s X(i,s) * Y(s,j), products taken in `alg`.
template <class F, class Alg = FreeAlgebra>
NCMatrix<F> mat_mul(const NCMatrix<F>& x, const NCMatrix<F>& y, const Alg& alg = {}) {
  x.check_shape(y);
  const std::size_t n = x.dim();
  NCMatrix<F> r(x.base(), x.legs());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t s = 0; s < n; ++s) {
      const auto& xis = x(i, s);
      if (xis.is_zero()) continue;
      for (std::size_t j = 0; j < n; ++j) {
        const auto& ysj = y(s, j);
        if (ysj.is_zero()) continue;
        r(i, j).add_poly(alg.mul(xis, ysj));
      }
    }
  return r;
}

/// Generating matrix: entries m_i^j (kind m) or d_i^j (kind d), one leg.
template <class F>
NCMatrix<F> gen_matrix(GenKind kind, int N) {
  NCMatrix<F> x(N, 1);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) x(i, j) = NCPoly<F>::gen({kind, i, j}, N);
  return x;
}

/// X (x) I^(legs - legs(X)).
template <class F>
NCMatrix<F> extend(const NCMatrix<F>& x, int legs) {
  if (legs < x.legs()) throw ConfigError("cannot extend to fewer legs");
  const int N = x.base();
  const std::size_t tail = ipow(N, legs - x.legs());
  NCMatrix<F> r(N, legs);
  for (std::size_t i = 0; i < x.dim(); ++i)
    for (std::size_t j = 0; j < x.dim(); ++j)
      for (std::size_t t = 0; t < tail; ++t) r(i * tail + t, j * tail + t) = x(i, j);
  return r;
}

/// R_i X R_i^-1: the copy of X moved from leg i to leg i + 1.
template <class F>
NCMatrix<F> copy_up(const NCMatrix<F>& x, int i, const QMatrix<F>& r, const QMatrix<F>& r_inv) {
  if (i < 1 || i >= x.legs()) throw ConfigError("copy_up: leg overflow");
  return embed(r, i, x.legs()) * x * embed(r_inv, i, x.legs());
}

/// R_i^-1 X R_i.
template <class F>
NCMatrix<F> copy_down(const NCMatrix<F>& x, int i, const QMatrix<F>& r, const QMatrix<F>& r_inv) {
  if (i < 1 || i >= x.legs()) throw ConfigError("copy_down: leg overflow");
  return embed(r_inv, i, x.legs()) * x * embed(r, i, x.legs());
}

/// X_{ov 1}, ..., X_{ov p} on p legs for a one-leg X.
template <class F>
std::vector<NCMatrix<F>> over_copies(const NCMatrix<F>& x, int p, const QMatrix<F>& r, const QMatrix<F>& r_inv) {
  std::vector<NCMatrix<F>> out;
  out.push_back(extend(x, p));
  for (int i = 1; i < p; ++i) out.push_back(copy_up(out.back(), i, r, r_inv));
  return out;
}

/// X_{un 1}, ..., X_{un p}.
template <class F>
std::vector<NCMatrix<F>> under_copies(const NCMatrix<F>& x, int p, const QMatrix<F>& r, const QMatrix<F>& r_inv) {
  std::vector<NCMatrix<F>> out;
  out.push_back(extend(x, p));
  for (int i = 1; i < p; ++i) out.push_back(copy_down(out.back(), i, r, r_inv));
  return out;
}

/// Ordinary partial trace over leg t (1-based).
template <class F>
NCMatrix<F> partial_trace(const NCMatrix<F>& x, int t) {
  const int N = x.base();
  const int p = x.legs();
  if (t < 1 || t > p) throw ConfigError("trace leg out of range");
  NCMatrix<F> r(N, p - 1);
  for (std::size_t i = 0; i < r.dim(); ++i) {
    auto li = split_index(i, N, p - 1);
    for (std::size_t j = 0; j < r.dim(); ++j) {
      auto lj = split_index(j, N, p - 1);
      for (int s = 0; s < N; ++s) {
        auto fi = li;
        auto fj = lj;
        fi.insert(fi.begin() + (t - 1), s);
        fj.insert(fj.begin() + (t - 1), s);
        r(i, j).add_poly(x(join_index(fi, N), join_index(fj, N)));
      }
    }
  }
  return r;
}

/// R-trace <X> over the given legs with weight matrix C.
template <class F>
NCMatrix<F> r_trace(NCMatrix<F> x, std::vector<int> legs, const QMatrix<F>& c) {
  std::sort(legs.begin(), legs.end(), std::greater<>());
  for (int t : legs) x = partial_trace(on_leg(c, t, x.legs()) * x, t);
  return x;
}

template <class F>
NCPoly<F> r_trace_all(const NCMatrix<F>& x, const QMatrix<F>& c) {
  std::vector<int> legs;
  for (int t = 1; t <= x.legs(); ++t) legs.push_back(t);
  return r_trace(x, legs, c)(0, 0);
}

/// Ordinary trace over all legs.
template <class F>
NCPoly<F> trace(const NCMatrix<F>& x) {
  NCPoly<F> acc;
  for (std::size_t i = 0; i < x.dim(); ++i) acc.add_poly(x(i, i));
  return acc;
}

/// <v| X |u> = sum v_I X(I,J) u_J.
template <class F>
NCPoly<F> sandwich(const std::vector<F>& v, const NCMatrix<F>& x, const std::vector<F>& u) {
  NCPoly<F> acc;
  for (std::size_t i = 0; i < x.dim(); ++i) {
    if (is_zero(v[i])) continue;
    for (std::size_t j = 0; j < x.dim(); ++j) {
      if (is_zero(u[j])) continue;
      acc.axpy(F(v[i] * u[j]), x(i, j));
    }
  }
  return acc;
}

}  // namespace recap
