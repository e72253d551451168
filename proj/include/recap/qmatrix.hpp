#pragma once

// Dense exact matrices acting on the p-fold tensor power of an N-dimensional
// space. Leg indices (i_1, ..., i_p), each in [0, N), flatten row-major:
// r = sum_t i_t * N^(p - t).

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "recap/errors.hpp"
#include "recap/scalar.hpp"

namespace recap {

inline std::size_t ipow(std::size_t base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

/// Multi-index of the legs of a flattened index; legs[0] is the first leg.
inline std::vector<int> split_index(std::size_t r, int N, int p) {
  std::vector<int> legs(p);
  for (int t = p - 1; t >= 0; --t) {
    legs[t] = static_cast<int>(r % N);
    r /= N;
  }
  return legs;
}

inline std::size_t join_index(const std::vector<int>& legs, int N) {
  std::size_t r = 0;
  for (int i : legs) r = r * N + i;
  return r;
}

template <class F>
class QMatrix {
 public:
  QMatrix() = default;
  QMatrix(int N, int legs, const F& fill = F(Rational(0)))
      : N_(N), legs_(legs), dim_(ipow(N, legs)), data_(dim_ * dim_, fill) {
    if (N < 1 || legs < 0) throw ConfigError("invalid matrix shape");
  }

  static QMatrix identity(int N, int legs) {
    QMatrix m(N, legs);
    for (std::size_t i = 0; i < m.dim_; ++i) m(i, i) = F(Rational(1));
    return m;
  }

  /// The flip P on two legs: e_i (x) e_j -> e_j (x) e_i.
  static QMatrix flip(int N) {
    QMatrix m(N, 2);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) m(i * N + j, j * N + i) = F(Rational(1));
    return m;
  }

  int base() const { return N_; }
  int legs() const { return legs_; }
  std::size_t dim() const { return dim_; }

  F& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
  const F& operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }

  bool is_zero_matrix() const {
    for (const auto& x : data_)
      if (!vanishes(x)) return false;
    return true;
  }

  friend QMatrix operator+(const QMatrix& a, const QMatrix& b) {
    a.check_shape(b);
    QMatrix r = a;
    for (std::size_t i = 0; i < r.data_.size(); ++i) r.data_[i] = r.data_[i] + b.data_[i];
    return r;
  }
  friend QMatrix operator-(const QMatrix& a, const QMatrix& b) {
    a.check_shape(b);
    QMatrix r = a;
    for (std::size_t i = 0; i < r.data_.size(); ++i) r.data_[i] = r.data_[i] - b.data_[i];
    return r;
  }
  friend QMatrix operator*(const F& s, const QMatrix& a) {
    QMatrix r = a;
    for (auto& x : r.data_) x = s * x;
    return r;
  }

  friend QMatrix operator*(const QMatrix& a, const QMatrix& b) {
    a.check_shape(b);
    QMatrix r(a.N_, a.legs_);
    const std::size_t n = a.dim_;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        const F& aik = a(i, k);
        if (is_zero(aik)) continue;
        for (std::size_t j = 0; j < n; ++j) {
          const F& bkj = b(k, j);
          if (is_zero(bkj)) continue;
          r(i, j) = r(i, j) + aik * bkj;
        }
      }
    }
    return r;
  }

  friend bool operator==(const QMatrix& a, const QMatrix& b) {
    if (a.N_ != b.N_ || a.legs_ != b.legs_) return false;
    for (std::size_t i = 0; i < a.data_.size(); ++i)
      if (!vanishes(F(a.data_[i] - b.data_[i]))) return false;
    return true;
  }

  /// Column indices of the nonzero entries of row r.
  std::vector<std::size_t> row_support(std::size_t r) const {
    std::vector<std::size_t> s;
    for (std::size_t c = 0; c < dim_; ++c)
      if (!is_zero((*this)(r, c))) s.push_back(c);
    return s;
  }

  std::size_t nonzero_count() const {
    std::size_t n = 0;
    for (const auto& x : data_)
      if (!is_zero(x)) ++n;
    return n;
  }

  template <class G, class Fn>
  QMatrix<G> map(Fn&& fn) const {
    QMatrix<G> r(N_, legs_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) r(i, j) = fn((*this)(i, j));
    return r;
  }

  std::string str() const {
    std::string s;
    for (std::size_t i = 0; i < dim_; ++i) {
      s += "[";
      for (std::size_t j = 0; j < dim_; ++j) {
        if (j) s += ", ";
        s += to_string((*this)(i, j));
      }
      s += "]\n";
    }
    return s;
  }

 private:
  void check_shape(const QMatrix& b) const {
    if (N_ != b.N_ || legs_ != b.legs_) throw ConfigError("matrix shape mismatch");
  }

  int N_ = 1;
  int legs_ = 0;
  std::size_t dim_ = 1;
  std::vector<F> data_;
};

/// Kronecker product; legs of a come first.
template <class F>
QMatrix<F> kron(const QMatrix<F>& a, const QMatrix<F>& b) {
  if (a.base() != b.base()) throw ConfigError("kron of different base dimensions");
  QMatrix<F> r(a.base(), a.legs() + b.legs());
  const std::size_t nb = b.dim();
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) {
      if (is_zero(a(i, j))) continue;
      for (std::size_t k = 0; k < nb; ++k)
        for (std::size_t l = 0; l < nb; ++l) {
          if (is_zero(b(k, l))) continue;
          r(i * nb + k, j * nb + l) = a(i, j) * b(k, l);
        }
    }
  return r;
}

/// X on its own legs followed by identities up to `legs` legs in total.
template <class F>
QMatrix<F> extend(const QMatrix<F>& x, int legs) {
  if (legs < x.legs()) throw ConfigError("cannot extend to fewer legs");
  if (legs == x.legs()) return x;
  return kron(x, QMatrix<F>::identity(x.base(), legs - x.legs()));
}

/// R_i = I^(i-1) (x) R (x) I^(p-i-1), legs 1-based.
template <class F>
QMatrix<F> embed(const QMatrix<F>& r, int i, int p) {
  if (r.legs() != 2) throw ConfigError("embed expects a two-leg matrix");
  if (i < 1 || i > p - 1) throw ConfigError("leg index " + std::to_string(i) + " out of range for " + std::to_string(p) + " legs");
  const int N = r.base();
  QMatrix<F> out = r;
  if (i > 1) out = kron(QMatrix<F>::identity(N, i - 1), out);
  if (p - i - 1 > 0) out = kron(out, QMatrix<F>::identity(N, p - i - 1));
  return out;
}

/// Single-leg matrix placed on leg t (1-based) of p legs.
template <class F>
QMatrix<F> on_leg(const QMatrix<F>& a, int t, int p) {
  if (a.legs() != 1) throw ConfigError("on_leg expects a one-leg matrix");
  if (t < 1 || t > p) throw ConfigError("leg out of range");
  const int N = a.base();
  QMatrix<F> out = a;
  if (t > 1) out = kron(QMatrix<F>::identity(N, t - 1), out);
  if (p - t > 0) out = kron(out, QMatrix<F>::identity(N, p - t));
  return out;
}

/// Ordinary partial trace over leg t (1-based).
template <class F>
QMatrix<F> partial_trace(const QMatrix<F>& x, int t) {
  const int N = x.base();
  const int p = x.legs();
  if (t < 1 || t > p) throw ConfigError("trace leg out of range");
  QMatrix<F> r(N, p - 1);
  for (std::size_t i = 0; i < r.dim(); ++i) {
    auto li = split_index(i, N, p - 1);
    for (std::size_t j = 0; j < r.dim(); ++j) {
      auto lj = split_index(j, N, p - 1);
      F acc(Rational(0));
      for (int s = 0; s < N; ++s) {
        auto fi = li;
        auto fj = lj;
        fi.insert(fi.begin() + (t - 1), s);
        fj.insert(fj.begin() + (t - 1), s);
        const F& v = x(join_index(fi, N), join_index(fj, N));
        if (!is_zero(v)) acc = acc + v;
      }
      r(i, j) = acc;
    }
  }
  return r;
}

template <class F>
F trace(const QMatrix<F>& x) {
  F acc(Rational(0));
  for (std::size_t i = 0; i < x.dim(); ++i) acc = acc + x(i, i);
  return acc;
}

// ---------------------------------------------------------------------------
// Exact Gaussian elimination.

/// Rank over the coefficient field.
template <class F>
std::size_t rank(std::vector<std::vector<F>> rows) {
  std::size_t r = 0;
  const std::size_t ncols = rows.empty() ? 0 : rows[0].size();
  for (std::size_t c = 0; c < ncols && r < rows.size(); ++c) {
    std::size_t piv = r;
    while (piv < rows.size() && vanishes(rows[piv][c])) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[r], rows[piv]);
    F inv = inverse(rows[r][c]);
    for (std::size_t i = r + 1; i < rows.size(); ++i) {
      if (vanishes(rows[i][c])) continue;
      F f = rows[i][c] * inv;
      for (std::size_t j = c; j < ncols; ++j)
        if (!vanishes(rows[r][j])) rows[i][j] = rows[i][j] - f * rows[r][j];
    }
    ++r;
  }
  return r;
}

template <class F>
std::size_t rank(const QMatrix<F>& m) {
  std::vector<std::vector<F>> rows(m.dim(), std::vector<F>(m.dim()));
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) rows[i][j] = m(i, j);
  return rank(std::move(rows));
}

/// Solves A X = B for square A; nullopt when A is singular.
template <class F>
std::optional<std::vector<std::vector<F>>> solve(std::vector<std::vector<F>> a,
                                                 std::vector<std::vector<F>> b) {
  const std::size_t n = a.size();
  const std::size_t m = b.empty() ? 0 : b[0].size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && vanishes(a[piv][c])) ++piv;
    if (piv == n) return std::nullopt;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    F inv = inverse(a[c][c]);
    for (std::size_t j = 0; j < n; ++j) a[c][j] = a[c][j] * inv;
    for (std::size_t j = 0; j < m; ++j) b[c][j] = b[c][j] * inv;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || vanishes(a[i][c])) continue;
      F f = a[i][c];
      for (std::size_t j = 0; j < n; ++j)
        if (!vanishes(a[c][j])) a[i][j] = a[i][j] - f * a[c][j];
      for (std::size_t j = 0; j < m; ++j)
        if (!vanishes(b[c][j])) b[i][j] = b[i][j] - f * b[c][j];
    }
  }
  return b;
}

template <class F>
std::optional<QMatrix<F>> inverse_matrix(const QMatrix<F>& m) {
  const std::size_t n = m.dim();
  std::vector<std::vector<F>> a(n, std::vector<F>(n)), b(n, std::vector<F>(n, F(Rational(0))));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = m(i, j);
    b[i][i] = F(Rational(1));
  }
  auto x = solve(std::move(a), std::move(b));
  if (!x) return std::nullopt;
  QMatrix<F> r(m.base(), m.legs());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r(i, j) = (*x)[i][j];
  return r;
}

}  // namespace recap
