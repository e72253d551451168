#pragma once

// Hecke-symmetry calculus on QMatrix: braid and Hecke checks, the
// skew-inverse and R-trace, the R-(skew-)symmetrizer towers, rank detection
// and the rank-one factorization of the top skew-symmetrizer.

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "recap/qmatrix.hpp"

namespace recap {

template <class F>
bool check_braid(const QMatrix<F>& r) {
  QMatrix<F> r12 = embed(r, 1, 3);
  QMatrix<F> r23 = embed(r, 2, 3);
  return r12 * r23 * r12 == r23 * r12 * r23;
}

/// (q I - R)(q^-1 I + R) = 0.
template <class F>
bool check_hecke(const QMatrix<F>& r, const QField<F>& qf) {
  auto id = QMatrix<F>::identity(r.base(), 2);
  QMatrix<F> lhs = (qf.q() * id - r) * (qf.pow(-1) * id + r);
  return lhs.is_zero_matrix();
}

/// R^-1; for a Hecke symmetry this is R - (q - q^-1) I.
template <class F>
QMatrix<F> r_inverse(const QMatrix<F>& r, const QField<F>& qf) {
  auto id = QMatrix<F>::identity(r.base(), 2);
  QMatrix<F> cand = r - F(qf.q() - qf.pow(-1)) * id;
  if (r * cand == id) return cand;
  auto inv = inverse_matrix(r);
  if (!inv) throw ValidationError("invertibility", "R is singular");
  return *inv;
}

template <class F>
struct SkewInverseData {
  QMatrix<F> psi;
  QMatrix<F> b_matrix;
  QMatrix<F> c_matrix;
};

/// Solves Tr_2(R_12 Psi_23) = P_13 for Psi. Both partial traces of Psi are
/// returned unassigned: `b_matrix` = Tr_2 Psi, `c_matrix` = Tr_1 Psi.
template <class F>
SkewInverseData<F> solve_skew_inverse(const QMatrix<F>& r) {
  const int N = r.base();
  const std::size_t n2 = static_cast<std::size_t>(N) * N;
  // K_{(i1,j1),(s,t)} = R^{i1 t}_{j1 s}; one right-hand side per (i3, j3).
  std::vector<std::vector<F>> k(n2, std::vector<F>(n2)), rhs(n2, std::vector<F>(n2, F(Rational(0))));
  for (int i1 = 0; i1 < N; ++i1)
    for (int j1 = 0; j1 < N; ++j1) {
      const std::size_t row = i1 * N + j1;
      for (int s = 0; s < N; ++s)
        for (int t = 0; t < N; ++t) k[row][s * N + t] = r(i1 * N + t, j1 * N + s);
      for (int i3 = 0; i3 < N; ++i3)
        for (int j3 = 0; j3 < N; ++j3)
          if (i1 == j3 && i3 == j1) rhs[row][i3 * N + j3] = F(Rational(1));
    }
  auto x = solve(std::move(k), std::move(rhs));
  if (!x) throw ValidationError("skew-invertibility", "R is not skew-invertible");
  SkewInverseData<F> d;
  d.psi = QMatrix<F>(N, 2);
  for (int s = 0; s < N; ++s)
    for (int t = 0; t < N; ++t)
      for (int i3 = 0; i3 < N; ++i3)
        for (int j3 = 0; j3 < N; ++j3) d.psi(s * N + i3, t * N + j3) = (*x)[s * N + t][i3 * N + j3];
  d.b_matrix = partial_trace(d.psi, 2);
  d.c_matrix = partial_trace(d.psi, 1);
  return d;
}

/// Tr_2(R_12 Psi_23) == P_13.
template <class F>
bool check_skew_inverse(const QMatrix<F>& r, const QMatrix<F>& psi) {
  QMatrix<F> prod = embed(r, 1, 3) * embed(psi, 2, 3);
  return partial_trace(prod, 2) == QMatrix<F>::flip(r.base());
}

/// R-trace over the given legs (1-based): C on each leg, then the ordinary
/// partial trace. Legs are traced from the highest down so that numbering of
/// the remaining legs is stable.
template <class F>
QMatrix<F> r_trace(QMatrix<F> x, std::vector<int> legs, const QMatrix<F>& c) {
  std::sort(legs.begin(), legs.end(), std::greater<>());
  for (int t : legs) x = partial_trace(on_leg(c, t, x.legs()) * x, t);
  return x;
}

/// R-trace over all legs, as a scalar.
template <class F>
F r_trace_all(const QMatrix<F>& x, const QMatrix<F>& c) {
  std::vector<int> legs;
  for (int t = 1; t <= x.legs(); ++t) legs.push_back(t);
  return r_trace(x, legs, c)(0, 0);
}

namespace detail {

template <class F>
std::vector<QMatrix<F>> tower(const QMatrix<F>& r, int k_max, const QField<F>& qf, bool skew) {
  const int N = r.base();
  std::vector<QMatrix<F>> out;
  out.push_back(QMatrix<F>::identity(N, 1));
  for (int k = 2; k <= k_max; ++k) {
    F kq = qf.qnum(k);
    if (vanishes(kq)) throw DivisionByZero("q-number " + std::to_string(k) + "_q vanishes");
    QMatrix<F> prev = extend(out.back(), k);
    F shift = skew ? qf.pow(k - 1) : qf.pow(-(k - 1));
    F coef = skew ? F(-qf.qnum(k - 1)) : qf.qnum(k - 1);
    QMatrix<F> mid = shift * QMatrix<F>::identity(N, k) + coef * embed(r, k - 1, k);
    out.push_back(inverse(kq) * (prev * mid * prev));
  }
  return out;
}

}  // namespace detail

/// A^(1), ..., A^(k_max).
template <class F>
std::vector<QMatrix<F>> antisymmetrizer_tower(const QMatrix<F>& r, int k_max, const QField<F>& qf) {
  return detail::tower(r, k_max, qf, true);
}
template <class F>
std::vector<QMatrix<F>> symmetrizer_tower(const QMatrix<F>& r, int k_max, const QField<F>& qf) {
  return detail::tower(r, k_max, qf, false);
}
template <class F>
QMatrix<F> antisymmetrizer(const QMatrix<F>& r, int k, const QField<F>& qf) {
  if (k < 1) throw ConfigError("k must be at least 1");
  return antisymmetrizer_tower(r, k, qf).back();
}
template <class F>
QMatrix<F> symmetrizer(const QMatrix<F>& r, int k, const QField<F>& qf) {
  if (k < 1) throw ConfigError("k must be at least 1");
  return symmetrizer_tower(r, k, qf).back();
}

struct RankReport {
  int m = 0;
  /// dims[k-1] = dim Im A^(k) for k = 1..m+1.
  std::vector<std::size_t> dims;
};

template <class F>
RankReport rank_of(const QMatrix<F>& r, const QField<F>& qf, int cap = 6) {
  RankReport rep;
  const int N = r.base();
  QMatrix<F> a = QMatrix<F>::identity(N, 1);
  for (int k = 1; k <= cap + 1; ++k) {
    if (k > 1) {
      F kq = qf.qnum(k);
      if (vanishes(kq)) throw DivisionByZero("q-number " + std::to_string(k) + "_q vanishes");
      QMatrix<F> prev = extend(a, k);
      QMatrix<F> mid = qf.pow(k - 1) * QMatrix<F>::identity(N, k) + F(-qf.qnum(k - 1)) * embed(r, k - 1, k);
      a = inverse(kq) * (prev * mid * prev);
    }
    rep.dims.push_back(rank(a));
    if (rep.dims.back() == 0) {
      rep.m = k - 1;
      if (rep.m == 0 || rep.dims[rep.m - 1] != 1) {
        throw ValidationError("rank", "top nonvanishing skew-symmetrizer does not have rank one");
      }
      return rep;
    }
  }
  throw ValidationError("rank", "not of finite rank within cap " + std::to_string(cap));
}

template <class F>
struct UVPair {
  std::vector<F> u;  ///< column (ket)
  std::vector<F> v;  ///< row (bra)
};

/// A = |u><v| with <v|u> = 1; the first nonzero component of v is 1.
template <class F>
UVPair<F> uv_factorize(const QMatrix<F>& a) {
  if (rank(a) != 1) throw ValidationError("uv", "matrix does not have rank one");
  const std::size_t n = a.dim();
  std::size_t row = 0, col = 0;
  bool found = false;
  for (std::size_t i = 0; i < n && !found; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!vanishes(a(i, j))) {
        row = i;
        col = j;
        found = true;
        break;
      }
  UVPair<F> p;
  F inv = inverse(a(row, col));
  p.v.resize(n);
  p.u.resize(n);
  for (std::size_t j = 0; j < n; ++j) p.v[j] = a(row, j) * inv;
  for (std::size_t i = 0; i < n; ++i) p.u[i] = a(i, col);
  F vu(Rational(0));
  for (std::size_t i = 0; i < n; ++i) vu = vu + p.v[i] * p.u[i];
  if (vanishes(vu)) throw ValidationError("uv", "<v|u> vanishes");
  F s = inverse(vu);
  for (auto& x : p.u) x = x * s;
  return p;
}

/// Picks the partial trace of Psi that normalizes <A^(m)> to q^(-m^2). Ties
/// between distinct candidates are broken by Tr_2(R_12 C_2) = I.
template <class F>
SkewInverseData<F> skew_inverse(const QMatrix<F>& r, const QField<F>& qf, int rank_m) {
  SkewInverseData<F> d = solve_skew_inverse(r);
  if (!check_skew_inverse(r, d.psi)) {
    throw ValidationError("skew-invertibility", "skew-inverse round trip failed");
  }
  QMatrix<F> am = antisymmetrizer(r, rank_m, qf);
  F target = qf.pow(-rank_m * rank_m);
  auto normalizes = [&](const QMatrix<F>& c) { return vanishes(F(r_trace_all(am, c) - target)); };
  const bool c_ok = normalizes(d.c_matrix);
  const bool b_ok = normalizes(d.b_matrix);
  auto pick_c = [&](bool use_c) {
    if (!use_c) std::swap(d.b_matrix, d.c_matrix);
    return d;
  };
  if (c_ok && !b_ok) return pick_c(true);
  if (b_ok && !c_ok) return pick_c(false);
  if (c_ok && b_ok) {
    if (d.c_matrix == d.b_matrix) return d;
    auto id = QMatrix<F>::identity(r.base(), 1);
    auto unit = [&](const QMatrix<F>& c) {
      return partial_trace(r * on_leg(c, 2, 2), 2) == id;
    };
    const bool cu = unit(d.c_matrix), bu = unit(d.b_matrix);
    if (cu != bu) return pick_c(cu);
    throw ValidationError("skew-invertibility", "both partial traces of Psi normalize the R-trace");
  }
  throw ValidationError("skew-invertibility", "no partial trace of Psi normalizes the R-trace");
}

}  // namespace recap
