#pragma once

// Both sides of the matrix Capelli identities and their corollaries, built as
// NCMatrix expressions in the quantum double and decided by exact reduction.

#include <functional>
#include <numeric>
#include <type_traits>
#include <optional>
#include <string>
#include <vector>

#include "recap/report.hpp"
#include "recap/rewrite.hpp"
#include "recap/weyl.hpp"

namespace recap {

enum class IdentityId {
  th,
  th_s,
  cap_as,
  cap_s,
  cap1,
  mre,
  re_ideal,
  consum,
  h_copy,
  exchange_general,
  shift_scan,
  classical
};

inline const std::vector<std::pair<IdentityId, std::string>>& identity_names() {
  static const std::vector<std::pair<IdentityId, std::string>> names{
      {IdentityId::th, "th"},
      {IdentityId::th_s, "th-s"},
      {IdentityId::cap_as, "cap-as"},
      {IdentityId::cap_s, "cap-s"},
      {IdentityId::cap1, "cap1"},
      {IdentityId::mre, "mre"},
      {IdentityId::re_ideal, "re-ideal"},
      {IdentityId::consum, "consum"},
      {IdentityId::h_copy, "h-copy"},
      {IdentityId::exchange_general, "exchange-general"},
      {IdentityId::shift_scan, "shift-scan"},
      {IdentityId::classical, "classical"}};
  return names;
}

inline std::string to_string(IdentityId id) {
  for (const auto& [i, n] : identity_names())
    if (i == id) return n;
  return "?";
}

inline IdentityId parse_identity(const std::string& s) {
  for (const auto& [i, n] : identity_names())
    if (n == s) return i;
  throw ConfigError("unknown identity '" + s + "'");
}

struct IdentitySpec {
  IdentityId id = IdentityId::th;
  int k = 2;
  int p = 1;
  /// Replacement for the last shift in shift-scan, in the scalar grammar.
  std::string alpha = "q";
  /// Build products free and reduce once at the end instead of reducing
  /// after every multiplication.
  bool lazy = false;

  void validate(int rank, int max_degree) const {
    if (id == IdentityId::exchange_general) {
      if (p < 1 || p >= k) throw ConfigError("exchange-general needs 1 <= p < k");
    }
    if (k < 1) throw ConfigError("k must be at least 1");
    if (k > max_degree) throw ResourceCapError("k = " + std::to_string(k) + " exceeds the degree cap");
    if (id == IdentityId::cap1 && rank > max_degree) throw ResourceCapError("rank exceeds the degree cap");
  }

  Json params() const {
    Json j;
    switch (id) {
      case IdentityId::exchange_general:
        j["p"] = p;
        j["k"] = k;
        break;
      case IdentityId::shift_scan:
        j["k"] = k;
        j["alpha"] = alpha;
        break;
      case IdentityId::cap1:
      case IdentityId::mre:
      case IdentityId::re_ideal:
      case IdentityId::classical:
        break;
      case IdentityId::h_copy:
        j["p"] = p;
        break;
      default:
        j["k"] = k;
    }
    j["reduction"] = lazy ? "lazy" : "eager";
    return j;
  }
};

// ---------------------------------------------------------------------------
// Context: everything scalar that an identity needs, precomputed once.

template <class F>
struct Context {
  std::string rmatrix;
  int N = 1;
  int rank = 1;
  QField<F> qf{F(Rational(2))};
  QMatrix<F> r, r_inv, c;
  std::vector<QMatrix<F>> a_tower, s_tower;  // [k-1] = A^(k), S^(k)
  UVPair<F> uv;
  QuantumDouble<F> qd;
  std::string backend;
  std::vector<std::string> q_points;

  const QMatrix<F>& A(int k) const {
    if (k < 1 || k > static_cast<int>(a_tower.size())) throw ConfigError("antisymmetrizer level out of range");
    return a_tower[k - 1];
  }
  const QMatrix<F>& S(int k) const {
    if (k < 1 || k > static_cast<int>(s_tower.size())) throw ConfigError("symmetrizer level out of range");
    return s_tower[k - 1];
  }
  /// q^(i-1) (i-1)_q.
  F column_shift(int i) const { return qf.pow(i - 1) * qf.qnum(i - 1); }
  /// -(i-1)_q / q^(i-1).
  F row_shift(int i) const { return F(-(qf.qnum(i - 1) * qf.pow(-(i - 1)))); }

  template <class G, class Fn>
  Context<G> map_coefficients(Fn&& fn, QField<G> field, std::string backend_name) const {
    Context<G> out;
    out.rmatrix = rmatrix;
    out.N = N;
    out.rank = rank;
    out.qf = std::move(field);
    out.r = r.template map<G>(fn);
    out.r_inv = r_inv.template map<G>(fn);
    out.c = c.template map<G>(fn);
    for (const auto& x : a_tower) out.a_tower.push_back(x.template map<G>(fn));
    for (const auto& x : s_tower) out.s_tower.push_back(x.template map<G>(fn));
    for (const auto& x : uv.u) out.uv.u.push_back(fn(x));
    for (const auto& x : uv.v) out.uv.v.push_back(fn(x));
    out.qd = qd.template map_coefficients<G>(fn);
    out.backend = std::move(backend_name);
    return out;
  }
};

template <class F>
Context<F> make_context(const HeckeSymmetry<F>& h, const QField<F>& qf, int kmax, RewriteLimits limits = {}) {
  Context<F> ctx;
  ctx.rmatrix = h.name;
  ctx.N = h.N;
  ctx.rank = h.rank();
  ctx.qf = qf;
  ctx.r = h.r;
  ctx.r_inv = h.r_inv;
  ctx.c = h.skew.c_matrix;
  const int top = std::max({kmax, ctx.rank + 1, 1});
  ctx.a_tower = antisymmetrizer_tower(h.r, top, qf);
  ctx.s_tower = symmetrizer_tower(h.r, top, qf);
  ctx.uv = uv_factorize(ctx.A(ctx.rank));
  ctx.qd = build_double(h, 2, limits);
  if (h.q_config.mode == QConfig::Mode::symbolic) {
    ctx.backend = "symbolic";
    ctx.q_points = {"q"};
  } else {
    ctx.backend = "fixed";
    ctx.q_points = {h.q_config.q_value->get_str()};
  }
  return ctx;
}

// ---------------------------------------------------------------------------
// Expression building

/// Multiplication policy: eager keeps every intermediate reduced; lazy
/// multiplies freely and reduces once.
template <class F>
struct Multiplier {
  const QuantumDouble<F>* qd;
  bool eager = true;
  NCPoly<F> mul(const NCPoly<F>& a, const NCPoly<F>& b) const { return eager ? qd->mul(a, b) : a * b; }
  NCMatrix<F> finish(const NCMatrix<F>& x) const {
    if (eager) return x;
    return x.transform([&](const NCPoly<F>& p) { return qd->reduce(p); });
  }
  NCPoly<F> finish(const NCPoly<F>& x) const { return eager ? x : qd->reduce(x); }
};

template <class F>
class Builder {
 public:
  Builder(const Context<F>& ctx, bool eager) : ctx_(ctx), mult_{&ctx.qd, eager} {}

  const Multiplier<F>& multiplier() const { return mult_; }

  NCMatrix<F> mul(const NCMatrix<F>& x, const NCMatrix<F>& y) const { return mat_mul(x, y, mult_); }

  NCMatrix<F> M() const { return gen_matrix<F>(GenKind::m, ctx_.N); }
  NCMatrix<F> D() const { return gen_matrix<F>(GenKind::d, ctx_.N); }
  NCMatrix<F> L() const { return mul(M(), D()); }

  std::vector<NCMatrix<F>> M_ov(int legs) const { return over_copies(M(), legs, ctx_.r, ctx_.r_inv); }
  std::vector<NCMatrix<F>> D_ov(int legs) const { return over_copies(D(), legs, ctx_.r, ctx_.r_inv); }
  std::vector<NCMatrix<F>> L_ov(int legs) const { return over_copies(L(), legs, ctx_.r, ctx_.r_inv); }

  /// L_ov1 (L_ov2 + s_2) ... (L_ovk + s_k).
  NCMatrix<F> l_chain(int k, const std::function<F(int)>& shift) const {
    auto ls = L_ov(k);
    NCMatrix<F> x = ls[0];
    for (int i = 2; i <= k; ++i) x = mul(x, ls[i - 1].shifted(shift(i)));
    return x;
  }

  /// M_ov1 ... M_ovk D_ovk ... D_ov1.
  NCMatrix<F> md_chain(int k) const {
    auto ms = M_ov(k);
    auto ds = D_ov(k);
    NCMatrix<F> x = ms[0];
    for (int i = 2; i <= k; ++i) x = mul(x, ms[i - 1]);
    for (int i = k; i >= 1; --i) x = mul(x, ds[i - 1]);
    return x;
  }

  NCMatrix<F> m_chain(int k) const {
    auto ms = M_ov(k);
    NCMatrix<F> x = ms[0];
    for (int i = 2; i <= k; ++i) x = mul(x, ms[i - 1]);
    return x;
  }

  /// D_ovk ... D_ov1.
  NCMatrix<F> d_chain_reversed(int k) const {
    auto ds = D_ov(k);
    NCMatrix<F> x = ds[k - 1];
    for (int i = k - 1; i >= 1; --i) x = mul(x, ds[i - 1]);
    return x;
  }

 private:
  const Context<F>& ctx_;
  Multiplier<F> mult_;
};

/// Both sides of the column identity:
///   A L_ov1 (L_ov2 + q 1_q) ... (L_ovk + q^(k-1)(k-1)_q) A
///   = q^(k(k-1)) A M_ov1 ... M_ovk D_ovk ... D_ov1.
/// `last_shift` replaces the final shift (shift scan).
template <class F>
std::pair<NCMatrix<F>, NCMatrix<F>> column_sides(const Context<F>& ctx, int k, bool eager = true,
                                                 std::optional<F> last_shift = std::nullopt, bool trailing = true) {
  Builder<F> b(ctx, eager);
  const QMatrix<F>& a = ctx.A(k);
  auto shift = [&](int i) { return (last_shift && i == k) ? *last_shift : ctx.column_shift(i); };
  NCMatrix<F> lhs = a * b.l_chain(k, shift);
  if (trailing) lhs = lhs * a;
  NCMatrix<F> rhs = ctx.qf.pow(k * (k - 1)) * (a * b.md_chain(k));
  return {b.multiplier().finish(lhs), b.multiplier().finish(rhs)};
}

/// Row identity with S^(k), shifts -(i-1)_q/q^(i-1) and prefactor q^(-k(k-1)).
template <class F>
std::pair<NCMatrix<F>, NCMatrix<F>> row_sides(const Context<F>& ctx, int k, bool eager = true, bool trailing = true) {
  Builder<F> b(ctx, eager);
  const QMatrix<F>& s = ctx.S(k);
  NCMatrix<F> lhs = s * b.l_chain(k, [&](int i) { return ctx.row_shift(i); });
  if (trailing) lhs = lhs * s;
  NCMatrix<F> rhs = ctx.qf.pow(-k * (k - 1)) * (s * b.md_chain(k));
  return {b.multiplier().finish(lhs), b.multiplier().finish(rhs)};
}

/// e_k(M) = <A^(k) M_ov1 ... M_ovk>; e_0 = 1.
template <class F>
NCPoly<F> e_k(const Context<F>& ctx, int k) {
  if (k == 0) return NCPoly<F>::constant(F(Rational(1)));
  Builder<F> b(ctx, true);
  return r_trace_all(ctx.A(k) * b.m_chain(k), ctx.c);
}

struct DetForms {
  template <class F>
  struct Pair {
    NCPoly<F> r_trace_form;
    NCPoly<F> uv_form;
  };
};

/// det_R M in both forms: q^(m^2) <A^(m) M_ov1 ... M_ovm> and <v|M_ov1...M_ovm|u>.
template <class F>
DetForms::Pair<F> det_r(const Context<F>& ctx, const UVPair<F>* gauge = nullptr) {
  Builder<F> b(ctx, true);
  const int m = ctx.rank;
  NCMatrix<F> chain = b.m_chain(m);
  const UVPair<F>& uv = gauge ? *gauge : ctx.uv;
  return {r_trace_all(ctx.A(m) * chain, ctx.c).scaled(ctx.qf.pow(m * m)), sandwich(uv.v, chain, uv.u)};
}

/// det_{R^-1} D with the copies in reverse order, in both forms.
template <class F>
DetForms::Pair<F> det_rinv(const Context<F>& ctx, const UVPair<F>* gauge = nullptr) {
  Builder<F> b(ctx, true);
  const int m = ctx.rank;
  NCMatrix<F> chain = b.d_chain_reversed(m);
  const UVPair<F>& uv = gauge ? *gauge : ctx.uv;
  return {r_trace_all(ctx.A(m) * chain, ctx.c).scaled(ctx.qf.pow(m * m)), sandwich(uv.v, chain, uv.u)};
}

/// (lambda u, lambda^-1 v).
template <class F>
UVPair<F> regauge(const UVPair<F>& uv, const F& lambda) {
  UVPair<F> g = uv;
  F inv = inverse(lambda);
  for (auto& x : g.u) x = x * lambda;
  for (auto& x : g.v) x = x * inv;
  return g;
}

// ---------------------------------------------------------------------------
// Residual bookkeeping

/// For tracked coefficients: the widest exponent window among all residual
/// terms, vanishing or not, and the number of such terms.
template <class F>
void record_window(VerificationReport& rep, const NCPoly<F>& p) {
  if constexpr (std::is_same_v<F, Tracked>) {
    int width = rep.params.value("window", 0);
    int words = rep.params.value("residual_words", 0);
    for (const auto& [w, c] : p.terms()) {
      width = std::max(width, c.points_needed());
      ++words;
    }
    rep.params["window"] = width;
    rep.params["residual_words"] = words;
  } else {
    (void)rep;
    (void)p;
  }
}

template <class F>
void record_residual(VerificationReport& rep, const NCMatrix<F>& diff, std::size_t sample = 5) {
  const int N = diff.base();
  for (const auto& e : diff.entries()) record_window(rep, e);
  for (std::size_t i = 0; i < diff.dim(); ++i)
    for (std::size_t j = 0; j < diff.dim(); ++j) {
      const NCPoly<F>& e = diff(i, j);
      if (e.vanishes_everywhere()) continue;
      for (const auto& [w, c] : e.terms())
        if (!vanishes(c)) ++rep.residual_terms;
      if (rep.residual_sample.size() < sample) {
        rep.residual_sample.push_back("(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "): " + e.str(N, 4));
      }
    }
}

template <class F>
void record_residual(VerificationReport& rep, const NCPoly<F>& diff, const std::string& label = "scalar") {
  record_window(rep, diff);
  if (diff.vanishes_everywhere()) return;
  for (const auto& [w, c] : diff.terms())
    if (!vanishes(c)) ++rep.residual_terms;
  if (rep.residual_sample.size() < 5) {
    int N = 1;
    for (const auto& [w, c] : diff.terms())
      for (char ch : w.letters) {
        const int code = static_cast<unsigned char>(ch) - (is_d_letter(ch) ? kDOffset : 0);
        while (N * N <= code) ++N;
      }
    rep.residual_sample.push_back(label + ": " + diff.str(N, 4));
  }
}

template <class F>
bool nc_equal(const NCPoly<F>& a, const NCPoly<F>& b) {
  return (a - b).vanishes_everywhere();
}

// ---------------------------------------------------------------------------
// Verifiers. Each returns a finalized report; errors inside are captured.

namespace detail {

template <class F>
VerificationReport start_report(const Context<F>& ctx, const IdentitySpec& spec) {
  VerificationReport rep;
  rep.identity = to_string(spec.id);
  rep.params = spec.params();
  rep.params["N"] = ctx.N;
  rep.rmatrix = ctx.rmatrix;
  rep.q_points = ctx.q_points;
  rep.backend = ctx.backend;
  return rep;
}

template <class F>
F parse_alpha(const std::string& text, const QField<F>& qf) {
  RatFunc a = parse_ratfunc(text);
  // Substitute the backend's q into numerator and denominator.
  auto eval_poly = [&](const LaurentPoly& p) {
    F acc = qf.zero();
    for (std::size_t i = 0; i < p.length(); ++i) {
      if (sgn(p.coeffs()[i]) == 0) continue;
      acc = acc + F(p.coeffs()[i]) * qf.pow(p.low() + static_cast<int>(i));
    }
    return acc;
  };
  return eval_poly(a.num()) * inverse(eval_poly(a.den()));
}

}  // namespace detail

template <class F>
void verify_matrix_into(VerificationReport& rep, const Context<F>& ctx, const IdentitySpec& spec) {
  PhaseTimer timer(rep);
  const int k = spec.k;
  ctx.qd.ensure_degree(std::max(k, 2));
  timer.lap("completion");
  std::pair<NCMatrix<F>, NCMatrix<F>> sides;
  if (spec.id == IdentityId::th_s) {
    sides = row_sides(ctx, k, !spec.lazy);
  } else if (spec.id == IdentityId::shift_scan) {
    F alpha = detail::parse_alpha(spec.alpha, ctx.qf);
    sides = column_sides(ctx, k, !spec.lazy, std::optional<F>(alpha));
    rep.add_check("alpha equals q^(k-1)(k-1)_q", vanishes(F(alpha - ctx.column_shift(k))), "", true);
  } else {
    sides = column_sides(ctx, k, !spec.lazy);
  }
  timer.lap("build_reduce");
  record_residual(rep, sides.first - sides.second);
  timer.lap("compare");
}

template <class F>
void verify_traced_into(VerificationReport& rep, const Context<F>& ctx, const IdentitySpec& spec) {
  PhaseTimer timer(rep);
  const int k = spec.k;
  ctx.qd.ensure_degree(std::max(k, 2));
  timer.lap("completion");
  auto sides = spec.id == IdentityId::cap_s ? row_sides(ctx, k, !spec.lazy, false)
                                            : column_sides<F>(ctx, k, !spec.lazy, std::optional<F>(), false);
  NCPoly<F> lhs = r_trace_all(sides.first, ctx.c);
  NCPoly<F> rhs = r_trace_all(sides.second, ctx.c);
  timer.lap("build_reduce");
  record_residual(rep, NCPoly<F>(lhs - rhs), "traced");
  timer.lap("compare");
}

/// Quantum Capelli identity at k = rank, with the determinant cross-checks.
template <class F>
void verify_cap1_into(VerificationReport& rep, const Context<F>& ctx, const IdentitySpec& spec) {
  PhaseTimer timer(rep);
  const int m = ctx.rank;
  rep.params["m"] = m;
  ctx.qd.ensure_degree(std::max(m, 2));
  timer.lap("completion");
  Builder<F> b(ctx, !spec.lazy);
  NCMatrix<F> chain = ctx.A(m) * b.l_chain(m, [&](int i) { return ctx.column_shift(i); });
  NCPoly<F> lhs = r_trace_all(b.multiplier().finish(chain), ctx.c);
  auto dm = det_r(ctx);
  auto dd = det_rinv(ctx);
  F pref = ctx.qf.pow(-m);
  NCPoly<F> rhs = ctx.qd.mul(dm.uv_form, dd.uv_form).scaled(pref);
  timer.lap("build_reduce");
  record_residual(rep, NCPoly<F>(lhs - rhs), "cap1");

  rep.add_check("det_R M: R-trace form = <v|..|u> form", nc_equal(dm.r_trace_form, dm.uv_form));
  rep.add_check("det_R^-1 D: R-trace form = <v|..|u> form", nc_equal(dd.r_trace_form, dd.uv_form));
  UVPair<F> g = regauge(ctx.uv, F(Rational(3, 7)));
  auto dm_g = det_r(ctx, &g);
  auto dd_g = det_rinv(ctx, &g);
  rep.add_check("uv gauge invariance", nc_equal(dm_g.uv_form, dm.uv_form) && nc_equal(dd_g.uv_form, dd.uv_form));
  // A^(m) M_ov1...M_ovm = A^(m) <v|M_ov1...M_ovm|u>.
  NCMatrix<F> am = ctx.A(m) * b.m_chain(m);
  NCMatrix<F> scaled(ctx.N, m);
  for (std::size_t i = 0; i < am.dim(); ++i)
    for (std::size_t j = 0; j < am.dim(); ++j)
      if (!is_zero(ctx.A(m)(i, j))) scaled(i, j) = dm.uv_form.scaled(ctx.A(m)(i, j));
  NCMatrix<F> matr = b.multiplier().finish(am) - scaled;
  rep.add_check("matrix identity A M..M = A det", matr.entries().end() ==
                                                         std::find_if(matr.entries().begin(), matr.entries().end(),
                                                                      [](const NCPoly<F>& e) {
                                                                        return !e.vanishes_everywhere();
                                                                      }));
  NCPoly<F> reversed = ctx.qd.mul(dd.uv_form, dm.uv_form).scaled(pref);
  rep.add_check("reversed order det D * det M", nc_equal(lhs, reversed), "order fixed by the identity", true);
  timer.lap("checks");
}

template <class F>
bool all_vanish(const NCMatrix<F>& x) {
  for (const auto& e : x.entries())
    if (!e.vanishes_everywhere()) return false;
  return true;
}

/// R L_1 R L_1 - L_1 R L_1 R = R L_1 - L_1 R.
template <class F>
void verify_mre_into(VerificationReport& rep, const Context<F>& ctx, const IdentitySpec& spec) {
  PhaseTimer timer(rep);
  ctx.qd.ensure_degree(2);
  timer.lap("completion");
  Builder<F> b(ctx, !spec.lazy);
  NCMatrix<F> l1 = extend(b.L(), 2);
  const QMatrix<F>& r = ctx.r;
  NCMatrix<F> lhs = b.mul(r * l1 * r, l1) - b.mul(l1 * r, l1) * r;
  NCMatrix<F> rhs = r * l1 - l1 * r;
  NCMatrix<F> diff = b.multiplier().finish(lhs - rhs);
  timer.lap("build_reduce");
  record_residual(rep, diff);
}

/// D_1 X = X D_1 R_1^-1 R_2^-2 R_1^-1 with X = R_2 M_ov2 M_ov3 - M_ov2 M_ov3 R_2,
/// both sides normal-ordered freely and reduced modulo the m-ideal.
template <class F>
void verify_re_ideal_into(VerificationReport& rep, const Context<F>& ctx, const IdentitySpec&) {
  PhaseTimer timer(rep);
  ctx.qd.ensure_degree(2);
  timer.lap("completion");
  Builder<F> free(ctx, false);
  auto ms = free.M_ov(3);
  NCMatrix<F> d1 = extend(free.D(), 3);
  QMatrix<F> r1 = embed(ctx.r, 1, 3), r2 = embed(ctx.r, 2, 3);
  QMatrix<F> ri1 = embed(ctx.r_inv, 1, 3), ri2 = embed(ctx.r_inv, 2, 3);
  NCMatrix<F> x = r2 * free.mul(ms[1], ms[2]) - free.mul(ms[1], ms[2]) * r2;
  NCMatrix<F> lhs = free.mul(d1, x);
  NCMatrix<F> rhs = free.mul(x, d1) * (ri1 * ri2 * ri2 * ri1);
  auto ordered = [&](const NCMatrix<F>& y) {
    return y.transform([&](const NCPoly<F>& p) { return ctx.qd.normal_order(p); });
  };
  NCMatrix<F> lo = ordered(lhs), ro = ordered(rhs);
  timer.lap("normal_order");
  NCMatrix<F> diff = (lo - ro).transform([&](const NCPoly<F>& p) { return ctx.qd.reduce_segments(p); });
  timer.lap("reduce");
  record_residual(rep, diff);
  auto lred = lo.transform([&](const NCPoly<F>& p) { return ctx.qd.reduce_segments(p); });
  rep.add_check("left side lies in the ideal", all_vanish(lred), "", true);
}

/// R_p M_ovp M_ov(p+1) = M_ovp M_ov(p+1) R_p modulo the m-ideal, and the
/// equivalence of the two forms of the RE relations.
template <class F>
void verify_h_copy_into(VerificationReport& rep, const Context<F>& ctx, const IdentitySpec& spec) {
  PhaseTimer timer(rep);
  const int p = spec.p;
  if (p < 1) throw ConfigError("h-copy needs p >= 1");
  ctx.qd.ensure_degree(2);
  timer.lap("completion");
  Builder<F> b(ctx, !spec.lazy);
  auto ms = b.M_ov(p + 1);
  QMatrix<F> rp = embed(ctx.r, p, p + 1);
  NCMatrix<F> prod = b.mul(ms[p - 1], ms[p]);
  NCMatrix<F> diff = b.multiplier().finish(rp * prod - prod * rp);
  timer.lap("build_reduce");
  record_residual(rep, diff);
  // Span comparison of the two relation sets over degree-2 words.
  Builder<F> free(ctx, false);
  auto m2 = free.M_ov(2);
  NCMatrix<F> alt = ctx.r * free.mul(m2[0], m2[1]) - free.mul(m2[0], m2[1]) * ctx.r;
  auto first = re_relations(ctx.r);
  auto second = alt.entries();
  auto both = first;
  both.insert(both.end(), second.begin(), second.end());
  const std::size_t r1 = echelon_rules(first).size(), r2 = echelon_rules(second).size(),
                    r12 = echelon_rules(both).size();
  rep.add_check("RE forms span the same space", r1 == r2 && r2 == r12,
                "ranks " + std::to_string(r1) + "/" + std::to_string(r2) + "/" + std::to_string(r12));
  timer.lap("checks");
}

/// D_ovp L_ovk = L_ovk D_ovp R_{k-1->p+1} R_p^-2 R^-1_{p+1->k-1}
///             + D_ovp R_{k-1->p+1} R_p^-1 R^-1_{p+1->k-1}.
template <class F>
void verify_exchange_general_into(VerificationReport& rep, const Context<F>& ctx, const IdentitySpec& spec) {
  PhaseTimer timer(rep);
  const int p = spec.p, k = spec.k;
  ctx.qd.ensure_degree(std::max(k, 2));
  timer.lap("completion");
  Builder<F> b(ctx, !spec.lazy);
  auto ds = b.D_ov(k);
  auto ls = b.L_ov(k);
  QMatrix<F> down = QMatrix<F>::identity(ctx.N, k), up = QMatrix<F>::identity(ctx.N, k);
  for (int i = k - 1; i >= p + 1; --i) down = down * embed(ctx.r, i, k);
  for (int i = p + 1; i <= k - 1; ++i) up = up * embed(ctx.r_inv, i, k);
  QMatrix<F> rpi = embed(ctx.r_inv, p, k);
  const NCMatrix<F>& dp = ds[p - 1];
  const NCMatrix<F>& lk = ls[k - 1];
  NCMatrix<F> lhs = b.mul(dp, lk);
  NCMatrix<F> rhs = b.mul(lk, dp) * (down * rpi * rpi * up) + dp * (down * rpi * up);
  NCMatrix<F> diff = b.multiplier().finish(lhs - rhs);
  timer.lap("build_reduce");
  record_residual(rep, diff);
}

/// Idempotency, nesting and eigenvalue absorption for A^(k), S^(k),
/// k <= kmax, plus a non-Hecke negative control.
template <class F>
void verify_consum_into(VerificationReport& rep, const Context<F>& ctx, const IdentitySpec& spec) {
  PhaseTimer timer(rep);
  const QField<F>& qf = ctx.qf;
  const int kmax = spec.k;
  auto a_tower = antisymmetrizer_tower(ctx.r, kmax, qf);
  auto s_tower = symmetrizer_tower(ctx.r, kmax, qf);
  bool idem = true, nest = true, absorb_a = true, absorb_s = true;
  for (int k = 1; k <= kmax; ++k) {
    const auto& a = a_tower[k - 1];
    const auto& s = s_tower[k - 1];
    idem = idem && a * a == a && s * s == s;
    if (k > 1) {
      auto ap = extend(a_tower[k - 2], k), sp = extend(s_tower[k - 2], k);
      nest = nest && a * ap == a && ap * a == a && s * sp == s && sp * s == s;
    }
    for (int i = 1; i < k; ++i) {
      auto ri = embed(ctx.r, i, k), rii = embed(ctx.r_inv, i, k);
      F mq = -qf.pow(-1), mqi = -qf.q();
      absorb_a = absorb_a && a * ri == mq * a && ri * a == mq * a && a * rii == mqi * a && rii * a == mqi * a;
      absorb_s = absorb_s && s * ri == qf.q() * s && ri * s == qf.q() * s && s * rii == qf.pow(-1) * s &&
                 rii * s == qf.pow(-1) * s;
    }
  }
  rep.add_check("idempotency", idem);
  rep.add_check("nesting", nest);
  rep.add_check("absorption A R_i = -q^-1 A", absorb_a);
  rep.add_check("absorption S R_i = q S", absorb_s, "", true);
  // Negative control: 2R satisfies the braid relation but not the Hecke
  // condition, and absorption breaks.
  if (kmax >= 2) {
    QMatrix<F> bad = F(Rational(2)) * ctx.r;
    auto a2 = antisymmetrizer(bad, 2, qf);
    auto r1 = embed(bad, 1, 2);
    bool holds = a2 * r1 == F(-qf.pow(-1)) * a2;
    rep.add_check("non-Hecke control breaks absorption", !holds);
  }
  timer.lap("checks");
}

/// Classical oracle: det(MD + K) = det M det D in the commutative Weyl
/// algebra, and the negative control K = 0.
inline void verify_classical_into(VerificationReport& rep, int N) {
  PhaseTimer timer(rep);
  if (N < 1 || N > 3) throw ConfigError("classical oracle supports 1 <= N <= 3");
  auto good = weyl::capelli(N, weyl::capelli_shifts(N));
  rep.add_check("cdet(MD + diag(N-1..0)) = det M det D", good.holds, good.convention + " determinant");
  if (!good.holds) {
    rep.residual_terms = (good.lhs - good.rhs).terms().size();
    rep.residual_sample.push_back((good.lhs - good.rhs).str().substr(0, 400));
  }
  if (N >= 2) {
    auto bad = weyl::capelli(N, std::vector<weyl::Q>(N, 0));
    rep.add_check("K = 0 fails", !bad.holds);
  }
  timer.lap("oracle");
}

/// Commutative image of a reduced engine element at R = P, q = 1:
/// m_i^j -> x_ij, d_i^j -> D_ij.
inline weyl::Element to_weyl(const NCPoly<Rational>& x, int N) {
  weyl::Element e(N);
  for (const auto& [w, c] : x.terms()) {
    weyl::Monomial mono{std::vector<int>(N * N), std::vector<int>(N * N)};
    for (char ch : w.letters) {
      Gen g = Gen::decode(static_cast<unsigned char>(ch), N);
      (g.kind == GenKind::m ? mono.x : mono.d)[g.i * N + g.j] += 1;
    }
    e.add(mono, c);
  }
  return e;
}

/// At an involutive R = P, the engine's cap1 sides agree with the oracle's
/// det(MD + K) and det M det D.
inline void compare_cap1_with_oracle(VerificationReport& rep, const Context<Rational>& ctx) {
  const int N = ctx.N;
  const int m = ctx.rank;
  ctx.qd.ensure_degree(std::max(m, 2));
  Builder<Rational> b(ctx, true);
  NCMatrix<Rational> chain = ctx.A(m) * b.l_chain(m, [&](int i) { return ctx.column_shift(i); });
  NCPoly<Rational> lhs = r_trace_all(chain, ctx.c);
  auto dm = det_r(ctx), dd = det_rinv(ctx);
  NCPoly<Rational> rhs = ctx.qd.mul(dm.uv_form, dd.uv_form).scaled(ctx.qf.pow(-m));
  auto oracle = weyl::capelli(N, weyl::capelli_shifts(N));
  rep.add_check("engine cap1 left side = oracle cdet(MD + K)", to_weyl(lhs, N) == oracle.lhs);
  rep.add_check("engine cap1 right side = oracle det M det D", to_weyl(rhs, N) == oracle.rhs);
}

/// Runs one identity; configuration and cap errors propagate, anything else
/// is recorded in the report.
template <class F>
VerificationReport verify(const Context<F>& ctx, const IdentitySpec& spec, int max_degree = 8) {
  VerificationReport rep = detail::start_report(ctx, spec);
  spec.validate(ctx.rank, max_degree);
  switch (spec.id) {
    case IdentityId::th:
    case IdentityId::th_s:
    case IdentityId::shift_scan:
      verify_matrix_into(rep, ctx, spec);
      break;
    case IdentityId::cap_as:
    case IdentityId::cap_s:
      verify_traced_into(rep, ctx, spec);
      break;
    case IdentityId::cap1:
      verify_cap1_into(rep, ctx, spec);
      break;
    case IdentityId::mre:
      verify_mre_into(rep, ctx, spec);
      break;
    case IdentityId::re_ideal:
      verify_re_ideal_into(rep, ctx, spec);
      break;
    case IdentityId::h_copy:
      verify_h_copy_into(rep, ctx, spec);
      break;
    case IdentityId::exchange_general:
      verify_exchange_general_into(rep, ctx, spec);
      break;
    case IdentityId::consum:
      verify_consum_into(rep, ctx, spec);
      break;
    case IdentityId::classical:
      verify_classical_into(rep, ctx.N);
      if constexpr (std::is_same_v<F, Rational>) {
        if (ctx.qf.q() == 1) compare_cap1_with_oracle(rep, ctx);
      }
      break;
  }
  rep.finalize();
  return rep;
}

// ---------------------------------------------------------------------------
// Rigor mode: a rational-function identity N(q)/Delta(q)^t = 0 with the
// exponents of N inside a known window of width w is proved by w distinct
// points that avoid the roots of Delta.

struct RigorPlan {
  LaurentPoly delta;  ///< common denominator of every precomputed scalar
  int delta_degree = 0;
};

namespace detail {

inline LaurentPoly poly_lcm(const LaurentPoly& a, const LaurentPoly& b) {
  auto g = poly_gcd(dense_of(a), dense_of(b));
  auto q = exact_quotient(dense_of(a), g);
  return LaurentPoly(0, dense_of(LaurentPoly(0, q) * b));
}

inline Tracked track(const RatFunc& x, const Rational& q0, const RigorPlan& plan) {
  if (x.is_zero()) return Tracked();
  if (x.is_laurent()) {
    return Tracked::with_bounds(eval_at(x, q0), 0, x.num().low(), x.num().high(), plan.delta_degree);
  }
  LaurentPoly cof(0, exact_quotient(dense_of(plan.delta), dense_of(x.den())));
  LaurentPoly n = x.num() * cof;
  return Tracked::with_bounds(eval_at(x, q0), 1, n.low(), n.high(), plan.delta_degree);
}

}  // namespace detail

inline RigorPlan plan_rigor(const Context<RatFunc>& sym) {
  LaurentPoly delta = LaurentPoly::monomial(0, Rational(1));
  auto absorb = [&](const RatFunc& x) {
    if (!x.is_laurent()) delta = detail::poly_lcm(delta, x.den());
  };
  auto absorb_matrix = [&](const QMatrix<RatFunc>& m) {
    for (std::size_t i = 0; i < m.dim(); ++i)
      for (std::size_t j = 0; j < m.dim(); ++j) absorb(m(i, j));
  };
  absorb_matrix(sym.r);
  absorb_matrix(sym.r_inv);
  absorb_matrix(sym.c);
  for (const auto& a : sym.a_tower) absorb_matrix(a);
  for (const auto& s : sym.s_tower) absorb_matrix(s);
  for (const auto& x : sym.uv.u) absorb(x);
  for (const auto& x : sym.uv.v) absorb(x);
  for (const auto& [w, p] : sym.qd.table().entries)
    for (const auto& [u, c] : p.terms()) absorb(c);
  sym.qd.m_system().for_each_coefficient(absorb);
  sym.qd.d_system().for_each_coefficient(absorb);
  RigorPlan plan;
  plan.delta = delta;
  plan.delta_degree = delta.high();
  return plan;
}

/// Positive rationals != 1 with small height: 2, 1/2, 3, 1/3, 3/2, 2/3, ...
inline std::vector<Rational> sample_points(std::size_t count, const std::function<bool(const Rational&)>& admissible) {
  std::vector<Rational> out;
  for (int height = 3; out.size() < count; ++height)
    for (int a = height - 1; a >= 1 && out.size() < count; --a) {
      const int b = height - a;
      if (std::gcd(a, b) != 1 || a == b) continue;
      Rational q0(a, b);
      if (admissible(q0)) out.push_back(q0);
    }
  return out;
}

inline Context<Tracked> tracked_context(const Context<RatFunc>& sym, const RigorPlan& plan, const Rational& q0) {
  auto fn = [&](const RatFunc& x) { return detail::track(x, q0, plan); };
  QField<Tracked> qf(Tracked::with_bounds(q0, 0, 1, 1, plan.delta_degree));
  Context<Tracked> ctx = sym.map_coefficients<Tracked>(fn, qf, "rigor");
  ctx.q_points = {q0.get_str()};
  return ctx;
}

/// Verifies an identity at enough points to certify its residual over Q(q).
/// Sub-checks attached to a report remain point checks.
inline VerificationReport verify_rigorous(const Context<RatFunc>& sym, IdentitySpec spec, int max_degree = 8,
                                          std::size_t point_cap = 2000) {
  if (spec.id == IdentityId::consum || spec.id == IdentityId::classical) {
    throw ConfigError("rigor mode applies to identities in the double only");
  }
  spec.validate(sym.rank, max_degree);
  spec.lazy = false;
  auto t0 = std::chrono::steady_clock::now();
  const int degree = spec.id == IdentityId::re_ideal ? 3 : std::max({spec.k, sym.rank, 2});
  sym.qd.ensure_degree(degree);
  RigorPlan plan = plan_rigor(sym);
  auto admissible = [&](const Rational& q0) { return sgn(plan.delta.eval(q0)) != 0; };

  VerificationReport rep;
  std::vector<std::string> used;
  int window = 0, words = 0;
  bool structure_ok = true;
  std::size_t needed = 1;
  std::vector<Rational> points;
  for (std::size_t idx = 0; idx < needed; ++idx) {
    if (idx >= points.size()) points = sample_points(needed, admissible);
    Context<Tracked> ctx = tracked_context(sym, plan, points[idx]);
    VerificationReport one = verify(ctx, spec, max_degree);
    used.push_back(points[idx].get_str());
    const int w = one.params.value("window", 0), n = one.params.value("residual_words", 0);
    if (idx == 0) {
      window = w;
      words = n;
      needed = std::max<std::size_t>(1, static_cast<std::size_t>(window));
      if (needed > point_cap) {
        rep = one;
        rep.error = "degree window " + std::to_string(window) + " exceeds the point cap";
        break;
      }
    } else if (w != window || n != words) {
      structure_ok = false;
    }
    rep = one;
    if (!one.pass) break;
  }
  rep.params.erase("window");
  rep.params.erase("residual_words");
  rep.params["degree_bound"] = std::max(window - 1, 0);
  rep.params["residual_words"] = words;
  rep.params["delta"] = plan.delta.str();
  rep.q_points = used;
  rep.backend = "rigor";
  rep.timings_ms.clear();
  rep.timings_ms.emplace_back(
      "total", std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  rep.add_check("points cover the degree bound", used.size() >= needed,
                std::to_string(used.size()) + " points for window " + std::to_string(window));
  rep.add_check("residual structure identical at every point", structure_ok);
  rep.finalize();
  return rep;
}

}  // namespace recap
