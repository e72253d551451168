#pragma once

// Rewriting in the quantum double of the RE algebra M(R) and the derivative
// algebra D(R^-1): the exchange table that moves a derivative past a
// coordinate, degree-truncated completion of the two quadratic relation sets,
// normal ordering and canonical reduction.

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "recap/ncalg.hpp"
#include "recap/rcatalog.hpp"

namespace recap {

// ---------------------------------------------------------------------------
// Exchange table

/// d_a^b m_c^d = sum coeff * m_x^y d_u^v + constant, keyed by the two-letter
/// word (d_a^b, m_c^d). Values are normal-ordered polynomials.
template <class F>
struct ExchangeTable {
  int N = 1;
  std::unordered_map<Word, NCPoly<F>, WordHash> entries;

  const NCPoly<F>& lookup(char d_letter, char m_letter) const {
    auto it = entries.find(Word(std::string{d_letter, m_letter}));
    if (it == entries.end()) throw Error("exchange table has no entry for this pair");
    return it->second;
  }

  template <class G, class Fn>
  ExchangeTable<G> map_coefficients(Fn&& fn) const {
    ExchangeTable<G> t;
    t.N = N;
    for (const auto& [k, v] : entries) t.entries.emplace(k, v.template map_coefficients<G>(fn));
    return t;
  }
};

/// R M_1 R^-1 D_1 R^-1 + I on two legs: the right side of the permutation
/// relations D_1 R M_1 = R M_1 R^-1 D_1 R^-1 + I.
template <class F>
NCMatrix<F> exchange_rhs(const QMatrix<F>& r, const QMatrix<F>& r_inv) {
  const int N = r.base();
  auto m1 = extend(gen_matrix<F>(GenKind::m, N), 2);
  auto d1 = extend(gen_matrix<F>(GenKind::d, N), 2);
  NCMatrix<F> x = mat_mul(r * m1 * r_inv, d1) * r_inv;
  return x.shifted(F(Rational(1)));
}

/// Solves the permutation relations for every product d_a^x m_z^c. With
/// K_{(b,d),(x,z)} = R^{xb}_{zd} (a partial transpose of R) the relations
/// read sum_{x,z} K_{(b,d),(x,z)} T[a,x,z,c] = RHS_{(a,b),(c,d)}; K is
/// invertible exactly when R is skew-invertible.
template <class F>
ExchangeTable<F> derive_exchange(const QMatrix<F>& r, const QMatrix<F>& r_inv) {
  const int N = r.base();
  const std::size_t n2 = static_cast<std::size_t>(N) * N;
  QMatrix<F> k(N, 2);
  for (int b = 0; b < N; ++b)
    for (int d = 0; d < N; ++d)
      for (int x = 0; x < N; ++x)
        for (int z = 0; z < N; ++z) k(b * N + d, x * N + z) = r(x * N + b, z * N + d);
  auto k_inv = inverse_matrix(k);
  if (!k_inv) throw Error("internal: exchange system singular although R is skew-invertible");
  NCMatrix<F> rhs = exchange_rhs(r, r_inv);
  ExchangeTable<F> t;
  t.N = N;
  for (int a = 0; a < N; ++a)
    for (int c = 0; c < N; ++c)
      for (std::size_t xz = 0; xz < n2; ++xz) {
        const int x = static_cast<int>(xz / N), z = static_cast<int>(xz % N);
        NCPoly<F> val;
        for (int b = 0; b < N; ++b)
          for (int d = 0; d < N; ++d) {
            const F& kij = (*k_inv)(xz, b * N + d);
            if (is_zero(kij)) continue;
            val.axpy(kij, rhs(a * N + b, c * N + d));
          }
        char dl = static_cast<char>(Gen{GenKind::d, a, x}.code(N));
        char ml = static_cast<char>(Gen{GenKind::m, z, c}.code(N));
        t.entries.emplace(Word(std::string{dl, ml}), std::move(val));
      }
  return t;
}

// ---------------------------------------------------------------------------
// Relation sets and completion

/// Entries of R M_1 R M_1 - M_1 R M_1 R.
template <class F>
std::vector<NCPoly<F>> re_relations(const QMatrix<F>& r) {
  auto m1 = extend(gen_matrix<F>(GenKind::m, r.base()), 2);
  NCMatrix<F> lhs = mat_mul(r * m1 * r, m1);
  NCMatrix<F> rhs = mat_mul(m1 * r, m1) * r;
  NCMatrix<F> diff = lhs - rhs;
  return diff.entries();
}

/// Entries of R^-1 D_1 R^-1 D_1 - D_1 R^-1 D_1 R^-1.
template <class F>
std::vector<NCPoly<F>> dd_relations(const QMatrix<F>& r_inv) {
  auto d1 = extend(gen_matrix<F>(GenKind::d, r_inv.base()), 2);
  NCMatrix<F> lhs = mat_mul(r_inv * d1 * r_inv, d1);
  NCMatrix<F> rhs = mat_mul(d1 * r_inv, d1) * r_inv;
  NCMatrix<F> diff = lhs - rhs;
  return diff.entries();
}

/// Reduced row echelon form of a set of polynomials over the word basis,
/// largest word first. Each independent relation yields a rule
/// leading word -> polynomial in smaller words.
template <class F>
std::vector<std::pair<Word, NCPoly<F>>> echelon_rules(const std::vector<NCPoly<F>>& relations) {
  std::set<Word, std::greater<>> word_set;
  for (const auto& p : relations)
    for (const auto& [w, c] : p.terms()) word_set.insert(w);
  std::vector<Word> words(word_set.begin(), word_set.end());
  std::unordered_map<Word, std::size_t, WordHash> col;
  for (std::size_t i = 0; i < words.size(); ++i) col[words[i]] = i;

  std::vector<std::vector<F>> rows;
  for (const auto& p : relations) {
    if (p.is_zero()) continue;
    std::vector<F> row(words.size(), F(Rational(0)));
    for (const auto& [w, c] : p.terms()) row[col[w]] = c;
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> pivots;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < words.size() && rank < rows.size(); ++c) {
    std::size_t piv = rank;
    while (piv < rows.size() && vanishes(rows[piv][c])) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[rank], rows[piv]);
    F inv = inverse(rows[rank][c]);
    for (std::size_t j = c; j < words.size(); ++j)
      if (!vanishes(rows[rank][j])) rows[rank][j] = rows[rank][j] * inv;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == rank || vanishes(rows[i][c])) continue;
      F f = rows[i][c];
      for (std::size_t j = c; j < words.size(); ++j)
        if (!vanishes(rows[rank][j])) rows[i][j] = rows[i][j] - f * rows[rank][j];
    }
    pivots.push_back(c);
    ++rank;
  }
  std::vector<std::pair<Word, NCPoly<F>>> rules;
  for (std::size_t i = 0; i < rank; ++i) {
    NCPoly<F> rhs;
    for (std::size_t j = pivots[i] + 1; j < words.size(); ++j)
      if (!vanishes(rows[i][j])) rhs.add(words[j], F(-rows[i][j]));
    rules.emplace_back(words[pivots[i]], std::move(rhs));
  }
  return rules;
}

struct CompletionStep {
  int degree = 0;
  std::size_t overlaps = 0;
  std::size_t new_rules = 0;
};

/// Homogeneous rewriting system on one alphabet, complete up to a degree.
/// Completion proceeds degree by degree: the overlaps of degree n only
/// involve rules of degree < n, so resolving them and row-reducing the
/// nonzero S-polynomials yields a system complete through degree n.
template <class F>
class RewriteSystem {
 public:
  RewriteSystem() = default;
  RewriteSystem(GenKind kind, int N, const std::vector<NCPoly<F>>& relations, std::size_t rule_cap = 200000)
      : kind_(kind), N_(N), rule_cap_(rule_cap) {
    std::map<std::size_t, std::vector<NCPoly<F>>> by_degree;
    for (const auto& p : relations) {
      if (p.is_zero()) continue;
      std::size_t deg = p.terms().begin()->first.size();
      for (const auto& [w, c] : p.terms()) {
        if (w.size() != deg) throw ConfigError("relations must be homogeneous");
        if (w.size() < 2) throw ConfigError("relations must have degree at least 2");
        for (char ch : w.letters)
          if (is_d_letter(ch) != (kind == GenKind::d)) throw ConfigError("relation mixes alphabets");
      }
      by_degree[deg].push_back(p);
    }
    pending_ = std::move(by_degree);
    complete_to(2);
  }

  GenKind kind() const { return kind_; }
  int base() const { return N_; }
  int completed_degree() const { return degree_; }
  bool frozen() const { return frozen_; }
  const std::unordered_map<Word, NCPoly<F>, WordHash>& rules() const { return rules_; }
  const std::vector<CompletionStep>& log() const { return log_; }

  std::vector<Word> leading_words() const {
    std::vector<Word> v;
    for (const auto& [w, r] : rules_) v.push_back(w);
    std::sort(v.begin(), v.end());
    return v;
  }

  /// Resolves all overlaps of degree <= d.
  void complete_to(int d) {
    if (d <= degree_) return;
    if (frozen_) throw DegreeOverflow("rewriting system is frozen at degree " + std::to_string(degree_));
    for (int n = std::max(degree_ + 1, 2); n <= d; ++n) {
      std::vector<NCPoly<F>> spolys;
      if (auto it = pending_.find(n); it != pending_.end()) {
        for (const auto& p : it->second) {
          auto r = reduce_unchecked(p);
          if (!r.is_zero()) spolys.push_back(std::move(r));
        }
      }
      CompletionStep step;
      step.degree = n;
      for (const auto& [l1, r1] : rules_)
        for (const auto& [l2, r2] : rules_) {
          const std::size_t a = l1.size(), b = l2.size();
          for (std::size_t s = 1; s < std::min(a, b); ++s) {
            if (a + b - s != static_cast<std::size_t>(n)) continue;
            if (l1.letters.compare(a - s, s, l2.letters, 0, s) != 0) continue;
            ++step.overlaps;
            Word tail(l2.letters.substr(s));
            Word head(l1.letters.substr(0, a - s));
            NCPoly<F> left, right;
            for (const auto& [w, c] : r1.terms()) left.add(w + tail, c);
            for (const auto& [w, c] : r2.terms()) right.add(head + w, c);
            NCPoly<F> sp = reduce_unchecked(left) - reduce_unchecked(right);
            if (!sp.is_zero()) spolys.push_back(std::move(sp));
          }
        }
      auto fresh = echelon_rules(spolys);
      step.new_rules = fresh.size();
      for (auto& [lead, rhs] : fresh) {
        lead_lengths_.insert(lead.size());
        rules_.emplace(std::move(lead), std::move(rhs));
      }
      if (rules_.size() > rule_cap_) {
        throw ResourceCapError("rule count " + std::to_string(rules_.size()) + " exceeds cap " +
                               std::to_string(rule_cap_) + " at degree " + std::to_string(n));
      }
      cache_.clear();
      degree_ = n;
      log_.push_back(step);
    }
  }

  /// Canonical form of a word of degree <= completed_degree().
  const NCPoly<F>& normal_form(const Word& w) const {
    if (static_cast<int>(w.size()) > degree_) {
      throw DegreeOverflow("word of degree " + std::to_string(w.size()) + " exceeds completion degree " +
                           std::to_string(degree_));
    }
    return nf(w);
  }

  NCPoly<F> reduce(const NCPoly<F>& x) const {
    NCPoly<F> r;
    for (const auto& [w, c] : x.terms()) r.axpy(c, normal_form(w));
    return r;
  }

  bool irreducible(const Word& w) const { return !find_redex(w).has_value(); }

  /// Positions and leading words of every rule occurrence in w.
  std::vector<std::pair<std::size_t, Word>> redexes(const Word& w) const {
    std::vector<std::pair<std::size_t, Word>> out;
    for (std::size_t pos = 0; pos < w.size(); ++pos)
      for (std::size_t len : lead_lengths_) {
        if (pos + len > w.size()) continue;
        Word sub(w.letters.substr(pos, len));
        if (rules_.count(sub)) out.emplace_back(pos, std::move(sub));
      }
    return out;
  }

  const NCPoly<F>& rhs(const Word& lead) const { return rules_.at(lead); }

  /// Number of irreducible words of exactly the given degree.
  std::size_t count_irreducible(int degree) const {
    std::vector<char> alphabet;
    for (int i = 0; i < N_ * N_; ++i)
      alphabet.push_back(static_cast<char>((kind_ == GenKind::d ? kDOffset : 0) + i));
    std::vector<std::string> frontier{""};
    for (int d = 0; d < degree; ++d) {
      std::vector<std::string> next;
      for (const auto& s : frontier)
        for (char c : alphabet) {
          std::string t = s + c;
          if (!find_redex(Word(t))) next.push_back(std::move(t));
        }
      frontier = std::move(next);
    }
    return frontier.size();
  }

  template <class G, class Fn>
  RewriteSystem<G> map_coefficients(Fn&& fn) const {
    RewriteSystem<G> s;
    s.kind_ = kind_;
    s.N_ = N_;
    s.degree_ = degree_;
    s.rule_cap_ = rule_cap_;
    s.frozen_ = true;
    s.lead_lengths_ = lead_lengths_;
    s.log_ = log_;
    for (const auto& [w, r] : rules_) s.rules_.emplace(w, r.template map_coefficients<G>(fn));
    return s;
  }

  /// Every coefficient appearing in the rules.
  template <class Fn>
  void for_each_coefficient(Fn&& fn) const {
    for (const auto& [w, r] : rules_)
      for (const auto& [u, c] : r.terms()) fn(c);
  }

 private:
  template <class G>
  friend class RewriteSystem;

  std::optional<std::pair<std::size_t, Word>> find_redex(const Word& w) const {
    for (std::size_t pos = 0; pos < w.size(); ++pos)
      for (std::size_t len : lead_lengths_) {
        if (pos + len > w.size()) continue;
        Word sub(w.letters.substr(pos, len));
        if (rules_.count(sub)) return std::make_pair(pos, std::move(sub));
      }
    return std::nullopt;
  }

  NCPoly<F> reduce_unchecked(const NCPoly<F>& x) const {
    NCPoly<F> r;
    for (const auto& [w, c] : x.terms()) r.axpy(c, nf(w));
    return r;
  }

  const NCPoly<F>& nf(const Word& w) const {
    if (auto it = cache_.find(w); it != cache_.end()) return it->second;
    NCPoly<F> result;
    auto redex = find_redex(w);
    if (!redex) {
      result.add(w, F(Rational(1)));
    } else {
      const auto& [pos, lead] = *redex;
      const std::string prefix = w.letters.substr(0, pos);
      const std::string suffix = w.letters.substr(pos + lead.size());
      for (const auto& [t, c] : rules_.at(lead).terms()) {
        result.axpy(c, nf(Word(prefix + t.letters + suffix)));
      }
    }
    return cache_.emplace(w, std::move(result)).first->second;
  }

  GenKind kind_ = GenKind::m;
  int N_ = 1;
  int degree_ = 1;
  std::size_t rule_cap_ = 200000;
  bool frozen_ = false;
  std::unordered_map<Word, NCPoly<F>, WordHash> rules_;
  std::set<std::size_t> lead_lengths_;
  std::map<std::size_t, std::vector<NCPoly<F>>> pending_;
  std::vector<CompletionStep> log_;
  mutable std::unordered_map<Word, NCPoly<F>, WordHash> cache_;
};

template <class F>
RewriteSystem<F> derive_re_rules(const QMatrix<F>& r, std::size_t rule_cap = 200000) {
  return RewriteSystem<F>(GenKind::m, r.base(), re_relations(r), rule_cap);
}

template <class F>
RewriteSystem<F> derive_dd_rules(const QMatrix<F>& r_inv, std::size_t rule_cap = 200000) {
  return RewriteSystem<F>(GenKind::d, r_inv.base(), dd_relations(r_inv), rule_cap);
}

/// Completes a copy of `rules` through degree d.
template <class F>
RewriteSystem<F> complete(RewriteSystem<F> rules, int d) {
  if (d < 2) throw ConfigError("completion degree must be at least 2");
  rules.complete_to(d);
  return rules;
}

// ---------------------------------------------------------------------------
// The double

struct RewriteLimits {
  int max_degree = 8;
  std::size_t rule_cap = 200000;
};

enum class RedexStrategy { leftmost, rightmost, random };

template <class F>
class QuantumDouble {
 public:
  QuantumDouble() = default;
  QuantumDouble(ExchangeTable<F> table, RewriteSystem<F> m_sys, RewriteSystem<F> d_sys, RewriteLimits limits = {})
      : N_(table.N), table_(std::move(table)), m_sys_(std::move(m_sys)), d_sys_(std::move(d_sys)), limits_(limits) {}

  int base() const { return N_; }
  const ExchangeTable<F>& table() const { return table_; }
  const RewriteSystem<F>& m_system() const { return m_sys_; }
  const RewriteSystem<F>& d_system() const { return d_sys_; }
  const RewriteLimits& limits() const { return limits_; }

  /// Completes both systems through degree d (subject to the degree cap).
  void ensure_degree(int d) const {
    if (d > limits_.max_degree) {
      throw DegreeOverflow("degree " + std::to_string(d) + " exceeds cap " + std::to_string(limits_.max_degree));
    }
    if (m_sys_.completed_degree() < d) m_sys_.complete_to(d);
    if (d_sys_.completed_degree() < d) d_sys_.complete_to(d);
  }

  /// Free normal ordering: every d letter moved to the right of every m letter
  /// using the exchange table only.
  NCPoly<F> normal_order(const NCPoly<F>& x) const {
    NCPoly<F> out;
    for (const auto& [w, c] : x.terms()) out.axpy(c, normal_order_word(w));
    return out;
  }

  /// Canonical representative: normal order, then reduce the m-segment and
  /// the d-segment of every word in their own systems.
  NCPoly<F> reduce(const NCPoly<F>& x) const {
    auto [dm, dd] = nc_degree(x);
    ensure_degree(static_cast<int>(std::max<std::size_t>({dm, dd, 2})));
    return reduce_segments(normal_order(x));
  }

  /// Segment reduction of an already normal-ordered polynomial.
  NCPoly<F> reduce_segments(const NCPoly<F>& x) const {
    NCPoly<F> out;
    for (const auto& [w, c] : x.terms()) {
      auto [mw, dw] = split(w);
      tensor_axpy(out, c, m_nf(mw), d_nf(dw));
    }
    return out;
  }

  /// Product of two reduced elements, reduced.
  NCPoly<F> mul(const NCPoly<F>& a, const NCPoly<F>& b) const {
    NCPoly<F> out;
    for (const auto& [wa, ca] : a.terms()) {
      auto [ma, da] = split(wa);
      for (const auto& [wb, cb] : b.terms()) {
        auto [mb, db] = split(wb);
        F cab = ca * cb;
        if (da.empty()) {
          tensor_axpy(out, cab, m_nf(ma + mb), d_nf(db));
        } else if (mb.empty()) {
          tensor_axpy(out, cab, m_nf(ma), d_nf(da + db));
        } else {
          for (const auto& [x, e] : swap_reduced(da, mb).terms()) {
            auto [xm, xd] = split(x);
            tensor_axpy(out, F(cab * e), m_nf(ma + xm), d_nf(xd + db));
          }
        }
      }
    }
    return out;
  }

  /// a |> b: normal order a*b, keep the words free of d letters (counit on
  /// the derivative factor), reduce in M(R).
  NCPoly<F> apply_derivative(const NCPoly<F>& a, const NCPoly<F>& b) const {
    for (const auto& [w, c] : a.terms())
      if (w.m_degree()) throw ConfigError("apply_derivative: left factor must be in the derivative algebra");
    for (const auto& [w, c] : b.terms())
      if (w.d_degree()) throw ConfigError("apply_derivative: right factor must be in the RE algebra");
    NCPoly<F> prod = normal_order(a * b);
    NCPoly<F> kept;
    for (const auto& [w, c] : prod.terms())
      if (w.d_degree() == 0) kept.add(w, c);
    auto [dm, dd] = nc_degree(kept);
    ensure_degree(static_cast<int>(std::max<std::size_t>(dm, 2)));
    return m_sys_.reduce(kept);
  }

  /// Normal ordering by single redex steps chosen by `strategy`; with
  /// `interleave` the random strategy also fires rules of either defining
  /// ideal in the middle of words. The result is segment-reduced.
  NCPoly<F> reduce_by_steps(const NCPoly<F>& x, RedexStrategy strategy, std::uint32_t seed = 0,
                            bool interleave = false) const {
    auto [dm, dd] = nc_degree(x);
    ensure_degree(static_cast<int>(std::max<std::size_t>({dm, dd, 2})));
    std::mt19937 rng(seed);
    NCPoly<F> cur = x;
    for (;;) {
      std::vector<Word> pending;
      for (const auto& [w, c] : cur.terms())
        if (!w.is_normal_ordered()) pending.push_back(w);
      if (pending.empty()) break;
      std::sort(pending.begin(), pending.end());
      const Word w = strategy == RedexStrategy::random
                         ? pending[std::uniform_int_distribution<std::size_t>(0, pending.size() - 1)(rng)]
                         : pending.back();
      F c = cur.coefficient(w);
      cur.add(w, F(-c));
      cur.axpy(c, step(w, strategy, rng, interleave));
    }
    return reduce_segments(cur);
  }

  template <class G, class Fn>
  QuantumDouble<G> map_coefficients(Fn&& fn) const {
    return QuantumDouble<G>(table_.template map_coefficients<G>(fn), m_sys_.template map_coefficients<G>(fn),
                            d_sys_.template map_coefficients<G>(fn), limits_);
  }

  static std::pair<Word, Word> split(const Word& w) {
    auto it = std::find_if(w.letters.begin(), w.letters.end(), is_d_letter);
    std::size_t cut = static_cast<std::size_t>(it - w.letters.begin());
    return {Word(w.letters.substr(0, cut)), Word(w.letters.substr(cut))};
  }

 private:
  const NCPoly<F>& m_nf(const Word& w) const {
    if (static_cast<int>(w.size()) > m_sys_.completed_degree()) ensure_degree(static_cast<int>(w.size()));
    return m_sys_.normal_form(w);
  }
  const NCPoly<F>& d_nf(const Word& w) const {
    if (static_cast<int>(w.size()) > d_sys_.completed_degree()) ensure_degree(static_cast<int>(w.size()));
    return d_sys_.normal_form(w);
  }

  static void tensor_axpy(NCPoly<F>& out, const F& c, const NCPoly<F>& mp, const NCPoly<F>& dp) {
    for (const auto& [mw, a] : mp.terms()) {
      F ca = c * a;
      for (const auto& [dw, b] : dp.terms()) out.add(mw + dw, F(ca * b));
    }
  }

  static std::string key(const Word& dw, const Word& mw) {
    std::string k = dw.letters;
    k.push_back('\xff');
    k += mw.letters;
    return k;
  }

  /// Free normal order of dw * mw (dw a d-word, mw an m-word).
  const NCPoly<F>& swap_free(const Word& dw, const Word& mw) const {
    std::string k = key(dw, mw);
    if (auto it = free_cache_.find(k); it != free_cache_.end()) return it->second;
    NCPoly<F> result;
    if (dw.empty() || mw.empty()) {
      result.add(mw + dw, F(Rational(1)));
    } else {
      const char delta = dw.letters.back();
      const char mu = mw.letters.front();
      const Word d_rest(dw.letters.substr(0, dw.size() - 1));
      const Word m_rest(mw.letters.substr(1));
      for (const auto& [t, c] : table_.lookup(delta, mu).terms()) {
        if (t.empty()) {
          result.axpy(c, swap_free(d_rest, m_rest));
          continue;
        }
        const Word mu_t(t.letters.substr(0, 1));
        const Word delta_t(t.letters.substr(1));
        NCPoly<F> first = swap_free(d_rest, mu_t);
        for (const auto& [x, e] : first.terms()) {
          auto [xm, xd] = split(x);
          NCPoly<F> second = swap_free(xd + delta_t, m_rest);
          F ce = c * e;
          for (const auto& [y, f] : second.terms()) result.add(xm + y, F(ce * f));
        }
      }
    }
    return free_cache_.emplace(std::move(k), std::move(result)).first->second;
  }

  /// Reduced normal order of dw * mw for irreducible segments.
  const NCPoly<F>& swap_reduced(const Word& dw, const Word& mw) const {
    std::string k = key(dw, mw);
    if (auto it = red_cache_.find(k); it != red_cache_.end()) return it->second;
    NCPoly<F> result;
    if (dw.empty() || mw.empty()) {
      result.add(mw + dw, F(Rational(1)));
    } else {
      const char delta = dw.letters.back();
      const char mu = mw.letters.front();
      const Word d_rest(dw.letters.substr(0, dw.size() - 1));
      const Word m_rest(mw.letters.substr(1));
      for (const auto& [t, c] : table_.lookup(delta, mu).terms()) {
        if (t.empty()) {
          result.axpy(c, swap_reduced(d_rest, m_rest));
          continue;
        }
        const Word mu_t(t.letters.substr(0, 1));
        const Word delta_t(t.letters.substr(1));
        NCPoly<F> first = swap_reduced(d_rest, mu_t);
        for (const auto& [x, e] : first.terms()) {
          auto [xm, xd] = split(x);
          F ce = c * e;
          NCPoly<F> zs = d_nf(xd + delta_t);
          for (const auto& [z, g] : zs.terms()) {
            NCPoly<F> second = swap_reduced(z, m_rest);
            F ceg = ce * g;
            for (const auto& [y, f] : second.terms()) {
              auto [ym, yd] = split(y);
              for (const auto& [mword, h] : m_nf(xm + ym).terms()) result.add(mword + yd, F(ceg * f * h));
            }
          }
        }
      }
    }
    return red_cache_.emplace(std::move(k), std::move(result)).first->second;
  }

  NCPoly<F> normal_order_word(const Word& w) const {
    // Left to right: the accumulated prefix is normal-ordered; an m letter is
    // pushed through the d-segment of every term.
    NCPoly<F> acc = NCPoly<F>::constant(F(Rational(1)));
    for (char ch : w.letters) {
      NCPoly<F> next;
      const std::string letter(1, ch);
      for (const auto& [x, c] : acc.terms()) {
        if (is_d_letter(ch)) {
          next.add(Word(x.letters + letter), c);
          continue;
        }
        auto [xm, xd] = split(x);
        for (const auto& [y, e] : swap_free(xd, Word(letter)).terms()) next.add(xm + y, F(c * e));
      }
      acc = std::move(next);
    }
    return acc;
  }

  /// One rewriting step on w.
  NCPoly<F> step(const Word& w, RedexStrategy strategy, std::mt19937& rng, bool interleave) const {
    struct Redex {
      std::size_t pos;
      int kind;  // 0 exchange, 1 m-rule, 2 d-rule
      Word lead;
    };
    std::vector<Redex> options;
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
      if (is_d_letter(w.letters[i]) && !is_d_letter(w.letters[i + 1])) options.push_back({i, 0, Word()});
    if (interleave && strategy == RedexStrategy::random) {
      for (auto& [pos, lead] : m_sys_.redexes(w)) options.push_back({pos, 1, lead});
      for (auto& [pos, lead] : d_sys_.redexes(w)) options.push_back({pos, 2, lead});
    }
    const Redex* chosen = &options.front();
    if (strategy == RedexStrategy::rightmost) {
      chosen = &options.back();
    } else if (strategy == RedexStrategy::random) {
      chosen = &options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
    }
    NCPoly<F> out;
    const std::size_t len = chosen->kind == 0 ? 2 : chosen->lead.size();
    const std::string prefix = w.letters.substr(0, chosen->pos);
    const std::string suffix = w.letters.substr(chosen->pos + len);
    const NCPoly<F>& repl = chosen->kind == 0 ? table_.lookup(w.letters[chosen->pos], w.letters[chosen->pos + 1])
                            : chosen->kind == 1 ? m_sys_.rhs(chosen->lead)
                                                : d_sys_.rhs(chosen->lead);
    for (const auto& [t, c] : repl.terms()) out.add(Word(prefix + t.letters + suffix), c);
    return out;
  }

  int N_ = 1;
  ExchangeTable<F> table_;
  mutable RewriteSystem<F> m_sys_;
  mutable RewriteSystem<F> d_sys_;
  RewriteLimits limits_;
  mutable std::unordered_map<std::string, NCPoly<F>> free_cache_;
  mutable std::unordered_map<std::string, NCPoly<F>> red_cache_;
};

/// Builds the double for a validated Hecke symmetry, complete through
/// `degree`.
template <class F>
QuantumDouble<F> build_double(const HeckeSymmetry<F>& h, int degree = 2, RewriteLimits limits = {}) {
  auto table = derive_exchange(h.r, h.r_inv);
  auto m_sys = derive_re_rules(h.r, limits.rule_cap);
  auto d_sys = derive_dd_rules(h.r_inv, limits.rule_cap);
  QuantumDouble<F> qd(std::move(table), std::move(m_sys), std::move(d_sys), limits);
  qd.ensure_degree(std::max(degree, 2));
  return qd;
}

/// Reassembles D_1 R M_1 through the table and compares it with
/// R M_1 R^-1 D_1 R^-1 + I entrywise.
template <class F>
bool exchange_round_trip(const QuantumDouble<F>& qd, const QMatrix<F>& r, const QMatrix<F>& r_inv) {
  const int N = r.base();
  auto m1 = extend(gen_matrix<F>(GenKind::m, N), 2);
  auto d1 = extend(gen_matrix<F>(GenKind::d, N), 2);
  NCMatrix<F> lhs = mat_mul(d1 * r, m1).transform([&](const NCPoly<F>& p) { return qd.normal_order(p); });
  NCMatrix<F> rhs = exchange_rhs(r, r_inv);
  for (std::size_t i = 0; i < lhs.dim(); ++i)
    for (std::size_t j = 0; j < lhs.dim(); ++j)
      if (!(lhs(i, j) == rhs(i, j))) return false;
  return true;
}

/// Leading words of the degree-2 rules agree at the sample point and over
/// Q(q); otherwise the sample point degenerates the basis.
inline void check_specialization(const QMatrix<RatFunc>& r_sym, const QMatrix<RatFunc>& r_inv_sym,
                                 const RewriteSystem<Rational>& m_fixed, const RewriteSystem<Rational>& d_fixed,
                                 const Rational& q0) {
  auto leads_at = [](const auto& sys, int degree) {
    std::vector<Word> v;
    for (const auto& w : sys.leading_words())
      if (static_cast<int>(w.size()) <= degree) v.push_back(w);
    return v;
  };
  auto m_sym = derive_re_rules(r_sym);
  auto d_sym = derive_dd_rules(r_inv_sym);
  if (leads_at(m_sym, 2) != leads_at(m_fixed, 2) || leads_at(d_sym, 2) != leads_at(d_fixed, 2)) {
    throw BadSpecialization("q = " + q0.get_str() + " degenerates the quadratic relations; resample q");
  }
}

}  // namespace recap
