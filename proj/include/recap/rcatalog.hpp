#pragma once

// Built-in Hecke symmetries and the R-matrix file loader. Every entry is
// validated on construction: braid relation, Hecke condition,
// skew-invertibility and finite rank.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "recap/qlinalg.hpp"

namespace recap {

struct ValidationRecord {
  bool braid = false;
  bool hecke = false;
  bool skew_invertible = false;
  RankReport rank;
};

template <class F>
struct HeckeSymmetry {
  std::string name;
  int N = 1;
  QMatrix<F> r;
  QMatrix<F> r_inv;
  QConfig q_config;
  SkewInverseData<F> skew;
  ValidationRecord validation;

  int rank() const { return validation.rank.m; }
};

/// Runs the validation suite, throwing ValidationError naming the first
/// failing check.
template <class F>
HeckeSymmetry<F> validate_symmetry(std::string name, QMatrix<F> r, const QField<F>& qf,
                                   QConfig config, int rank_cap = 6) {
  if (r.legs() != 2) throw ConfigError("R must act on two legs");
  HeckeSymmetry<F> h;
  h.name = std::move(name);
  h.N = r.base();
  h.q_config = std::move(config);
  h.validation.braid = check_braid(r);
  if (!h.validation.braid) throw ValidationError("braid", "R12 R23 R12 != R23 R12 R23");
  h.validation.hecke = check_hecke(r, qf);
  if (!h.validation.hecke) throw ValidationError("hecke", "(qI - R)(q^-1 I + R) != 0");
  solve_skew_inverse(r);  // throws when the partial transpose is singular
  h.validation.rank = rank_of(r, qf, rank_cap);
  h.skew = skew_inverse(r, qf, h.validation.rank.m);
  h.validation.skew_invertible = true;
  h.r_inv = r_inverse(r, qf);
  h.r = std::move(r);
  return h;
}

/// Unvalidated Drinfeld-Jimbo matrix for U_q(sl_N).
template <class F>
QMatrix<F> dj_matrix(int N, const QField<F>& qf) {
  if (N < 1) throw ConfigError("N must be at least 1");
  QMatrix<F> r(N, 2);
  F diff = qf.q() - qf.pow(-1);
  for (int i = 0; i < N; ++i) {
    r(i * N + i, i * N + i) = qf.q();
    for (int j = 0; j < N; ++j) {
      if (i == j) continue;
      r(j * N + i, i * N + j) = F(Rational(1));
      if (i < j) r(i * N + j, i * N + j) = diff;
    }
  }
  return r;
}

template <class F>
HeckeSymmetry<F> dj(int N, const QField<F>& qf, QConfig config) {
  return validate_symmetry("dj(" + std::to_string(N) + ")", dj_matrix(N, qf), qf, std::move(config));
}

inline HeckeSymmetry<Rational> dj_fixed(int N, const Rational& q0) {
  return dj(N, fixed_field(q0), QConfig::fixed(q0));
}
inline HeckeSymmetry<RatFunc> dj_symbolic(int N) { return dj(N, symbolic_field(), QConfig::symbolic()); }

/// The involutive flip P at q = 1.
inline HeckeSymmetry<Rational> flip(int N) {
  if (N < 1) throw ConfigError("N must be at least 1");
  return validate_symmetry("flip(" + std::to_string(N) + ")", QMatrix<Rational>::flip(N),
                           fixed_field(Rational(1)), QConfig::fixed(Rational(1), true));
}

// ---------------------------------------------------------------------------
// File format (JSON):
//   {"N": 2, "q": "symbolic" | "a/b",
//    "entries": [{"i":1,"j":1,"k":1,"l":1,"value":"q"}, ...]}
// meaning R^{ij}_{kl} = value, 1-based, row (i-1)N+j, column (k-1)N+l.

struct RMatrixEntry {
  int i, j, k, l;
  RatFunc value;
};

struct RMatrixFile {
  int N = 1;
  QConfig q;
  std::vector<RMatrixEntry> entries;

  template <class F, class Conv>
  QMatrix<F> matrix(Conv&& conv) const {
    QMatrix<F> r(N, 2);
    for (const auto& e : entries) r((e.i - 1) * N + (e.j - 1), (e.k - 1) * N + (e.l - 1)) = conv(e.value);
    return r;
  }
};

inline RMatrixFile parse_rmatrix(const std::string& text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed R-matrix file: ") + e.what(), e.byte);
  }
  RMatrixFile f;
  try {
    f.N = doc.at("N").get<int>();
    if (f.N < 1) throw ParseError("N must be positive", 0);
    std::string q = doc.at("q").get<std::string>();
    if (q == "symbolic") {
      f.q = QConfig::symbolic();
    } else {
      f.q.mode = QConfig::Mode::fixed;
      f.q.q_value = parse_rational(q);
      f.q.involutive = (*f.q.q_value == 1);
      f.q.validate();
    }
    std::vector<std::vector<bool>> seen(f.N * f.N, std::vector<bool>(f.N * f.N, false));
    for (const auto& e : doc.at("entries")) {
      RMatrixEntry en{e.at("i").get<int>(), e.at("j").get<int>(), e.at("k").get<int>(), e.at("l").get<int>(),
                      parse_ratfunc(e.at("value").get<std::string>())};
      for (int idx : {en.i, en.j, en.k, en.l})
        if (idx < 1 || idx > f.N) throw ParseError("entry index out of range", 0);
      const int row = (en.i - 1) * f.N + en.j - 1, col = (en.k - 1) * f.N + en.l - 1;
      if (seen[row][col]) throw ParseError("duplicate entry", 0);
      seen[row][col] = true;
      f.entries.push_back(std::move(en));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid R-matrix file: ") + e.what(), 0);
  }
  return f;
}

inline RMatrixFile read_rmatrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open R-matrix file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_rmatrix(ss.str());
}

template <class F>
std::string serialize_rmatrix(const QMatrix<F>& r, const QConfig& q) {
  using nlohmann::json;
  const int N = r.base();
  json doc;
  doc["N"] = N;
  doc["q"] = q.str();
  doc["entries"] = json::array();
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k)
        for (int l = 0; l < N; ++l) {
          const F& v = r(i * N + j, k * N + l);
          if (is_zero(v)) continue;
          doc["entries"].push_back({{"i", i + 1}, {"j", j + 1}, {"k", k + 1}, {"l", l + 1}, {"value", to_string(v)}});
        }
  return doc.dump(2);
}

/// Loads a file whose q is symbolic, validating over Q(q).
inline HeckeSymmetry<RatFunc> load_symbolic(const RMatrixFile& f, const std::string& name) {
  if (f.q.mode != QConfig::Mode::symbolic) throw ConfigError("file fixes q = " + f.q.str());
  return validate_symmetry(name, f.matrix<RatFunc>([](const RatFunc& v) { return v; }), symbolic_field(), f.q);
}

/// Loads a file at a fixed q: either the file's own value or, for a
/// symbolic file, the supplied sample point.
inline HeckeSymmetry<Rational> load_fixed(const RMatrixFile& f, const std::string& name,
                                          std::optional<Rational> q0 = std::nullopt) {
  QConfig cfg = f.q;
  if (cfg.mode == QConfig::Mode::symbolic) {
    if (!q0) throw ConfigError("symbolic R-matrix file needs a sample value of q");
    cfg = QConfig::fixed(*q0, *q0 == 1);
  } else if (q0 && *q0 != *cfg.q_value) {
    throw ConfigError("file fixes q = " + cfg.q_value->get_str());
  }
  const Rational qv = *cfg.q_value;
  return validate_symmetry(name, f.matrix<Rational>([&](const RatFunc& v) { return eval_at(v, qv); }),
                           fixed_field(qv), cfg);
}

inline HeckeSymmetry<Rational> load(const std::string& path, std::optional<Rational> q0 = std::nullopt) {
  return load_fixed(read_rmatrix_file(path), "file:" + path, std::move(q0));
}

}  // namespace recap
