#pragma once

// Front end: run configuration, R-matrix selection, suites and exit codes.

#include <cstdlib>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "recap/capelli.hpp"

namespace recap {

enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitConfig = 2, kExitCap = 3 };

struct RunConfig {
  std::string command = "verify";  ///< verify | validate | suite
  std::string rmatrix = "dj";      ///< dj | flip | file:<path>
  int N = 2;
  std::string identity = "th";
  int k = 2;
  int p = 1;
  std::string alpha = "q";
  /// Sample points, or {"symbolic"}. Empty picks the source's default.
  std::vector<std::string> q;
  int max_degree = 8;
  std::size_t rule_cap = 200000;
  int threads = 1;
  std::string format = "text";  ///< text | json
  bool rigor = false;
  bool lazy = false;
  std::string suite;

  /// RECAP_MAX_DEGREE, RECAP_RULE_CAP and RECAP_THREADS override the flags.
  void apply_env() {
    auto read = [](const char* name) -> std::optional<long> {
      const char* v = std::getenv(name);
      if (!v || !*v) return std::nullopt;
      char* end = nullptr;
      long x = std::strtol(v, &end, 10);
      if (*end) throw ConfigError(std::string(name) + " is not an integer");
      return x;
    };
    if (auto v = read("RECAP_MAX_DEGREE")) max_degree = static_cast<int>(*v);
    if (auto v = read("RECAP_RULE_CAP")) rule_cap = static_cast<std::size_t>(*v);
    if (auto v = read("RECAP_THREADS")) threads = static_cast<int>(*v);
  }

  void validate() const {
    if (command != "verify" && command != "validate" && command != "suite") {
      throw ConfigError("unknown command '" + command + "'");
    }
    if (rmatrix != "dj" && rmatrix != "flip" && rmatrix.rfind("file:", 0) != 0) {
      throw ConfigError("--rmatrix must be dj, flip or file:<path>");
    }
    if (N < 1 || N > 3) throw ConfigError("N must be between 1 and 3");
    if (format != "text" && format != "json") throw ConfigError("--format must be text or json");
    if (max_degree < 2) throw ConfigError("max degree must be at least 2");
    if (rule_cap < 1) throw ConfigError("rule cap must be positive");
    if (threads < 1) throw ConfigError("thread count must be positive");
    if (command == "verify") parse_identity(identity);
    if (command == "suite" && suite != "smoke" && suite != "full") {
      throw ConfigError("unknown suite '" + suite + "'");
    }
    if (rigor && !q.empty() && !(q.size() == 1 && q[0] == "symbolic")) {
      throw ConfigError("rigor mode chooses its own q points");
    }
  }

  bool symbolic() const { return q.size() == 1 && q[0] == "symbolic"; }

  IdentitySpec spec() const {
    IdentitySpec s;
    s.id = parse_identity(identity);
    s.k = k;
    s.p = p;
    s.alpha = alpha;
    s.lazy = lazy;
    return s;
  }

  RewriteLimits limits() const { return {max_degree, rule_cap}; }
};

// ---------------------------------------------------------------------------
// R-matrix sources

class Source {
 public:
  explicit Source(const RunConfig& cfg) : cfg_(cfg) {
    if (cfg.rmatrix.rfind("file:", 0) == 0) file_ = read_rmatrix_file(cfg.rmatrix.substr(5));
  }

  /// Default sample points when none are given.
  std::vector<std::string> default_points() const {
    if (cfg_.rmatrix == "flip") return {"1"};
    if (file_ && file_->q.mode == QConfig::Mode::fixed) return {file_->q.q_value->get_str()};
    return {"3/5"};
  }

  bool has_symbolic() const { return cfg_.rmatrix == "dj" || (file_ && file_->q.mode == QConfig::Mode::symbolic); }

  HeckeSymmetry<Rational> fixed(const Rational& q0) const {
    if (cfg_.rmatrix == "dj") return dj(cfg_.N, fixed_field(q0), QConfig::fixed(q0));
    if (cfg_.rmatrix == "flip") {
      if (q0 != 1) throw ConfigError("flip is only defined at q = 1");
      return flip(cfg_.N);
    }
    return load_fixed(*file_, cfg_.rmatrix, q0);
  }

  HeckeSymmetry<RatFunc> symbolic() const {
    if (cfg_.rmatrix == "dj") return dj_symbolic(cfg_.N);
    if (cfg_.rmatrix == "flip") throw ConfigError("flip has no symbolic form");
    return load_symbolic(*file_, cfg_.rmatrix);
  }

  /// Degree-2 leading words over Q(q), computed once.
  void check_specialization(const Context<Rational>& ctx, const Rational& q0) {
    if (!has_symbolic()) return;
    if (!sym_) sym_ = std::make_unique<HeckeSymmetry<RatFunc>>(symbolic());
    recap::check_specialization(sym_->r, sym_->r_inv, ctx.qd.m_system(), ctx.qd.d_system(), q0);
  }

 private:
  const RunConfig& cfg_;
  std::optional<RMatrixFile> file_;
  std::unique_ptr<HeckeSymmetry<RatFunc>> sym_;
};

inline void emit(const VerificationReport& rep, const RunConfig& cfg, std::ostream& out) {
  if (cfg.format == "json") {
    out << rep.to_json().dump() << "\n";
  } else {
    out << rep.to_text();
  }
  out.flush();
}

/// Verifies one identity at every requested point (or symbolically, or in
/// rigor mode) and merges the per-point results.
inline VerificationReport run_verify(const RunConfig& cfg, Source& src) {
  IdentitySpec spec = cfg.spec();
  const int kmax = std::max(spec.k, 1);
  if (cfg.rigor) {
    auto h = src.symbolic();
    auto ctx = make_context(h, symbolic_field(), kmax, cfg.limits());
    return verify_rigorous(ctx, spec, cfg.max_degree);
  }
  if (cfg.symbolic()) {
    auto h = src.symbolic();
    auto ctx = make_context(h, symbolic_field(), kmax, cfg.limits());
    return verify(ctx, spec, cfg.max_degree);
  }
  std::vector<std::string> points = cfg.q.empty() ? src.default_points() : cfg.q;
  VerificationReport merged;
  bool first = true;
  for (const auto& text : points) {
    Rational q0 = parse_rational(text);
    auto h = src.fixed(q0);
    auto ctx = make_context(h, fixed_field(q0), kmax, cfg.limits());
    if (spec.id != IdentityId::classical && spec.id != IdentityId::consum) src.check_specialization(ctx, q0);
    VerificationReport rep = verify(ctx, spec, cfg.max_degree);
    if (first) {
      merged = rep;
      first = false;
    } else {
      merged.q_points.push_back(q0.get_str());
      for (auto& t : rep.timings_ms) merged.timings_ms.emplace_back("q=" + q0.get_str() + ":" + t.first, t.second);
      if (!rep.pass && merged.pass) {
        merged.residual_terms = rep.residual_terms;
        merged.residual_sample = rep.residual_sample;
        merged.checks = rep.checks;
        merged.error = rep.error;
      }
    }
    merged.pass = merged.pass && rep.pass;
  }
  return merged;
}

/// Structural validation of the selected R-matrix.
inline VerificationReport run_validate(const RunConfig& cfg, Source& src) {
  VerificationReport rep;
  rep.identity = "validate";
  rep.rmatrix = cfg.rmatrix;
  rep.params["N"] = cfg.N;
  PhaseTimer timer(rep);
  auto fill = [&](const auto& h) {
    rep.add_check("braid", h.validation.braid);
    rep.add_check("hecke", h.validation.hecke);
    rep.add_check("skew-invertible", h.validation.skew_invertible);
    std::string dims;
    for (auto d : h.validation.rank.dims) dims += (dims.empty() ? "" : ",") + std::to_string(d);
    rep.add_check("finite rank", h.rank() > 0, "m = " + std::to_string(h.rank()) + ", dims " + dims);
    rep.params["rank"] = h.rank();
    rep.rmatrix = h.name;
  };
  try {
    if (cfg.symbolic()) {
      rep.backend = "symbolic";
      rep.q_points = {"q"};
      fill(src.symbolic());
    } else {
      rep.backend = "fixed";
      for (const auto& text : cfg.q.empty() ? src.default_points() : cfg.q) {
        rep.q_points.push_back(text);
        fill(src.fixed(parse_rational(text)));
      }
    }
  } catch (const ValidationError& e) {
    rep.add_check(e.check, false, e.what());
  }
  timer.lap("validate");
  rep.finalize();
  return rep;
}

// ---------------------------------------------------------------------------
// Suites

struct SuiteEntry {
  RunConfig cfg;
  bool expect_pass = true;
};

inline std::vector<SuiteEntry> suite_entries(const std::string& name, const RunConfig& base) {
  std::vector<SuiteEntry> out;
  auto add = [&](std::string rmatrix, int N, std::string identity, int k = 2, int p = 1,
                 std::vector<std::string> q = {}, bool expect = true, std::string alpha = "q",
                 std::string command = "verify", bool rigor = false) {
    RunConfig c = base;
    c.command = std::move(command);
    c.rmatrix = std::move(rmatrix);
    c.N = N;
    c.identity = std::move(identity);
    c.k = k;
    c.p = p;
    c.q = std::move(q);
    c.alpha = std::move(alpha);
    c.rigor = rigor;
    out.push_back({c, expect});
  };
  const bool full = name == "full";
  for (int N = 1; N <= (full ? 3 : 2); ++N) add("dj", N, "", 2, 1, {}, true, "q", "validate");
  add("flip", 2, "", 2, 1, {}, true, "q", "validate");
  for (int k = 1; k <= 3; ++k) {
    add("dj", 1, "th", k);
    add("dj", 1, "th-s", k);
  }
  for (int k = 1; k <= 2; ++k) {
    add("dj", 2, "th", k);
    add("dj", 2, "th-s", k);
    add("flip", 2, "th", k);
    add("flip", 2, "th-s", k);
  }
  for (auto alpha : {"0", "1", "q^2"}) add("dj", 2, "shift-scan", 2, 1, {}, false, alpha);
  add("dj", 2, "cap-as", 2);
  add("dj", 2, "cap-s", 2);
  add("dj", 2, "cap1");
  add("dj", 2, "mre");
  add("dj", 2, "re-ideal");
  add("dj", 2, "h-copy", 2, 1);
  add("dj", 2, "exchange-general", 2, 1);
  add("dj", 2, "consum", 3);
  add("dj", 2, "classical");
  add("flip", 2, "classical");
  if (full) {
    add("dj", 2, "th", 2, 1, {"symbolic"});
    add("dj", 2, "exchange-general", 3, 1);
    add("dj", 2, "exchange-general", 3, 2);
    add("dj", 3, "th", 2);
    add("dj", 3, "th-s", 2);
    add("dj", 3, "mre");
    add("dj", 3, "re-ideal");
    add("dj", 3, "classical");
    for (int N = 1; N <= 3; ++N) add("dj", N, "consum", N + 1);
    add("dj", 2, "th", 2, 1, {}, true, "q", "verify", true);
    add("dj", 3, "th", 3);
    add("dj", 3, "th-s", 3);
  }
  return out;
}

// ---------------------------------------------------------------------------

inline int run_single(const RunConfig& cfg, std::ostream& out, VerificationReport* last = nullptr) {
  Source src(cfg);
  VerificationReport rep = cfg.command == "validate" ? run_validate(cfg, src) : run_verify(cfg, src);
  rep.params["source"] = cfg.rmatrix;
  rep.params["max_degree"] = cfg.max_degree;
  rep.params["rule_cap"] = cfg.rule_cap;
  rep.params["threads"] = cfg.threads;
  emit(rep, cfg, out);
  if (last) *last = rep;
  return rep.pass ? kExitPass : kExitFail;
}

/// Executes a configuration. Reports go to `out`, diagnostics to `err`.
inline int run(RunConfig cfg, std::ostream& out, std::ostream& err) {
  try {
    cfg.apply_env();
    cfg.validate();
    if (cfg.command != "suite") return run_single(cfg, out);
    int failures = 0;
    for (const auto& entry : suite_entries(cfg.suite, cfg)) {
      VerificationReport rep;
      int code = run_single(entry.cfg, out, &rep);
      const bool as_expected = (code == kExitPass) == entry.expect_pass;
      if (!as_expected) ++failures;
      if (cfg.format == "text" && !entry.expect_pass) {
        out << "  (negative control: " << (as_expected ? "failed as expected" : "UNEXPECTED PASS") << ")\n";
      }
    }
    if (cfg.format == "text") out << "suite " << cfg.suite << ": " << failures << " unexpected outcome(s)\n";
    return failures == 0 ? kExitPass : kExitFail;
  } catch (const ResourceCapError& e) {
    err << "resource cap: " << e.what() << "\n";
    return kExitCap;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const BadSpecialization& e) {
    err << e.what() << "\n";
    return kExitConfig;
  } catch (const ValidationError& e) {
    err << "validation failed: " << e.what() << "\n";
    return kExitFail;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFail;
  }
}

}  // namespace recap
