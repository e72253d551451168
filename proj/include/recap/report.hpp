#pragma once

#include <chrono>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace recap {

using Json = nlohmann::ordered_json;

/// A named sub-check attached to a report. `recorded` checks are informative
/// only and do not affect the outcome.
struct Check {
  std::string name;
  bool pass = false;
  std::string note;
  bool recorded = false;
};

struct VerificationReport {
  std::string identity;
  Json params = Json::object();
  std::string rmatrix;
  std::vector<std::string> q_points;
  bool pass = false;
  std::size_t residual_terms = 0;
  std::vector<std::string> residual_sample;
  std::vector<std::pair<std::string, double>> timings_ms;
  std::string backend;
  std::vector<Check> checks;
  std::string error;

  std::string outcome() const { return pass ? "pass" : "fail"; }

  void add_check(std::string name, bool ok, std::string note = {}, bool recorded = false) {
    checks.push_back({std::move(name), ok, std::move(note), recorded});
  }

  /// pass iff no residual terms remain and every asserted check passed.
  void finalize() {
    pass = error.empty() && residual_terms == 0;
    for (const auto& c : checks)
      if (!c.recorded && !c.pass) pass = false;
  }

  Json to_json() const {
    Json j;
    j["identity"] = identity;
    j["params"] = params;
    j["rmatrix"] = rmatrix;
    j["q_points"] = q_points;
    j["outcome"] = outcome();
    j["residual_sample"] = residual_sample;
    Json t = Json::object();
    for (const auto& [k, v] : timings_ms) t[k] = v;
    j["timings_ms"] = t;
    j["backend"] = backend;
    j["residual_terms"] = residual_terms;
    Json cs = Json::array();
    for (const auto& c : checks) {
      Json cj{{"name", c.name}, {"pass", c.pass}};
      if (!c.note.empty()) cj["note"] = c.note;
      if (c.recorded) cj["recorded"] = true;
      cs.push_back(cj);
    }
    j["checks"] = cs;
    if (!error.empty()) j["error"] = error;
    return j;
  }

  std::string to_text() const {
    std::ostringstream os;
    os << (pass ? "PASS " : "FAIL ") << identity << " " << params.dump() << " rmatrix=" << rmatrix
       << " backend=" << backend << " q=";
    for (std::size_t i = 0; i < q_points.size(); ++i) os << (i ? "," : "") << q_points[i];
    os << "\n";
    for (const auto& c : checks) {
      os << "  " << (c.recorded ? "[recorded] " : "") << c.name << ": " << (c.pass ? "ok" : "FAILED");
      if (!c.note.empty()) os << " (" << c.note << ")";
      os << "\n";
    }
    if (residual_terms) {
      os << "  residual terms: " << residual_terms << "\n";
      for (const auto& s : residual_sample) os << "    " << s << "\n";
    }
    if (!error.empty()) os << "  error: " << error << "\n";
    os << "  timings:";
    for (const auto& [k, v] : timings_ms) os << " " << k << "=" << v << "ms";
    os << "\n";
    return os.str();
  }
};

/// Accumulates wall time per named phase into a report.
class PhaseTimer {
 public:
  explicit PhaseTimer(VerificationReport& rep) : rep_(rep), start_(std::chrono::steady_clock::now()) {}
  void lap(const std::string& phase) {
    auto now = std::chrono::steady_clock::now();
    double ms = std::chrono::duration<double, std::milli>(now - start_).count();
    rep_.timings_ms.emplace_back(phase, ms);
    start_ = now;
  }

 private:
  VerificationReport& rep_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace recap
