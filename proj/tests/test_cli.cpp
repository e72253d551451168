#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "recap/cli.hpp"

using namespace recap;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cfg(const RunConfig& cfg) {
  std::ostringstream out, err;
  int code = run(cfg, out, err);
  return {code, out.str(), err.str()};
}

RunConfig verify_cfg(std::string identity, int N = 2) {
  RunConfig c;
  c.command = "verify";
  c.rmatrix = "dj";
  c.N = N;
  c.identity = std::move(identity);
  return c;
}

std::string temp_file(const std::string& name, const std::string& body) {
  std::string path = ::testing::TempDir() + name;
  std::ofstream(path) << body;
  return path;
}

class EnvGuard {
 public:
  EnvGuard(const char* name, const char* value) : name_(name) { setenv(name, value, 1); }
  ~EnvGuard() { unsetenv(name_); }

 private:
  const char* name_;
};

}  // namespace

TEST(Run, ColumnIdentityPasses) {
  RunConfig c = verify_cfg("th");
  c.q = {"3/5"};
  auto o = run_cfg(c);
  EXPECT_EQ(o.code, kExitPass) << o.out << o.err;
  EXPECT_EQ(o.out.rfind("PASS th", 0), 0u);
}

TEST(Run, WrongShiftFails) {
  RunConfig c = verify_cfg("shift-scan");
  c.alpha = "1";
  auto o = run_cfg(c);
  EXPECT_EQ(o.code, kExitFail);
  EXPECT_NE(o.out.find("residual terms"), std::string::npos);
}

TEST(Run, MultiplePointsMerge) {
  RunConfig c = verify_cfg("cap1");
  c.q = {"3/5", "2", "7/3"};
  c.format = "json";
  auto o = run_cfg(c);
  ASSERT_EQ(o.code, kExitPass) << o.err;
  auto j = Json::parse(o.out);
  EXPECT_EQ(j["q_points"], Json({"3/5", "2", "7/3"}));
}

TEST(Run, SymbolicAndRigor) {
  RunConfig c = verify_cfg("th");
  c.q = {"symbolic"};
  EXPECT_EQ(run_cfg(c).code, kExitPass);
  RunConfig r = verify_cfg("th");
  r.rigor = true;
  r.format = "json";
  auto o = run_cfg(r);
  ASSERT_EQ(o.code, kExitPass) << o.err;
  EXPECT_EQ(Json::parse(o.out)["backend"], "rigor");
}

TEST(Run, JsonReportFields) {
  RunConfig c = verify_cfg("th");
  c.format = "json";
  auto o = run_cfg(c);
  auto j = Json::parse(o.out);
  for (const char* key : {"identity", "params", "rmatrix", "q_points", "outcome", "residual_sample", "timings_ms",
                          "backend"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["outcome"], "pass");
  EXPECT_EQ(j["rmatrix"], "dj(2)");
  EXPECT_EQ(j["params"]["k"], 2);
  EXPECT_EQ(j["params"]["max_degree"], 8);
  EXPECT_EQ(j["params"]["threads"], 1);
  EXPECT_EQ(j["params"]["reduction"], "eager");
}

TEST(Run, ConfigurationErrors) {
  RunConfig c = verify_cfg("nope");
  EXPECT_EQ(run_cfg(c).code, kExitConfig);
  c = verify_cfg("th", 4);
  EXPECT_EQ(run_cfg(c).code, kExitConfig);
  c = verify_cfg("th");
  c.q = {"1"};
  EXPECT_EQ(run_cfg(c).code, kExitConfig);
  c.q = {"-1"};
  EXPECT_EQ(run_cfg(c).code, kExitConfig);
  c.q = {"abc"};
  EXPECT_EQ(run_cfg(c).code, kExitConfig);
  c = verify_cfg("th");
  c.rmatrix = "flip";
  c.q = {"2"};
  EXPECT_EQ(run_cfg(c).code, kExitConfig);
  c = verify_cfg("exchange-general");
  c.p = 3;
  EXPECT_EQ(run_cfg(c).code, kExitConfig);
  c = verify_cfg("th");
  c.format = "xml";
  EXPECT_EQ(run_cfg(c).code, kExitConfig);
  c = verify_cfg("th");
  c.rmatrix = "file:/nonexistent.rmx";
  EXPECT_EQ(run_cfg(c).code, kExitConfig);
}

TEST(Run, UnknownSuite) {
  RunConfig c;
  c.command = "suite";
  c.suite = "medium";
  auto o = run_cfg(c);
  EXPECT_EQ(o.code, kExitConfig);
  EXPECT_NE(o.err.find("medium"), std::string::npos);
}

TEST(Run, ResourceCaps) {
  RunConfig c = verify_cfg("th");
  c.k = 3;
  c.max_degree = 2;
  EXPECT_EQ(run_cfg(c).code, kExitCap);
  RunConfig r = verify_cfg("th", 3);
  r.rule_cap = 4;
  EXPECT_EQ(run_cfg(r).code, kExitCap);
}

TEST(Run, EnvironmentOverrides) {
  {
    EnvGuard g("RECAP_MAX_DEGREE", "2");
    RunConfig c = verify_cfg("th");
    c.k = 3;
    EXPECT_EQ(run_cfg(c).code, kExitCap);
  }
  {
    EnvGuard g("RECAP_THREADS", "4");
    RunConfig c = verify_cfg("th");
    c.format = "json";
    auto o = run_cfg(c);
    EXPECT_EQ(Json::parse(o.out)["params"]["threads"], 4);
  }
  {
    EnvGuard g("RECAP_RULE_CAP", "lots");
    EXPECT_EQ(run_cfg(verify_cfg("th")).code, kExitConfig);
  }
}

TEST(Validate, CatalogEntries) {
  RunConfig c;
  c.command = "validate";
  c.N = 3;
  EXPECT_EQ(run_cfg(c).code, kExitPass);
  c.rmatrix = "flip";
  c.N = 2;
  EXPECT_EQ(run_cfg(c).code, kExitPass);
}

TEST(Validate, BadFileNamesFailingCheck) {
  std::string path = temp_file("recap_bad.rmx", R"({"N": 2, "q": "2", "entries": [
    {"i":1,"j":1,"k":1,"l":1,"value":"2"}, {"i":1,"j":2,"k":2,"l":1,"value":"1"},
    {"i":2,"j":1,"k":1,"l":2,"value":"1"}, {"i":2,"j":2,"k":2,"l":2,"value":"2"},
    {"i":1,"j":1,"k":2,"l":2,"value":"1"}]})");
  RunConfig c;
  c.command = "validate";
  c.rmatrix = "file:" + path;
  auto o = run_cfg(c);
  EXPECT_EQ(o.code, kExitFail);
  EXPECT_NE(o.out.find("braid: FAILED"), std::string::npos) << o.out;
}

TEST(Validate, SymbolicFileVerifies) {
  std::string path = temp_file("recap_dj2.rmx", serialize_rmatrix(dj_symbolic(2).r, QConfig::symbolic()));
  RunConfig c = verify_cfg("th");
  c.rmatrix = "file:" + path;
  c.q = {"2/7"};
  EXPECT_EQ(run_cfg(c).code, kExitPass);
  c.q = {"symbolic"};
  EXPECT_EQ(run_cfg(c).code, kExitPass);
}

TEST(Suite, SmokePasses) {
  RunConfig c;
  c.command = "suite";
  c.suite = "smoke";
  auto o = run_cfg(c);
  EXPECT_EQ(o.code, kExitPass) << o.out;
  EXPECT_NE(o.out.find("failed as expected"), std::string::npos);
  EXPECT_NE(o.out.find("suite smoke: 0 unexpected"), std::string::npos);
}

TEST(Suite, EntriesCoverNegativeControls) {
  RunConfig base;
  int negatives = 0;
  for (const auto& e : suite_entries("smoke", base))
    if (!e.expect_pass) {
      ++negatives;
      EXPECT_EQ(e.cfg.identity, "shift-scan");
    }
  EXPECT_EQ(negatives, 3);
  EXPECT_GT(suite_entries("full", base).size(), suite_entries("smoke", base).size());
}

TEST(Deterministic, RepeatedRunsEmitSameReport) {
  RunConfig c = verify_cfg("cap1");
  c.format = "json";
  auto a = Json::parse(run_cfg(c).out), b = Json::parse(run_cfg(c).out);
  a.erase("timings_ms");
  b.erase("timings_ms");
  EXPECT_EQ(a, b);
}
