#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "motivic/runner.hpp"

#include <fstream>

using namespace motivic;
using nlohmann::json;

namespace {

json load(const std::string& name) {
  std::ifstream in(std::string(MOTIVIC_CONFIG_DIR) + "/" + name);
  REQUIRE(in.good());
  return json::parse(in);
}

int code_of(const char* text) { return run_config(json::parse(text), {}).exit_code; }

}  // namespace

TEST_CASE("ball config reproduces the known volumes") {
  const auto out = run_config(load("ball_measure.json"), {});
  CHECK(out.exit_code == kPass);
  CHECK(out.report["tasks"][0]["result"]["value"] == "L^-2");
  CHECK(out.report["status"] == "pass");
}

TEST_CASE("shipped configs pass, serially and in parallel") {
  for (const char* name : {"sl2_invariance.json", "oracle_suite.json"}) {
    CAPTURE(name);
    const auto serial = run_config(load(name), {});
    CHECK(serial.exit_code == kPass);
    RunOptions par;
    par.parallel = true;
    CHECK(run_config(load(name), par).report.dump() == serial.report.dump());
  }
}

TEST_CASE("reports are deterministic") {
  const json cfg = load("sl2_invariance.json");
  CHECK(run_config(cfg, {}).report.dump() == run_config(cfg, {}).report.dump());
}

TEST_CASE("precision and cutoff overrides") {
  RunOptions o;
  o.precision = 16;
  o.cutoff = -3;
  const auto out = run_config(load("ball_measure.json"), o);
  CHECK(out.exit_code == kPass);
  CHECK(out.report["tasks"][0]["result"]["expansion"] == "L^-2 + F_-3");
}

TEST_CASE("exit codes") {
  CHECK(code_of(R"({"group":"SO3","sets":{},"tasks":[]})") == kSchema);
  CHECK(code_of(R"({"group":"Ga^1","sets":{"a":"dim 1; ord(x0) >= 0"},"tasks":[{"kind":"frobnicate","set":"a"}]})") == kSchema);
  CHECK(code_of(R"({"group":"Ga^1","sets":{"a":"dim 1; ord(x0) >= 0"},"tasks":[{"kind":"measure","set":"b"}]})") == kSchema);
  CHECK(code_of(R"({"group":"Ga^1","sets":{"a":"dim 1; ord(x0) >= 0"},"tasks":[{"kind":"measure","set":"a","expect":"1"}]})") == kMismatch);
  CHECK(code_of(R"({"group":"Ga^1","sets":{"a":"dim 1; ord(x0) >= 0"},"tasks":[{"kind":"measure","set":"a","expect":"L"}]})") == kPass);
  CHECK(code_of(R"({"group":"SL2","sets":{"a":"dim 3; ord(s) >= 0"},"tasks":[{"kind":"measure","set":"a"}]})") == kDivergence);
  CHECK(code_of(R"({"group":"Ga^1","sets":{"a":"dim 1; coeff(x0,0)*coeff(x0,0)*coeff(x0,1) + coeff(x0,1)^3 == 1"},"tasks":[{"kind":"oracle","set":"a","levels":[1]}]})") == kUnsupported);
}

TEST_CASE("first failing task decides the exit code") {
  const auto out = run_config(json::parse(R"({"group":"Ga^1","sets":{"a":"dim 1; ord(x0) >= 0"},
    "tasks":[{"kind":"measure","set":"a","expect":"1"},
             {"kind":"measure","set":"a","expect":"L"}]})"), {});
  CHECK(out.exit_code == kMismatch);
  CHECK(out.report["tasks"][0]["status"] == "fail");
  CHECK(out.report["tasks"][1]["status"] == "pass");
  CHECK(render_summary(out.report).find("fail") != std::string::npos);
}
