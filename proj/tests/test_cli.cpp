#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "folia/scenario.hpp"

using namespace folia;

namespace {

const std::string kScenarioDir = FOLIA_SCENARIO_DIR;

const char* kMinimal = R"({
  "id": "mini",
  "chart": {"n": 2, "q": 0},
  "forms": {
    "a": {"degree": 1, "terms": [{"coef": "x1*x2", "idx": [1]}, {"coef": "x1", "idx": [2]}]}
  },
  "simplices": {
    "tri": {"dim": 2, "components": ["t1", "t2"]}
  },
  "checks": [
    {"name": "derham_a", "type": "derham", "form": "a", "simplex": "tri"}
  ]
})";

std::string config_error(const std::string& text) {
  try {
    parse_scenario_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  REQUIRE(pos != std::string::npos);
  return s.replace(pos, from.size(), to);
}

int run_verify(const std::string& args) {
  const std::string cmd = std::string(FOLIA_VERIFY_PATH) + " " + args + " > /dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string strip_seconds(std::string json) {
  const std::string key = "\"seconds\": ";
  for (auto p = json.find(key); p != std::string::npos; p = json.find(key, p)) {
    const auto end = json.find_first_of(",}", p);
    json.erase(p, end - p);
  }
  return json;
}

}  // namespace

TEST_CASE("a minimal scenario parses and passes") {
  Scenario sc = parse_scenario_text(kMinimal);
  CHECK(sc.id == "mini");
  CHECK(sc.chart.n == 2);
  REQUIRE(sc.checks.size() == 1);
  CHECK(sc.checks[0].tol == 1e-6);
  ScenarioReport r = run(sc);
  CHECK(r.pass);
  CHECK_FALSE(r.vacuous);
  CHECK(r.checks[0].residual <= 1e-10);
}

TEST_CASE("configuration errors name the culprit") {
  std::string msg = config_error(replace(kMinimal, R"("form": "a")", R"("form": "b")"));
  CHECK(msg.find("'b'") != std::string::npos);
  CHECK(msg.find("derham_a") != std::string::npos);
  CHECK(msg.find("(line 11)") != std::string::npos);

  msg = config_error(replace(kMinimal, R"("coef": "x1", "idx": [2])", R"j("coef": "sin(x3)", "idx": [2])j"));
  CHECK(msg.find("unknown coordinate x3") != std::string::npos);

  CHECK(config_error(replace(kMinimal, R"("id": "mini",)", R"("id": "mini", "extra": 1,)")).find("extra") !=
        std::string::npos);
  CHECK(config_error(replace(kMinimal, R"("simplex": "tri")", R"("simplex": "nope")")).find("nope") !=
        std::string::npos);
  // a de Rham check needs simplices of dimension deg + 1
  CHECK_FALSE(config_error(replace(kMinimal, R"("dim": 2, "components": ["t1", "t2"])",
                                   R"("dim": 1, "components": ["t1", "0"])"))
                  .empty());
  CHECK_FALSE(config_error("{ not json").empty());
  CHECK_FALSE(config_error(replace(kMinimal, R"("type": "derham")", R"("type": "bogus")")).empty());
}

TEST_CASE("an empty check list is vacuous") {
  Scenario sc = parse_scenario_text(R"({"id": "empty", "chart": {"n": 1, "q": 0}, "checks": []})");
  ScenarioReport r = run(sc);
  CHECK(r.pass);
  CHECK(r.vacuous);
  CHECK(emit_report(r, ReportFormat::Json).find("\"vacuous\": true") != std::string::npos);
}

TEST_CASE("report formats") {
  CHECK(sci6(1.23456789e-7) == "1.23457e-07");
  CHECK(sci6(0.0) == "0.00000e+00");
  CHECK(sci6(std::numeric_limits<double>::infinity()) == "null");

  ScenarioReport r = run(parse_scenario_text(kMinimal));
  r.checks.push_back(CheckResult{"broken", std::numeric_limits<double>::infinity(), 1e-6, false, 0.5, "boom", true});
  r.pass = false;
  const std::string js = emit_report(r, ReportFormat::Json);
  ScenarioReport back = parse_report_json(js);
  CHECK(back.scenario == r.scenario);
  CHECK(back.version == kVersion);
  CHECK(back.rh_sign_table == "1:+,2:-,3:-");
  CHECK(back.mc_variant == "commutator");
  REQUIRE(back.checks.size() == 2);
  CHECK(back.checks[0].residual == doctest::Approx(r.checks[0].residual).epsilon(1e-5));
  CHECK(back.checks[1].error == "boom");
  CHECK(std::isinf(back.checks[1].residual));
  CHECK_FALSE(back.pass);
  CHECK(emit_report(back, ReportFormat::Json) == js);

  const std::string txt = emit_report(r, ReportFormat::Text);
  const auto head = txt.find("NAME");
  REQUIRE(head != std::string::npos);
  std::size_t last = head;
  for (const char* col : {"RESIDUAL", "TOL", "PASS", "TIME"}) {
    const auto p = txt.find(col, head);
    CHECK(p > last);
    last = p;
  }
  CHECK(txt.find("overall: FAIL") != std::string::npos);
}

TEST_CASE("quadrature flags override the scenario") {
  std::string text = replace(kMinimal, R"("type": "derham")", R"("type": "derham", "gauss_order": 1)");
  Scenario sc = parse_scenario_text(replace(text, R"("coef": "x1*x2")", R"j("coef": "exp(x1*x2)")j"));
  // one Gauss point cannot integrate exp(x1 x2) exactly
  CHECK(run(sc).checks[0].residual > 1e-6);
  RunFlags f;
  f.gauss_order = 8;
  CHECK(run(sc, f).checks[0].residual <= 1e-10);
}

TEST_CASE("the curved negative control fails") {
  ScenarioReport r = run(parse_scenario(kScenarioDir + "/curved_negative.json"));
  CHECK_FALSE(r.pass);
  CHECK(r.checks[0].residual > 1e-3);
}

TEST_CASE("reports are deterministic") {
  Scenario sc = parse_scenario(kScenarioDir + "/derham_smoke.json");
  RunFlags one, many;
  one.jobs = 1;
  many.jobs = 4;
  const std::string a = strip_seconds(emit_report(run(sc, one), ReportFormat::Json));
  const std::string b = strip_seconds(emit_report(run(sc, many), ReportFormat::Json));
  CHECK(a == b);
  const std::string c = strip_seconds(emit_report(run(parse_scenario(kScenarioDir + "/derham_smoke.json", 99)),
                                                  ReportFormat::Json));
  CHECK(c != a);
}

TEST_CASE("verify exit codes") {
  const std::string dir = kScenarioDir + "/";
  CHECK(run_verify(dir + "derham_smoke.json") == 0);
  CHECK(run_verify(dir + "curved_negative.json") == 1);
  CHECK(run_verify("--expect-fail " + dir + "curved_negative.json") == 0);
  CHECK(run_verify("--expect-fail " + dir + "derham_smoke.json") == 1);
  CHECK(run_verify(dir + "does_not_exist.json") == 2);
  CHECK(run_verify("--format xml " + dir + "derham_smoke.json") == 2);
  CHECK(run_verify("--pmax 1 " + dir + "holonomy_oracle.json") == 3);
}
