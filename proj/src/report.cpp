#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "folia/scenario.hpp"

namespace folia {

using nlohmann::json;

std::string sci6(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5e", x);
  return buf;
}

namespace {

std::string quoted(const std::string& s) { return json(s).dump(); }

std::string fixed3(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

std::string emit_json(const ScenarioReport& r) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"scenario\": " << quoted(r.scenario) << ",\n";
  os << "  \"version\": " << quoted(r.version) << ",\n";
  os << "  \"flags\": {\"orientation\": " << quoted(r.orientation) << ", \"mc_variant\": " << quoted(r.mc_variant)
     << ", \"rh_sign_table\": " << quoted(r.rh_sign_table) << "},\n";
  os << "  \"checks\": [";
  for (std::size_t i = 0; i < r.checks.size(); ++i) {
    const CheckResult& c = r.checks[i];
    os << (i ? ",\n" : "\n") << "    {\"name\": " << quoted(c.name) << ", \"residual\": " << sci6(c.residual)
       << ", \"tol\": " << sci6(c.tol) << ", \"pass\": " << (c.pass ? "true" : "false")
       << ", \"seconds\": " << fixed3(c.seconds);
    if (!c.error.empty()) os << ", \"error\": " << quoted(c.error);
    os << "}";
  }
  os << (r.checks.empty() ? "],\n" : "\n  ],\n");
  os << "  \"pass\": " << (r.pass ? "true" : "false") << ",\n";
  os << "  \"vacuous\": " << (r.vacuous ? "true" : "false") << "\n";
  os << "}\n";
  return os.str();
}

std::string emit_text(const ScenarioReport& r) {
  std::size_t w = 4;
  for (const auto& c : r.checks) w = std::max(w, c.name.size());
  std::ostringstream os;
  os << "scenario " << r.scenario << " (version " << r.version << ")\n";
  os << "flags: orientation=" << r.orientation << " mc_variant=" << r.mc_variant
     << " rh_sign_table=" << r.rh_sign_table << "\n";
  char line[512];
  std::snprintf(line, sizeof line, "%-*s  %-12s  %-12s  %-4s  %8s\n", static_cast<int>(w), "NAME", "RESIDUAL", "TOL",
                "PASS", "TIME");
  os << line;
  for (const auto& c : r.checks) {
    std::snprintf(line, sizeof line, "%-*s  %-12s  %-12s  %-4s  %7.3fs\n", static_cast<int>(w), c.name.c_str(),
                  std::isfinite(c.residual) ? sci6(c.residual).c_str() : "error", sci6(c.tol).c_str(),
                  c.pass ? "yes" : "no", c.seconds);
    os << line;
    if (!c.error.empty()) os << "  " << c.error << "\n";
  }
  if (r.vacuous) os << "(no checks: vacuous pass)\n";
  os << "overall: " << (r.pass ? "PASS" : "FAIL") << "\n";
  return os.str();
}

}  // namespace

std::string emit_report(const ScenarioReport& report, ReportFormat format) {
  return format == ReportFormat::Json ? emit_json(report) : emit_text(report);
}

ScenarioReport parse_report_json(const std::string& text) {
  ScenarioReport r;
  try {
    const json j = json::parse(text);
    r.scenario = j.at("scenario").get<std::string>();
    r.version = j.at("version").get<std::string>();
    r.orientation = j.at("flags").at("orientation").get<std::string>();
    r.mc_variant = j.at("flags").at("mc_variant").get<std::string>();
    r.rh_sign_table = j.at("flags").at("rh_sign_table").get<std::string>();
    for (const auto& c : j.at("checks")) {
      CheckResult cr;
      cr.name = c.at("name").get<std::string>();
      cr.residual = c.at("residual").is_null() ? std::numeric_limits<double>::infinity() : c.at("residual").get<double>();
      cr.tol = c.at("tol").get<double>();
      cr.pass = c.at("pass").get<bool>();
      cr.seconds = c.at("seconds").get<double>();
      if (c.contains("error")) cr.error = c.at("error").get<std::string>();
      r.checks.push_back(cr);
    }
    r.pass = j.at("pass").get<bool>();
    r.vacuous = j.value("vacuous", false);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed report: ") + e.what());
  }
  return r;
}

}  // namespace folia
