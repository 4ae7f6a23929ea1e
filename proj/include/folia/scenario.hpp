#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "folia/ainfty.hpp"
#include "folia/holonomy.hpp"

namespace folia {

inline constexpr const char* kVersion = "1.0.0";

struct CheckSpec {
  std::string name;
  std::string type;
  double tol = 1e-6;
  std::optional<int> gauss_order, subdiv_depth;

  std::string form;                  // theta_identity, derham
  std::vector<std::string> word;     // ainfty, degree_zero, reparam, normalization, homotopy
  std::string connection;            // flatness, holonomy_ode, envelope, mc, concat
  std::string morphism;              // rh1_chain
  std::vector<std::string> simplices;
  std::string phi;                   // reparam, expression in u
  double step = 1e-3;                // holonomy_ode
};

struct Scenario {
  std::string id;
  std::uint64_t seed = 0;
  Chart chart;
  QuadratureRule rule;
  HolonomyConventions conv;
  std::map<std::string, LeafForm> forms;
  std::map<std::string, ZConnection> connections;
  std::map<std::string, ConeConnection> morphisms;
  std::map<std::string, std::vector<SimplexMap>> simplices;
  std::vector<CheckSpec> checks;
};

struct RunFlags {
  std::optional<int> gauss_order, subdiv_depth, p_max;
  std::optional<std::uint64_t> seed;
  int jobs = 0;  // 0: hardware concurrency
};

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double tol = 0.0;
  bool pass = false;
  double seconds = 0.0;
  std::string error;          // set when the check could not be evaluated
  bool numerical = false;     // the error was a non-convergence
};

struct ScenarioReport {
  std::string scenario;
  std::string version = kVersion;
  std::string orientation, mc_variant, rh_sign_table;
  std::vector<CheckResult> checks;
  bool pass = true;
  bool vacuous = false;

  bool numerical_failure() const;
};

/// Parses and validates a scenario. Random forms and simplices are drawn
/// from the scenario seed, or from seed_override when given.
Scenario parse_scenario(const std::string& path, std::optional<std::uint64_t> seed_override = {});
Scenario parse_scenario_text(const std::string& text, std::optional<std::uint64_t> seed_override = {});

/// Runs every check; errors inside a check become failed entries.
ScenarioReport run(const Scenario& sc, const RunFlags& flags = {});

/// Evaluates one check and returns its residual (throws on errors).
double run_check(const Scenario& sc, const CheckSpec& check, const QuadratureRule& rule,
                 const HolonomyConventions& conv);

enum class ReportFormat { Json, Text };
std::string emit_report(const ScenarioReport& report, ReportFormat format);
ScenarioReport parse_report_json(const std::string& text);

/// "%.5e" formatting used for residuals and tolerances.
std::string sci6(double x);

}  // namespace folia
