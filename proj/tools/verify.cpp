// verify: run a scenario file and report residuals.
//
// Exit status: 0 pass, 1 check failure, 2 configuration error,
// 3 numerical non-convergence. With --expect-fail the roles of 0 and 1 swap.

#include <CLI11.hpp>
#include <iostream>

#include "folia/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Residual checks for foliated Riemann-Hilbert identities"};
  app.set_version_flag("--version", std::string(folia::kVersion));
  std::string path, format = "text";
  std::optional<int> order, depth, pmax, jobs;
  std::optional<std::uint64_t> seed;
  bool expect_fail = false;
  app.add_option("scenario", path, "Scenario file (JSON)")->required();
  app.add_option("--gauss-order", order, "Gauss-Legendre points per axis")->check(CLI::Range(1, 64));
  app.add_option("--subdiv-depth", depth, "Dyadic subdivision depth")->check(CLI::Range(0, 8));
  app.add_option("--pmax", pmax, "Largest holonomy order")->check(CLI::Range(0, 200));
  app.add_option("--seed", seed, "Seed for random forms and simplices");
  app.add_option("--jobs", jobs, "Worker threads (default: hardware concurrency)")->check(CLI::Range(1, 256));
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "text"}));
  app.add_flag("--expect-fail", expect_fail, "Succeed only when the scenario fails");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const folia::Scenario sc = folia::parse_scenario(path, seed);
    folia::RunFlags flags;
    flags.gauss_order = order;
    flags.subdiv_depth = depth;
    flags.p_max = pmax;
    flags.jobs = jobs.value_or(0);
    const folia::ScenarioReport rep = folia::run(sc, flags);
    std::cout << folia::emit_report(rep, format == "json" ? folia::ReportFormat::Json : folia::ReportFormat::Text);
    if (rep.numerical_failure()) return 3;
    if (expect_fail) return rep.pass ? 1 : 0;
    return rep.pass ? 0 : 1;
  } catch (const folia::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const folia::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  }
}
