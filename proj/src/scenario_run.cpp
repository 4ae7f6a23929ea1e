#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "folia/scenario.hpp"

namespace folia {

namespace {

double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

std::vector<SimplexMap> gather(const Scenario& sc, const CheckSpec& c) {
  std::vector<SimplexMap> out;
  for (const auto& name : c.simplices)
    for (const auto& s : sc.simplices.at(name)) out.push_back(s);
  return out;
}

BarWord word_of(const Scenario& sc, const CheckSpec& c) {
  BarWord w;
  for (const auto& name : c.word) w.push_back(sc.forms.at(name));
  return w;
}

// Single path through the 1-simplex from vertex 1 to vertex 0, the same
// direction as the theta family.
SinglePath edge_path(const SimplexMap& s) {
  return SinglePath(s.chart(), theta_path({}).map(s.components(), s.chart().n));
}

}  // namespace

double run_check(const Scenario& sc, const CheckSpec& c, const QuadratureRule& rule,
                 const HolonomyConventions& conv) {
  const std::vector<SimplexMap> sims = gather(sc, c);
  const BarWord word = word_of(sc, c);
  double worst = 0.0;
  auto each = [&](auto&& f) {
    for (const auto& s : sims) worst = std::max(worst, f(s));
  };
  const std::string& t = c.type;
  if (t == "theta_identity") {
    const LeafForm& a = sc.forms.at(c.form);
    each([&](const SimplexMap& s) { return std::abs(chen_eval({a}, s, rule) - phi1_direct(a, s, rule)); });
  } else if (t == "derham") {
    const LeafForm& a = sc.forms.at(c.form);
    each([&](const SimplexMap& s) { return derham_chain_residual(a, s, rule); });
  } else if (t == "ainfty") {
    each([&](const SimplexMap& s) { return ainfty_relation_residual(word, s, rule); });
  } else if (t == "degree_zero") {
    each([&](const SimplexMap& s) {
      return s.dim() == 0 ? std::abs(phi(word, rule).scalar(s)) : std::abs(chen_eval(word, s, rule));
    });
  } else if (t == "reparam") {
    const Expr phi_u = parse_expr(c.phi, [](std::string_view n) { return n == "u" ? 0 : -1; });
    each([&](const SimplexMap& s) {
      ThetaFamily fam(s, conv.reverse_orientation);
      return reparam_invariance_defect(word, fam, phi_u, rule);
    });
  } else if (t == "normalization") {
    const Cochain f = phi(word, rule);
    worst = degenerate_value(f, sims);
  } else if (t == "homotopy") {
    const Cochain f = phi(word, rule);
    each([&](const SimplexMap& s) { return homotopy_L_residual(f, s); });
  } else if (t == "flatness") {
    worst = flatness_defect_norm(sc.connections.at(c.connection));
  } else if (t == "holonomy_ode") {
    const ZConnection& A = sc.connections.at(c.connection);
    each([&](const SimplexMap& s) {
      SinglePath path = edge_path(s);
      const Eigen::MatrixXd psi = psi_series(A, path, conv.p_max, rule, conv.envelope_tol).sum;
      const Eigen::MatrixXd ode = ode_transport_oracle(A.component(1), path, c.step);
      return (psi - ode).norm() / ode.norm();
    });
  } else if (t == "envelope") {
    const ZConnection& A = sc.connections.at(c.connection);
    each([&](const SimplexMap& s) {
      ThetaFamily fam(s, conv.reverse_orientation);
      const HolonomySeries ser = psi_series(A, fam, conv.p_max, rule, 0.0, false);
      double excess = 0.0;
      for (int p = 0; p <= ser.p_used; ++p)
        excess = std::max(excess, ser.terms[p].operatorNorm() - ser.bound(p));
      return excess;
    });
  } else if (t == "mc") {
    const InfinityLocalSystem F = rh0(sc.connections.at(c.connection), rule, conv);
    each([&](const SimplexMap& s) { return max_abs(mc_residual(F, s, conv.mc)); });
  } else if (t == "concat") {
    const ZConnection& A = sc.connections.at(c.connection);
    each([&](const SimplexMap& tau) {
      const PiecewisePath th = theta_path({});
      SinglePath mu(tau.chart(), concat_mu(1, th, th).map(tau.components(), tau.chart().n));
      const Eigen::MatrixXd lhs = psi_series(A, mu, conv.p_max, rule, conv.envelope_tol).sum;
      const Eigen::MatrixXd rhs = psi_k_simplex(A, tau.front(1), rule, conv) * psi_k_simplex(A, tau.back(1), rule, conv);
      return max_abs(lhs - rhs);
    });
  } else if (t == "rh1_chain") {
    const ConeConnection& cc = sc.morphisms.at(c.morphism);
    each([&](const SimplexMap& s) { return max_abs(rh1_chain_residual(cc, s, rule, conv)); });
  } else {
    throw ConfigError("unknown check type '" + t + "'");
  }
  if (!std::isfinite(worst)) throw NumericalError("check '" + c.name + "' produced a non-finite residual");
  return worst;
}

bool ScenarioReport::numerical_failure() const {
  for (const auto& c : checks)
    if (c.numerical) return true;
  return false;
}

ScenarioReport run(const Scenario& sc, const RunFlags& flags) {
  QuadratureRule base = sc.rule;
  HolonomyConventions conv = sc.conv;
  if (flags.p_max) conv.p_max = *flags.p_max;

  ScenarioReport rep;
  rep.scenario = sc.id;
  rep.orientation = conv.reverse_orientation ? "reversed" : "u-then-s";
  rep.mc_variant = to_string(conv.mc);
  rep.rh_sign_table = conv.sign_table();
  rep.checks.resize(sc.checks.size());
  rep.vacuous = sc.checks.empty();

  auto work = [&](std::size_t i) {
    const CheckSpec& c = sc.checks[i];
    QuadratureRule rule = base;
    if (c.gauss_order) rule.order = *c.gauss_order;
    if (c.subdiv_depth) rule.depth = *c.subdiv_depth;
    if (flags.gauss_order) rule.order = *flags.gauss_order;
    if (flags.subdiv_depth) rule.depth = *flags.subdiv_depth;
    CheckResult& r = rep.checks[i];
    r.name = c.name;
    r.tol = c.tol;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      r.residual = run_check(sc, c, rule, conv);
      r.pass = r.residual <= c.tol;
    } catch (const NumericalError& e) {
      r.residual = std::numeric_limits<double>::infinity();
      r.error = e.what();
      r.numerical = true;
    } catch (const std::exception& e) {
      r.residual = std::numeric_limits<double>::infinity();
      r.error = e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  const std::size_t n = sc.checks.size();
  unsigned jobs = flags.jobs > 0 ? static_cast<unsigned>(flags.jobs) : std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, n));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) work(i);
      });
    for (auto& th : pool) th.join();
  }
  for (const auto& r : rep.checks) rep.pass = rep.pass && r.pass;
  return rep;
}

}  // namespace folia
