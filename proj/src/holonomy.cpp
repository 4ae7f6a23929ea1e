#include "folia/holonomy.hpp"

#include <cmath>
#include <sstream>

#include "folia/iterated.hpp"

namespace folia {

int HolonomyConventions::sign(int k) const {
  auto it = psi_sign.find(k);
  if (it != psi_sign.end()) return it->second;
  return (k * (k - 1) / 2) % 2 ? -1 : 1;
}

std::string HolonomyConventions::sign_table() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, s] : psi_sign) {
    if (!first) os << ",";
    os << k << ":" << (s > 0 ? "+" : "-");
    first = false;
  }
  return os.str();
}

double HolonomySeries::bound(int p) const {
  const double lm = length * sup_norm;
  double b = 1.0;
  for (int i = 1; i <= p; ++i) b *= lm / i;
  return b;
}

namespace {

// The super connection form along the family: component S (|S| = r) is
// A_{r+1}(gamma_u, gamma_{s_S}).
class SuperForm {
 public:
  SuperForm(const ZConnection& c, const Grassmann& gr) : d_(c.dim()) {
    for (int S = 0; S < gr.size; ++S) {
      const int r = gr.grade[S];
      if (r + 1 > c.max_degree()) continue;
      const EndValuedForm& A = c.components()[r + 1];
      std::vector<int> gens;
      for (int i = 0; i < gr.g; ++i)
        if (S >> i & 1) gens.push_back(i);
      for (int a = 0; a < d_; ++a)
        for (int b = 0; b < d_; ++b)
          if (!A.at(a, b).is_zero()) {
            entries_.push_back({S, a, b, gens, CompiledForm(A.at(a, b))});
            max_coefs_ = std::max(max_coefs_, entries_.back().form.num_coefs());
          }
    }
    coefs_.resize(max_coefs_);
    vecs_.resize(gr.g + 1);
  }

  void operator()(const FamilySample& smp, Super<MatrixRing>& out) {
    vecs_[0] = smp.du.data();
    for (const auto& e : entries_) {
      e.form.eval_coefs(smp.x, coefs_);
      for (std::size_t g = 0; g < e.gens.size(); ++g) vecs_[g + 1] = smp.ds[e.gens[g]].data();
      out[e.mask](e.a, e.b) =
          e.form.contract(coefs_, std::span<const double* const>(vecs_.data(), e.gens.size() + 1));
    }
  }

 private:
  struct Entry {
    int mask, a, b;
    std::vector<int> gens;
    CompiledForm form;
  };
  int d_;
  std::vector<Entry> entries_;
  std::size_t max_coefs_ = 0;
  std::vector<double> coefs_;
  std::vector<const double*> vecs_;
};

double euclid(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

HolonomySeries psi_series(const ZConnection& c, const PathFamily& fam, int p_max, const QuadratureRule& rule,
                          double tol, bool adaptive) {
  if (!(c.chart() == fam.chart())) throw ConfigError("connection and family live on different charts");
  if (p_max < 0) throw ConfigError("p_max must be nonnegative");
  const int d = c.dim();
  const int G = fam.s_dim();
  const Grassmann& gr = Grassmann::get(G);
  MatrixRing ring{c.space().degrees};
  SuperForm form(c, gr);
  auto factors = [&](const FamilySample& smp, std::vector<Super<MatrixRing>>& out) { form(smp, out[0]); };

  // Envelope constants from a pass over the same nodes the integrator uses.
  HolonomySeries res;
  const auto spoints = fam.s_points(rule);
  const SpectralPanel& sp = spectral_panel(2 * rule.order);
  const int sub = 1 << std::max(rule.depth, 0);
  FamilySample smp = fam.make_sample();
  Super<MatrixRing> val(gr.size, ring.zero());
  for (const auto& s : spoints) {
    res.length = std::max(res.length, path_length(fam, s.x, rule));
    const auto bps = fam.breakpoints(s.x);
    for (std::size_t piece = 0; piece + 1 < bps.size(); ++piece) {
      const double plen = bps[piece + 1] - bps[piece];
      if (plen <= 1e-15) continue;
      for (int q = 0; q < sub; ++q)
        for (int i = 0; i < sp.n; ++i) {
          fam.eval(s.x, bps[piece] + plen * (q + sp.nodes[i]) / sub, smp);
          const double speed = euclid(smp.du);
          if (speed < 1e-14) continue;
          for (auto& m : val) m.setZero();
          form(smp, val);
          double norm = 0.0;
          for (const auto& m : val) norm += m.operatorNorm();
          res.sup_norm = std::max(res.sup_norm, norm / speed);
        }
    }
  }

  int levels = p_max;
  if (adaptive) {
    levels = 0;
    while (levels <= p_max && res.bound(levels + 1) > tol) ++levels;
    if (levels > p_max) {
      std::ostringstream os;
      os << "holonomy series not converged: envelope " << res.bound(p_max + 1) << " > " << tol
         << " at p_max = " << p_max;
      throw NumericalError(os.str());
    }
  }
  res.p_used = levels;
  res.envelope = res.bound(levels + 1);
  res.terms.assign(levels + 1, Eigen::MatrixXd::Zero(d, d));
  const std::vector<int> lf(levels + 1, 0);
  for (const auto& s : spoints) {
    auto J = nested_integrals(ring, gr, fam, s.x, lf, 1, factors, rule);
    for (int p = 0; p <= levels; ++p) res.terms[p] += s.w * J[p][gr.top()];
  }
  res.sum = Eigen::MatrixXd::Zero(d, d);
  for (const auto& t : res.terms) res.sum += t;
  for (double x : res.sum.reshaped())
    if (!std::isfinite(x)) throw NumericalError("holonomy series produced a non-finite value");
  return res;
}

Eigen::MatrixXd psi_p(const ZConnection& c, const PathFamily& fam, int p, const QuadratureRule& rule) {
  return psi_series(c, fam, p, rule, 0.0, false).terms[p];
}

Eigen::MatrixXd fiber_differential(const ZConnection& c, std::span<const double> x) {
  const int d = c.dim();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
  if (c.max_degree() < 0) return m;
  std::vector<double> v = c.components()[0].eval(x, {});
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) m(a, b) = v[a * d + b];
  return m;
}

Eigen::MatrixXd psi_k_simplex(const ZConnection& c, const SimplexMap& sigma, const QuadratureRule& rule,
                              const HolonomyConventions& conv) {
  const int k = sigma.dim();
  if (k == 0) return fiber_differential(c, sigma.vertex(0));
  ThetaFamily fam(sigma, conv.reverse_orientation);
  HolonomySeries s = psi_series(c, fam, conv.p_max, rule, conv.envelope_tol);
  return conv.sign(k) * s.sum;
}

InfinityLocalSystem rh0(const ZConnection& c, const QuadratureRule& rule, const HolonomyConventions& conv) {
  InfinityLocalSystem F;
  F.space = c.space();
  F.F0 = [c](std::span<const double> x) { return fiber_differential(c, x); };
  F.F = [c, rule, conv](const SimplexMap& s) { return psi_k_simplex(c, s, rule, conv); };
  return F;
}

Eigen::MatrixXd ode_transport_oracle(const EndValuedForm& A1, const PathFamily& path, double h) {
  if (path.s_dim() != 0) throw ConfigError("ODE oracle needs a single path");
  if (A1.form_degree() != 1) throw ConfigError("ODE oracle needs a 1-form");
  const int d = A1.dim();
  FamilySample smp = path.make_sample();
  auto rhs = [&](double u) {
    path.eval({}, u, smp);
    std::vector<std::vector<double>> vecs{smp.du};
    std::vector<double> v = A1.eval(smp.x, vecs);
    Eigen::MatrixXd m(d, d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) m(a, b) = v[a * d + b];
    return m;
  };
  Eigen::MatrixXd U = Eigen::MatrixXd::Identity(d, d);
  const auto bps = path.breakpoints({});
  for (std::size_t piece = 0; piece + 1 < bps.size(); ++piece) {
    const double a = bps[piece], b = bps[piece + 1];
    if (b - a <= 1e-15) continue;
    const int steps = std::max(1, static_cast<int>(std::ceil((b - a) / h)));
    const double dt = (b - a) / steps;
    for (int i = 0; i < steps; ++i) {
      const double u = a + i * dt;
      // the end stage is taken just inside the piece, which owns [a, b)
      const Eigen::MatrixXd A0 = rhs(u);
      const Eigen::MatrixXd Am = rhs(u + 0.5 * dt);
      const Eigen::MatrixXd A2 = rhs(i + 1 == steps ? b - 1e-13 * (b - a) : u + dt);
      const Eigen::MatrixXd k1 = A0 * U;
      const Eigen::MatrixXd k2 = Am * (U + 0.5 * dt * k1);
      const Eigen::MatrixXd k3 = Am * (U + 0.5 * dt * k2);
      const Eigen::MatrixXd k4 = A2 * (U + dt * k3);
      U += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  return U;
}

ConeConnection cone(const std::vector<MorphismBlock>& e, const ZConnection& source, const ZConnection& target) {
  if (!(source.chart() == target.chart())) throw ConfigError("cone of connections on different charts");
  const Chart& ch = source.chart();
  const int dE = source.dim(), dF = target.dim();
  GradedVectorSpace space;
  for (int deg : source.space().degrees) space.degrees.push_back(deg - 1);
  for (int deg : target.space().degrees) space.degrees.push_back(deg);
  int top = std::max(source.max_degree(), target.max_degree());
  for (const auto& b : e) {
    if (b.rows != dF || b.cols != dE || static_cast<int>(b.entries.size()) != dF * dE)
      throw ConfigError("morphism block has the wrong shape");
    top = std::max(top, b.form_degree);
  }
  std::vector<EndValuedForm> comps;
  for (int i = 0; i <= top; ++i) {
    EndValuedForm L(ch, space, 1 - i, i);
    const EndValuedForm AE = source.component(i), AF = target.component(i);
    const double sgn = (i % 2) ? 1.0 : -1.0;
    for (int a = 0; a < dE; ++a)
      for (int b = 0; b < dE; ++b)
        if (!AE.at(a, b).is_zero()) L.set(a, b, AE.at(a, b).scaled(Expr(sgn)));
    for (int a = 0; a < dF; ++a)
      for (int b = 0; b < dF; ++b)
        if (!AF.at(a, b).is_zero()) L.set(dE + a, dE + b, AF.at(a, b));
    for (const auto& blk : e) {
      if (blk.form_degree != i) continue;
      for (int a = 0; a < dF; ++a)
        for (int b = 0; b < dE; ++b) {
          const LeafForm& f = blk.at(a, b);
          if (f.is_zero()) continue;
          if (f.degree() != i) throw ConfigError("morphism entry has the wrong form degree");
          if (!L.entry_allowed(dE + a, b))
            throw ConfigError("morphism entry (" + std::to_string(a) + "," + std::to_string(b) +
                              ") of e_" + std::to_string(i) + " has the wrong degree");
          L.set(dE + a, b, L.at(dE + a, b) + f);
        }
    }
    comps.push_back(std::move(L));
  }
  ConeConnection cc{source, target, e, ZConnection(ch, space, std::move(comps))};
  return cc;
}

Eigen::MatrixXd rh1(const ConeConnection& cc, const SimplexMap& sigma, const QuadratureRule& rule,
                    const HolonomyConventions& conv) {
  return psi_k_simplex(cc.cone, sigma, rule, conv).bottomLeftCorner(cc.target.dim(), cc.source.dim());
}

Eigen::MatrixXd rh1_chain_residual(const ConeConnection& cc, const SimplexMap& sigma, const QuadratureRule& rule,
                                   const HolonomyConventions& conv) {
  return mc_residual(rh0(cc.cone, rule, conv), sigma, conv.mc)
      .bottomLeftCorner(cc.target.dim(), cc.source.dim());
}

}  // namespace folia
