#include "folia/cochains.hpp"

#include <cmath>

namespace folia {

Eigen::MatrixXd Cochain::operator()(const SimplexMap& sigma) const {
  if (degree < 0 || !eval) return Eigen::MatrixXd::Zero(rows, cols);
  if (sigma.dim() != degree)
    throw ConfigError("cochain of degree " + std::to_string(degree) + " evaluated on a " +
                      std::to_string(sigma.dim()) + "-simplex");
  return eval(sigma);
}

Cochain Cochain::zero(int degree, int rows, int cols) {
  return Cochain{degree, rows, cols, [rows, cols](const SimplexMap&) {
                   return Eigen::MatrixXd::Zero(rows, cols).eval();
                 }};
}

Cochain Cochain::constant(int degree, double c) {
  return Cochain{degree, 1, 1, [c](const SimplexMap&) { return Eigen::MatrixXd::Constant(1, 1, c).eval(); }};
}

Cochain delta(const Cochain& phi) {
  if (phi.degree < 0) return Cochain::zero(phi.degree + 1, phi.rows, phi.cols);
  return Cochain{phi.degree + 1, phi.rows, phi.cols, [phi](const SimplexMap& sigma) {
                   Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(phi.rows, phi.cols);
                   for (int i = 0; i <= sigma.dim(); ++i) {
                     Eigen::MatrixXd v = phi(sigma.face(i));
                     if (i % 2)
                       acc -= v;
                     else
                       acc += v;
                   }
                   return acc;
                 }};
}

Cochain cup(const Cochain& phi, const Cochain& psi) {
  if (phi.cols != psi.rows) throw ConfigError("cup product of incompatible matrix cochains");
  const int deg = phi.degree + psi.degree;
  if (phi.degree < 0 || psi.degree < 0) return Cochain::zero(deg, phi.rows, psi.cols);
  return Cochain{deg, phi.rows, psi.cols, [phi, psi](const SimplexMap& sigma) {
                   return (phi(sigma.front(phi.degree)) * psi(sigma.back(psi.degree))).eval();
                 }};
}

double degenerate_value(const Cochain& phi, std::span<const SimplexMap> sigmas) {
  double worst = 0.0;
  for (const SimplexMap& s : sigmas) {
    if (s.dim() + 1 != phi.degree) throw ConfigError("normalization check needs (deg-1)-simplices");
    for (int i = 1; i <= s.dim() + 1; ++i)
      worst = std::max(worst, phi(s.degeneracy(i)).cwiseAbs().maxCoeff());
  }
  return worst;
}

bool normalized_check(const Cochain& phi, std::span<const SimplexMap> sigmas, double tol, double* worst) {
  double w = degenerate_value(phi, sigmas);
  if (worst) *worst = w;
  return w <= tol;
}

SimplexMap cone_simplex(const SimplexMap& sigma) {
  const int k = sigma.dim();
  const Chart& ch = sigma.chart();
  const Expr t1 = Expr::var(0);
  // t1 = 0 forces t = 0 on the ordered simplex; the shift keeps the apex finite
  const Expr inv = pow(t1 + Expr(1e-300), -1);
  std::vector<Expr> sub;
  for (int i = 0; i < k; ++i) sub.push_back(Expr::var(i + 1) * inv);
  std::vector<Expr> comps;
  for (int l = 0; l < ch.n; ++l) {
    const Expr& e = sigma.components()[l];
    if (ch.is_leaf(l))
      comps.push_back(t1 * e.substitute(sub));
    else
      comps.push_back(e);
  }
  return SimplexMap(ch, k + 1, comps);
}

Cochain homotopy_L(const Cochain& phi) {
  if (phi.degree <= 0) return Cochain::zero(phi.degree - 1, phi.rows, phi.cols);
  return Cochain{phi.degree - 1, phi.rows, phi.cols, [phi](const SimplexMap& tau) {
                   Eigen::MatrixXd v = phi(cone_simplex(tau));
                   return (tau.dim() % 2 ? -v : v).eval();
                 }};
}

double homotopy_L_residual(const Cochain& phi, const SimplexMap& sigma) {
  const int k = sigma.dim();
  if (phi.degree != k) throw ConfigError("homotopy residual: degree mismatch");
  Eigen::MatrixXd lhs = delta(homotopy_L(phi))(sigma) - homotopy_L(delta(phi))(sigma);
  if ((k + 1) % 2) lhs = -lhs;
  Eigen::MatrixXd r = lhs - phi(sigma);
  if (k == 0) {
    std::vector<double> p = sigma.vertex(0);
    for (int l = 0; l < sigma.chart().leaf_dim(); ++l) p[l] = 0.0;
    r += phi(SimplexMap::constant(sigma.chart(), p));
  }
  return r.cwiseAbs().maxCoeff();
}

std::string to_string(McVariant v) { return v == McVariant::Verbatim ? "verbatim" : "commutator"; }

Eigen::MatrixXd hat_delta(const InfinityLocalSystem& F, const SimplexMap& sigma, McVariant v) {
  const int k = sigma.dim();
  if (k < 1) throw ConfigError("MC residual needs k >= 1");
  Eigen::MatrixXd Fs = F.F(sigma);
  Eigen::MatrixXd e0 = F.F0(sigma.vertex(0));
  Eigen::MatrixXd ek = F.F0(sigma.vertex(k));
  const double sk = (k % 2) ? -1.0 : 1.0;
  const double ck = v == McVariant::Verbatim ? -sk : sk;
  Eigen::MatrixXd r = e0 * Fs + ck * Fs * ek;
  for (int i = 1; i <= k - 1; ++i) {
    Eigen::MatrixXd face = F.F(sigma.face(i));
    if (i % 2)
      r += face;
    else
      r -= face;
  }
  return r;
}

Eigen::MatrixXd mc_residual(const InfinityLocalSystem& F, const SimplexMap& sigma, McVariant v) {
  const int k = sigma.dim();
  Eigen::MatrixXd r = hat_delta(F, sigma, v);
  for (int i = 1; i <= k - 1; ++i) {
    Eigen::MatrixXd prod = F.F(sigma.front(i)) * F.F(sigma.back(k - i));
    if (i % 2)
      r -= prod;
    else
      r += prod;
  }
  return r;
}

}  // namespace folia
