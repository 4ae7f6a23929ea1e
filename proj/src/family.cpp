#include "folia/family.hpp"

#include <algorithm>
#include <cmath>

namespace folia {

std::vector<WeightedPoint> PathFamily::s_points(const QuadratureRule& rule) const {
  return cube_cell_points(s_dim(), rule);
}

FamilySample PathFamily::make_sample() const {
  FamilySample s;
  s.x.assign(chart().n, 0.0);
  s.du.assign(chart().n, 0.0);
  s.ds.assign(s_dim(), std::vector<double>(chart().n, 0.0));
  return s;
}

ThetaFamily::ThetaFamily(SimplexMap sigma, bool reverse) : sigma_(std::move(sigma)), reverse_(reverse) {
  if (sigma_.dim() < 1) throw ConfigError("a theta family needs a simplex of dimension >= 1");
  if (!sigma_.leafwise()) throw ConfigError("simplex is not leafwise");
}

std::vector<double> ThetaFamily::breakpoints(std::span<const double> s) const {
  const int k = sigma_.dim();
  std::vector<double> b;
  for (int m = 0; m <= k; ++m) b.push_back(static_cast<double>(m) / k);
  for (int m = 1; m <= k; ++m) {
    const int a = k - m + 1;
    const double wa = a == k ? 1.0 : s[a - 1];
    for (int j = 1; j < a; ++j) {
      const double wj = s[j - 1];
      if (wj < wa) b.push_back((m - 1.0) / k + (1.0 - wj / wa) / k);
    }
  }
  if (reverse_)
    for (double& v : b) v = 1.0 - v;
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end(), [](double x, double y) { return y - x < 1e-15; }), b.end());
  b.front() = 0.0;
  b.back() = 1.0;
  return b;
}

void ThetaFamily::theta_jet(std::span<const double> s, double u, std::span<double> t,
                            std::span<double> dt_du, std::span<double> dt_ds) const {
  const int k = sigma_.dim();
  double sign = 1.0;
  if (reverse_) {
    u = 1.0 - u;
    sign = -1.0;
  }
  int m = std::min(k, static_cast<int>(std::floor(u * k)) + 1);
  const int a = k - m + 1;
  const double tau = m - k * u;
  // x and its derivatives
  double x[16], xu[16], xs[16 * 16];
  for (int b = 0; b < k; ++b) {
    xu[b] = 0.0;
    for (int j = 0; j < k - 1; ++j) xs[b * (k - 1) + j] = 0.0;
    const double wb = b == k - 1 ? 1.0 : s[b];
    if (b + 1 < a) {
      x[b] = wb;
      if (b < k - 1) xs[b * (k - 1) + b] = 1.0;
    } else if (b + 1 == a) {
      x[b] = tau * wb;
      xu[b] = -k * wb;
      if (b < k - 1) xs[b * (k - 1) + b] = tau;
    } else {
      x[b] = 0.0;
    }
  }
  int arg = k - 1;
  for (int i = k - 1; i >= 0; --i) {
    if (x[i] > x[arg]) arg = i;
    t[i] = x[arg];
    dt_du[i] = sign * xu[arg];
    for (int j = 0; j < k - 1; ++j) dt_ds[i * (k - 1) + j] = xs[arg * (k - 1) + j];
  }
}

void ThetaFamily::eval(std::span<const double> s, double u, FamilySample& out) const {
  const int k = sigma_.dim();
  const int n = sigma_.chart().n;
  double t[16], tu[16], ts[16 * 16];
  theta_jet(s, u, std::span<double>(t, k), std::span<double>(tu, k), std::span<double>(ts, k * (k - 1)));
  thread_local std::vector<double> jac;
  jac.resize(static_cast<std::size_t>(n) * k);
  sigma_.eval_jet(std::span<const double>(t, k), out.x, jac);
  for (int i = 0; i < n; ++i) {
    double v = 0.0;
    for (int c = 0; c < k; ++c) v += jac[i * k + c] * tu[c];
    out.du[i] = v;
    for (int j = 0; j < k - 1; ++j) {
      double w = 0.0;
      for (int c = 0; c < k; ++c) w += jac[i * k + c] * ts[c * (k - 1) + j];
      out.ds[j][i] = w;
    }
  }
}

SinglePath::SinglePath(const Chart& chart, PiecewisePath path) : chart_(chart), path_(std::move(path)) {
  if (path_.dim() != chart.n) throw ConfigError("path dimension does not match the chart");
  for (const auto& p : path_.pieces())
    for (int i = chart.leaf_dim(); i < chart.n; ++i)
      if (!p.comps[i].is_constant_expr()) throw ConfigError("path is not leafwise");
}

void SinglePath::eval(std::span<const double>, double u, FamilySample& out) const {
  path_.eval_jet(u, out.x, out.du);
}

ReparamFamily::ReparamFamily(const PathFamily& base, Expr phi) : base_(base), phi_(std::move(phi)) {
  std::vector<Expr> outs{phi_, phi_.diff(0)};
  jet_ = Program(outs);
  double v[2];
  double z[1] = {0.0}, o[1] = {1.0};
  jet_.eval(z, v);
  if (std::abs(v[0]) > 1e-12) throw ConfigError("reparametrisation must fix 0");
  jet_.eval(o, v);
  if (std::abs(v[0] - 1.0) > 1e-12) throw ConfigError("reparametrisation must fix 1");
  for (int i = 0; i <= 256; ++i) {
    double u[1] = {i / 256.0};
    jet_.eval(u, v);
    if (v[1] < -1e-12) throw ConfigError("reparametrisation is not monotone");
  }
}

double ReparamFamily::inverse(double y) const {
  double lo = 0.0, hi = 1.0, v[2];
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    double mid[1] = {0.5 * (lo + hi)};
    jet_.eval(mid, v);
    (v[0] < y ? lo : hi) = mid[0];
  }
  return 0.5 * (lo + hi);
}

std::vector<double> ReparamFamily::breakpoints(std::span<const double> s) const {
  std::vector<double> b = base_.breakpoints(s);
  for (std::size_t i = 1; i + 1 < b.size(); ++i) b[i] = inverse(b[i]);
  return b;
}

void ReparamFamily::eval(std::span<const double> s, double u, FamilySample& out) const {
  double v[2], uu[1] = {u};
  jet_.eval(uu, v);
  base_.eval(s, std::clamp(v[0], 0.0, 1.0), out);
  for (double& d : out.du) d *= v[1];
}

double path_length(const PathFamily& fam, std::span<const double> s, const QuadratureRule& rule) {
  const GaussRule& g = gauss_legendre(rule.order);
  auto b = fam.breakpoints(s);
  FamilySample smp = fam.make_sample();
  CompensatedSum total;
  for (std::size_t p = 0; p + 1 < b.size(); ++p) {
    const double len = b[p + 1] - b[p];
    if (len <= 0.0) continue;
    for (int i = 0; i < rule.order; ++i) {
      fam.eval(s, b[p] + len * g.nodes[i], smp);
      double nrm = 0.0;
      for (double d : smp.du) nrm += d * d;
      total.add(len * g.weights[i] * std::sqrt(nrm));
    }
  }
  return total.value();
}

}  // namespace folia
