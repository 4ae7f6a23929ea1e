#include "folia/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>

#include "folia/expr.hpp"

namespace folia {

QuadratureRule default_rule() {
  QuadratureRule r;
  if (const char* env = std::getenv("FOLIA_GAUSS_ORDER")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1 || v > 64)
      throw ConfigError("FOLIA_GAUSS_ORDER must be an integer in [1, 64]");
    r.order = static_cast<int>(v);
  }
  return r;
}

namespace {

GaussRule compute_gauss(int n) {
  GaussRule g;
  g.nodes.resize(n);
  g.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    // map from [-1,1] to [0,1], ascending
    g.nodes[n - 1 - i] = 0.5 * (x + 1.0);
    g.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return g;
}

template <class T, class F>
const T& cached(int n, F make) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<T>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<T>(make(n));
  return *slot;
}

SpectralPanel compute_panel(int n) {
  SpectralPanel p;
  p.n = n;
  const GaussRule& g = gauss_legendre(n);
  p.nodes = g.nodes;
  p.weights = g.weights;
  // barycentric weights
  std::vector<double> bw(n, 1.0);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (k != j) bw[j] /= (p.nodes[j] - p.nodes[k]);
  auto lagrange = [&](int j, double x) {
    double prod = 1.0;
    for (int k = 0; k < n; ++k)
      if (k != j) prod *= (x - p.nodes[k]);
    return prod * bw[j];
  };
  p.cumulative.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    double b = p.nodes[i];
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int m = 0; m < n; ++m) s += g.weights[m] * lagrange(j, b * g.nodes[m]);
      p.cumulative[i * n + j] = s * b;
    }
  }
  return p;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw ConfigError("Gauss order must be at least 1");
  return cached<GaussRule>(n, compute_gauss);
}

const SpectralPanel& spectral_panel(int n) {
  if (n < 1) throw ConfigError("spectral panel needs at least one node");
  return cached<SpectralPanel>(n, compute_panel);
}

void CompensatedSum::add(double x) {
  double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    comp_ += (sum_ - t) + x;
  else
    comp_ += (x - t) + sum_;
  sum_ = t;
}

std::vector<WeightedPoint> simplex_points(int k, const QuadratureRule& rule) {
  if (k == 0) return {WeightedPoint{{}, 1.0}};
  const GaussRule& g = gauss_legendre(rule.order);
  const int panels = 1 << std::max(rule.depth, 0);
  const int per_axis = panels * rule.order;
  std::vector<double> nodes(per_axis), weights(per_axis);
  for (int p = 0; p < panels; ++p)
    for (int i = 0; i < rule.order; ++i) {
      nodes[p * rule.order + i] = (p + g.nodes[i]) / panels;
      weights[p * rule.order + i] = g.weights[i] / panels;
    }
  std::vector<WeightedPoint> out;
  std::vector<int> it(k, 0);
  for (;;) {
    WeightedPoint wp;
    wp.x.resize(k);
    wp.w = 1.0;
    double prod = 1.0;
    for (int d = 0; d < k; ++d) {
      double u = nodes[it[d]];
      prod *= u;
      wp.x[d] = prod;
      wp.w *= weights[it[d]] * std::pow(u, k - 1 - d);
    }
    out.push_back(std::move(wp));
    int d = k - 1;
    while (d >= 0 && ++it[d] == per_axis) it[d--] = 0;
    if (d < 0) break;
  }
  return out;
}

std::vector<WeightedPoint> cube_cell_points(int k, const QuadratureRule& rule) {
  if (k == 0) return {WeightedPoint{{}, 1.0}};
  auto base = simplex_points(k, rule);
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<WeightedPoint> out;
  out.reserve(base.size() * static_cast<std::size_t>(std::tgamma(k + 1) + 0.5));
  do {
    for (const auto& p : base) {
      WeightedPoint q;
      q.x.resize(k);
      for (int i = 0; i < k; ++i) q.x[perm[i]] = p.x[i];
      q.w = p.w;
      out.push_back(std::move(q));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

double integrate_simplex(const Integrand& f, int k, const QuadratureRule& rule) {
  CompensatedSum s;
  for (const auto& p : simplex_points(k, rule)) s.add(p.w * f(p.x));
  return s.value();
}

double integrate_cube_piecewise(const Integrand& f, int k, const QuadratureRule& rule) {
  CompensatedSum s;
  for (const auto& p : cube_cell_points(k, rule)) s.add(p.w * f(p.x));
  return s.value();
}

}  // namespace folia
