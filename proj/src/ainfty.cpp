#include "folia/ainfty.hpp"

#include <cmath>

namespace folia {

int phi_degree(const BarWord& word) {
  int t = 0;
  for (const auto& a : word) t += a.degree();
  return t - static_cast<int>(word.size()) + 1;
}

double phi1_direct(const LeafForm& a, const SimplexMap& sigma, const QuadratureRule& rule) {
  const int k = sigma.dim();
  if (a.degree() != k) return 0.0;
  if (k == 0) return a.coefficient({}).eval(sigma.vertex(0));
  LeafForm pb = pullback(a, sigma.components(), k);
  MultiIndex top;
  for (int i = 0; i < k; ++i) top.push_back(i);
  Expr coef = pb.coefficient(top);
  if (coef.is_zero()) return 0.0;
  Program prog(std::span<const Expr>(&coef, 1));
  double v = integrate_simplex(
      [&](std::span<const double> t) {
        double out;
        prog.eval(t, std::span<double>(&out, 1));
        return out;
      },
      k, rule);
  return k % 2 ? -v : v;
}

Cochain phi(const BarWord& word, const QuadratureRule& rule) {
  if (word.empty()) throw ConfigError("phi of an empty word");
  const int deg = phi_degree(word);
  if (deg < 0) return Cochain::zero(deg);
  if (word.size() == 1) {
    LeafForm a = word[0];
    return Cochain{deg, 1, 1, [a, rule](const SimplexMap& s) {
                     return Eigen::MatrixXd::Constant(1, 1, phi1_direct(a, s, rule)).eval();
                   }};
  }
  for (const auto& a : word)
    if (a.degree() == 0 || a.is_zero()) return Cochain::zero(deg);
  return Cochain{deg, 1, 1, [word, rule](const SimplexMap& s) {
                   return Eigen::MatrixXd::Constant(1, 1, chen_eval(word, s, rule)).eval();
                 }};
}

double derham_chain_residual(const LeafForm& a, const SimplexMap& sigma, const QuadratureRule& rule) {
  if (sigma.dim() != a.degree() + 1) throw ConfigError("de Rham residual: simplex has the wrong dimension");
  double lhs = delta(phi({a}, rule)).scalar(sigma);
  double rhs = phi({-leaf_d(a)}, rule).scalar(sigma);
  return std::abs(lhs - rhs);
}

double AinftyTerms::residual() const {
  double r = bar - coboundary;
  for (std::size_t i = 0; i < cups.size(); ++i) r -= cup_signs[i] * cups[i];
  return std::abs(r);
}

AinftyTerms ainfty_terms(const BarWord& word, const SimplexMap& sigma, const QuadratureRule& rule) {
  const int n = static_cast<int>(word.size());
  if (sigma.dim() != phi_degree(word) + 1)
    throw ConfigError("A-infinity residual: simplex has the wrong dimension");
  AinftyTerms t;
  for (const auto& term : bar_differential(word)) {
    if (phi_degree(term.word) < 0) continue;
    t.bar += term.coef * phi(term.word, rule).scalar(sigma);
  }
  t.coboundary = delta(phi(word, rule)).scalar(sigma);
  for (int l = 1; l < n; ++l) {
    BarWord head(word.begin(), word.begin() + l), tail(word.begin() + l, word.end());
    Cochain a = phi(head, rule), b = phi(tail, rule);
    t.cups.push_back(cup(a, b).scalar(sigma));
    t.cup_signs.push_back((a.degree - 1) % 2 == 0 ? 1 : -1);
  }
  return t;
}

double ainfty_relation_residual(const BarWord& word, const SimplexMap& sigma, const QuadratureRule& rule) {
  return ainfty_terms(word, sigma, rule).residual();
}

Expr random_polynomial(Rng& rng, int nvars, int max_degree, int max_terms) {
  std::uniform_int_distribution<int> coef(-3, 3), nterms(1, max_terms), var(0, nvars - 1),
      deg(0, max_degree);
  Expr p;
  const int m = nterms(rng);
  for (int t = 0; t < m; ++t) {
    int c = coef(rng);
    if (c == 0) c = 1;
    Expr mono(static_cast<double>(c));
    const int d = deg(rng);
    for (int j = 0; j < d; ++j) mono = mono * Expr::var(var(rng));
    p = p + mono;
  }
  return p;
}

LeafForm random_form(Rng& rng, const Chart& chart, int degree, int max_poly_degree) {
  LeafForm a(chart, degree);
  if (degree > chart.leaf_dim()) return a;
  std::vector<int> idx(degree);
  for (int i = 0; i < degree; ++i) idx[i] = i;
  // every increasing index tuple gets a random coefficient
  for (;;) {
    a.add(idx, random_polynomial(rng, chart.n, max_poly_degree, 2));
    int i = degree - 1;
    while (i >= 0 && idx[i] == chart.leaf_dim() - degree + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < degree; ++j) idx[j] = idx[j - 1] + 1;
  }
  if (a.is_zero()) a.add(std::vector<int>(idx.begin(), idx.end()), Expr(1.0));
  return a;
}

SimplexMap random_simplex(Rng& rng, const Chart& chart, int k, bool curved, double radius) {
  std::uniform_int_distribution<int> pt(-4, 4), small(-3, 3), var(0, std::max(k - 1, 0));
  std::vector<std::vector<double>> verts(k + 1, std::vector<double>(chart.n));
  for (int l = 0; l < chart.n; ++l) {
    if (chart.is_leaf(l)) {
      for (int v = 0; v <= k; ++v) verts[v][l] = radius * pt(rng) / 4.0;
    } else {
      const double c = radius * pt(rng) / 4.0;
      for (int v = 0; v <= k; ++v) verts[v][l] = c;
    }
  }
  SimplexMap aff = SimplexMap::affine(chart, verts);
  if (!curved || k == 0) return aff;
  std::vector<Expr> comps = aff.components();
  for (int l = 0; l < chart.leaf_dim(); ++l) {
    // bend that keeps the vertices fixed: t_i (t_i - 1) t_j ... style terms
    Expr ti = Expr::var(var(rng));
    Expr bend = ti * (ti - Expr(1.0));
    const int extra = std::uniform_int_distribution<int>(0, 1)(rng);
    if (extra) bend = bend * Expr::var(var(rng));
    comps[l] = comps[l] + Expr(radius * small(rng) / 6.0) * bend;
  }
  return SimplexMap(chart, k, comps);
}

BarWord random_word(Rng& rng, const Chart& chart, const std::vector<int>& degrees) {
  BarWord w;
  for (int d : degrees) w.push_back(random_form(rng, chart, d));
  return w;
}

}  // namespace folia
