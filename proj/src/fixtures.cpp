#include "folia/fixtures.hpp"

#include <cmath>

namespace folia {

ZConnection gauge_connection(const Chart& chart, const GradedVectorSpace& space, const std::vector<Expr>& g,
                             const std::vector<Expr>& g_inv) {
  const int d = space.dim();
  if (static_cast<int>(g.size()) != d * d || static_cast<int>(g_inv.size()) != d * d)
    throw ConfigError("gauge matrices must be " + std::to_string(d) + "x" + std::to_string(d));
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      Expr prod;
      for (int c = 0; c < d; ++c) prod = prod + g[a * d + c] * g_inv[c * d + b];
      if (!numerically_equal(prod, Expr(a == b ? 1.0 : 0.0), chart.n))
        throw ConfigError("g_inv is not the inverse of g");
    }
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      if (space.degrees[a] != space.degrees[b] && !g[a * d + b].is_zero())
        throw ConfigError("gauge matrix must preserve degrees");
  EndValuedForm A(chart, space, 0, 1);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      LeafForm f(chart, 1);
      for (int l = 0; l < chart.leaf_dim(); ++l) {
        Expr c;
        for (int m = 0; m < d; ++m) c = c + g[a * d + m].diff(l) * g_inv[m * d + b];
        if (!c.is_zero()) f.add({l}, c);
      }
      if (!f.is_zero()) A.set(a, b, f);
    }
  return ZConnection(chart, space, {EndValuedForm(chart, space, 1, 0), A});
}

ZConnection abelian_fixture(double c) {
  Chart ch(1, 0);
  GradedVectorSpace V{{0}};
  EndValuedForm A(ch, V, 0, 1);
  A.set(0, 0, LeafForm::monomial(ch, {0}, Expr(c)));
  return ZConnection(ch, V, {EndValuedForm(ch, V, 1, 0), A});
}

ZConnection gauge_fixture() {
  Chart ch(2, 0);
  const Expr x1 = Expr::var(0), x2 = Expr::var(1), one(1.0);
  std::vector<Expr> g{one, x1, x2, one + x1 * x2};
  std::vector<Expr> g_inv{one + x1 * x2, -x1, -x2, one};
  return gauge_connection(ch, GradedVectorSpace{{0, 0}}, g, g_inv);
}

ZConnection curved_fixture() {
  Chart ch(2, 0);
  GradedVectorSpace V{{0, 0}};
  EndValuedForm A(ch, V, 0, 1);
  A.set(0, 1, LeafForm::monomial(ch, {0}, Expr(1.0)));
  A.set(1, 0, LeafForm::monomial(ch, {1}, Expr(1.0)));
  return ZConnection(ch, V, {EndValuedForm(ch, V, 1, 0), A});
}

ZConnection graded_fixture() {
  Chart ch(2, 0);
  GradedVectorSpace V{{0, 1}};
  const Expr x1 = Expr::var(0);
  EndValuedForm A0(ch, V, 1, 0), A1(ch, V, 0, 1), A2(ch, V, -1, 2);
  A0.set(1, 0, LeafForm::function(ch, exp(x1)));
  A1.set(0, 0, LeafForm::monomial(ch, {1}, x1));
  A1.set(1, 1, LeafForm::monomial(ch, {1}, x1) + LeafForm::monomial(ch, {0}, Expr(1.0)));
  A2.set(0, 1, LeafForm::monomial(ch, {0, 1}, exp(-x1)));
  return ZConnection(ch, V, {A0, A1, A2});
}

namespace {

// Inhomogeneous End(V)-valued forms of fixed total degree, indexed by form degree.
using Total = std::vector<EndValuedForm>;

Total total_zero(const Chart& ch, const GradedVectorSpace& V, int tdeg) {
  Total t;
  for (int r = 0; r <= ch.leaf_dim(); ++r) t.emplace_back(ch, V, tdeg - r, r);
  return t;
}

Total total_mul(const Total& a, const Total& b, const Chart& ch, const GradedVectorSpace& V, int tdeg) {
  Total out = total_zero(ch, V, tdeg);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; i + j < out.size(); ++j) out[i + j] = out[i + j] + endo_compose(a[i], b[j]);
  return out;
}

Total total_axpy(const Total& a, const Total& b, double cb) {
  Total o = a;
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = o[i] + b[i].scaled(cb);
  return o;
}

// h of total degree 0 with h^3 = 0 on degrees (0, 1, 2).
Total gauged_h(const Chart& ch, const GradedVectorSpace& V) {
  const Expr x1 = Expr::var(0), x2 = Expr::var(1), x3 = Expr::var(2);
  Total h = total_zero(ch, V, 0);
  h[1].set(0, 1, LeafForm::monomial(ch, {2}, x1) + LeafForm::monomial(ch, {0}, x2 * x3));
  h[1].set(1, 2, LeafForm::monomial(ch, {1}, x3 + Expr(1.0)));
  h[2].set(0, 2, LeafForm::monomial(ch, {0, 1}, x3 * x3) + LeafForm::monomial(ch, {1, 2}, x1));
  return h;
}

Total total_one(const Chart& ch, const GradedVectorSpace& V) {
  Total one = total_zero(ch, V, 0);
  for (int a = 0; a < V.dim(); ++a) one[0].set(a, a, LeafForm::function(ch, Expr(1.0)));
  return one;
}

const Chart kGaugedChart(3, 0);
const GradedVectorSpace kGaugedSpace{{0, 1, 2}};

}  // namespace

ZConnection gauged_source() {
  EndValuedForm a0(kGaugedChart, kGaugedSpace, 1, 0);
  a0.set(1, 0, LeafForm::function(kGaugedChart, Expr(1.0)));
  return ZConnection(kGaugedChart, kGaugedSpace, {a0});
}

ZConnection gauged_fixture() {
  const Chart& ch = kGaugedChart;
  const GradedVectorSpace& V = kGaugedSpace;
  const Total one = total_one(ch, V), h = gauged_h(ch, V);
  Total a0 = total_zero(ch, V, 1);
  a0[0] = gauged_source().component(0);
  const Total g = total_axpy(one, h, 1.0);
  const Total g_inv = total_axpy(total_axpy(one, h, -1.0), total_mul(h, h, ch, V, 0), 1.0);
  Total d_g_inv = total_zero(ch, V, 1);
  for (std::size_t r = 0; r + 1 < g_inv.size(); ++r) d_g_inv[r + 1] = endo_d(g_inv[r]);
  // d - A' = g (d - A_0) g^{-1}
  Total A = total_axpy(total_mul(total_mul(g, a0, ch, V, 1), g_inv, ch, V, 1), total_mul(g, d_g_inv, ch, V, 1), -1.0);
  return ZConnection(ch, V, A);
}

std::vector<MorphismBlock> gauged_morphism() {
  const Chart& ch = kGaugedChart;
  const GradedVectorSpace& V = kGaugedSpace;
  const Total g = total_axpy(total_one(ch, V), gauged_h(ch, V), 1.0);
  const int d = V.dim();
  std::vector<MorphismBlock> out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    MorphismBlock b{static_cast<int>(i), d, d, {}};
    for (int a = 0; a < d; ++a)
      for (int c = 0; c < d; ++c) b.entries.push_back(g[i].at(a, c).scaled(Expr(i % 2 ? -1.0 : 1.0)));
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace folia
