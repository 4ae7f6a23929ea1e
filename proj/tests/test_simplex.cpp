#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "folia/chen.hpp"
#include "folia/family.hpp"
#include "folia/simplex.hpp"

using namespace folia;

namespace {

std::vector<double> random_ordered(std::mt19937_64& rng, int k) {
  std::uniform_real_distribution<double> U(0, 1);
  std::vector<double> t(k);
  for (auto& v : t) v = U(rng);
  std::sort(t.begin(), t.end(), std::greater<>());
  return t;
}

void check_vec(const std::vector<double>& a, const std::vector<double>& b, double tol = 1e-14) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(tol));
}

}  // namespace

TEST_CASE("cofaces and codegeneracies") {
  check_vec(coface(0, std::vector<double>{0.5}), {1.0, 0.5});
  check_vec(coface(2, std::vector<double>{0.8, 0.3}), {0.8, 0.3, 0.3});
  check_vec(coface(1, std::vector<double>{}), {0.0});
  check_vec(codegeneracy(1, std::vector<double>{0.9, 0.2}), {0.2});
  check_vec(codegeneracy(2, std::vector<double>{0.9, 0.2}), {0.9});

  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 1 + trial % 4;
    auto t = random_ordered(rng, k);
    for (int i = 1; i <= k; ++i) {
      check_vec(codegeneracy(i, coface(i, t)), t);
      check_vec(codegeneracy(i + 1, coface(i, t)), t);
    }
  }
}

TEST_CASE("coface i misses vertex i") {
  for (int k = 0; k <= 3; ++k)
    for (int i = 0; i <= k + 1; ++i) {
      int hit = 0;
      for (int v = 0; v <= k; ++v) {
        auto img = coface(i, simplex_vertex(v, k));
        for (int w = 0; w <= k + 1; ++w)
          if (img == simplex_vertex(w, k + 1)) {
            CHECK(w != i);
            ++hit;
          }
      }
      CHECK(hit == k + 1);
    }
}

TEST_CASE("retraction onto the ordered simplex") {
  check_vec(retraction(std::vector<double>{0.3, 0.7}), {0.7, 0.7});
  check_vec(retraction(std::vector<double>{0.7, 0.3}), {0.7, 0.3});
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    auto t = random_ordered(rng, 1 + trial % 5);
    check_vec(retraction(t), t);
  }
}

TEST_CASE("lambda paths") {
  PiecewisePath p1 = lambda_path({});
  check_vec(p1.eval(0.0), {1.0});
  check_vec(p1.eval(1.0), {0.0});

  std::vector<double> w0{0.0};
  PiecewisePath p2 = lambda_path(w0);
  check_vec(p2.eval(0.0), {0.0, 1.0});
  check_vec(p2.eval(0.5), {0.0, 0.0});
  check_vec(p2.eval(1.0), {0.0, 0.0});

  std::vector<double> w{0.5, 0.25};
  PiecewisePath p3 = lambda_path(w);
  check_vec(p3.eval(0.0), {0.5, 0.25, 1.0});
  check_vec(p3.eval(1.0 / 3), {0.5, 0.25, 0.0});
  check_vec(p3.eval(2.0 / 3), {0.5, 0.0, 0.0});
  check_vec(p3.eval(1.0), {0.0, 0.0, 0.0});
}

TEST_CASE("theta paths run from vertex k to vertex 0") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 1 + trial % 4;
    std::vector<double> w(k - 1);
    for (auto& v : w) v = U(rng);
    PiecewisePath p = theta_path(w);
    check_vec(p.eval(0.0), simplex_vertex(k, k));
    check_vec(p.eval(1.0), simplex_vertex(0, k));
    // every point lies in the ordered simplex
    for (double u : {0.1, 0.37, 0.5, 0.81}) {
      auto t = p.eval(u);
      for (int i = 0; i + 1 < k; ++i) CHECK(t[i] >= t[i + 1] - 1e-15);
    }
  }
}

TEST_CASE("theta pullback identity on the standard simplex") {
  QuadratureRule rule{8, 2};
  // alpha = t1 dt1 ^ ... ^ dtk, int_Delta alpha = int t1 * t1^{k-1}/(k-1)! = 1/((k+1)(k-1)!)
  for (int k = 1; k <= 3; ++k) {
    Chart ch(k, 0);
    std::vector<int> idx;
    std::vector<Expr> id;
    for (int i = 0; i < k; ++i) {
      idx.push_back(i);
      id.push_back(Expr::var(i));
    }
    LeafForm a = LeafForm::monomial(ch, idx, Expr::var(0));
    double fact = 1;
    for (int i = 2; i < k; ++i) fact *= i;
    const double exact = 1.0 / ((k + 1) * fact);
    const double sign = (k % 2) ? -1.0 : 1.0;
    CHECK(chen_eval({a}, SimplexMap(ch, k, id), rule) == doctest::Approx(sign * exact).epsilon(1e-12));
  }
  // k = 1: dt integrates to -1
  Chart c1(1, 0);
  CHECK(chen_eval({LeafForm::monomial(c1, {0}, Expr(1.0))}, SimplexMap(c1, 1, {Expr::var(0)}), rule) ==
        doctest::Approx(-1.0));
}

TEST_CASE("front and back faces") {
  Chart ch(2, 0);
  SimplexMap s(ch, 2, {Expr::var(0) * Expr::var(0) + Expr::var(1), Expr::var(0) - Expr(3.0) * Expr::var(1)});
  SimplexMap v2 = s.front(2);
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    auto t = random_ordered(rng, 2);
    check_vec(v2.eval(t), s.eval(t));
    std::vector<double> t1{t[0]};
    check_vec(s.front(1).eval(t1), s.eval(std::vector<double>{t[0], 0.0}));
    check_vec(s.back(1).eval(t1), s.eval(std::vector<double>{1.0, t[0]}));
  }
  SimplexMap u0 = s.back(0);
  CHECK(u0.dim() == 0);
  check_vec(u0.vertex(0), s.vertex(2));
}

TEST_CASE("concatenation of paths") {
  PiecewisePath th = theta_path({});
  std::vector<double> w{0.4};
  PiecewisePath th2 = theta_path(w);
  // i = k gives alpha, i = 0 gives beta
  const PiecewisePath pt(0, {{0.0, 1.0, {}}});
  PiecewisePath a = concat_mu(2, th2, pt);
  PiecewisePath b = concat_mu(0, pt, th2);
  for (double u : {0.0, 0.2, 0.5, 0.77, 1.0}) {
    check_vec(a.eval(u), th2.eval(u));
    check_vec(b.eval(u), th2.eval(u));
  }
  // continuity at the junction
  PiecewisePath m = concat_mu(1, th, th);
  for (double eps : {1e-3, 1e-6, 1e-9}) {
    auto l = m.eval(0.5 - eps), r = m.eval(0.5 + eps);
    double d = 0;
    for (std::size_t i = 0; i < l.size(); ++i) d = std::max(d, std::abs(l[i] - r[i]));
    CHECK(d <= 10 * eps);
  }
  check_vec(m.eval(0.0), simplex_vertex(2, 2));
  check_vec(m.eval(1.0), simplex_vertex(0, 2));
}

TEST_CASE("omega reparametrisation") {
  std::vector<double> w{0.6};
  PiecewisePath g = theta_path(w);
  for (int k = 2; k <= 4; ++k)
    for (int j = 1; j <= k; ++j) {
      PiecewisePath o = omega_reparam(j, k, g);
      check_vec(o.eval((j - 0.5) / k), g.eval((j - 1.0) / (k - 1)));
      // the image is sampled from the image of g
      for (double u : {0.05, 0.3, 0.55, 0.9}) {
        auto p = o.eval(u);
        double best = 1e9;
        for (int s = 0; s <= 4000; ++s) {
          auto q = g.eval(s / 4000.0);
          best = std::min(best, std::hypot(p[0] - q[0], p[1] - q[1]));
        }
        CHECK(best < 1e-3);
      }
    }
}

TEST_CASE("simplex quadrature against closed forms") {
  QuadratureRule rule{8, 2};
  CHECK(integrate_simplex([](std::span<const double>) { return 1.0; }, 1, rule) == doctest::Approx(1.0));
  CHECK(integrate_simplex([](std::span<const double>) { return 1.0; }, 2, rule) == doctest::Approx(0.5));
  // ordered monomial t1^a t2^b t3^c: 1 / ((c+1)(b+c+2)(a+b+c+3))
  for (int a = 0; a <= 3; ++a)
    for (int b = 0; b <= 2; ++b)
      for (int cc = 0; cc <= 2; ++cc) {
        const double exact = 1.0 / ((cc + 1.0) * (b + cc + 2.0) * (a + b + cc + 3.0));
        double v = integrate_simplex(
            [&](std::span<const double> t) {
              return std::pow(t[0], a) * std::pow(t[1], b) * std::pow(t[2], cc);
            },
            3, rule);
        CHECK(v == doctest::Approx(exact).epsilon(1e-13));
      }
  // Dirichlet: barycentric monomial l1 l2 l3 integrates to 1!1!1!/6! on Delta^3
  double v = integrate_simplex(
      [](std::span<const double> t) { return (t[0] - t[1]) * (t[1] - t[2]) * t[2]; }, 3, rule);
  CHECK(v == doctest::Approx(1.0 / 720).epsilon(1e-13));
}

TEST_CASE("piecewise cube quadrature") {
  QuadratureRule rule{8, 0};
  CHECK(integrate_cube_piecewise([](std::span<const double>) { return 1.0; }, 3, rule) == doctest::Approx(1.0));
  double v = integrate_cube_piecewise([](std::span<const double> x) { return std::abs(x[0] - x[1]); }, 2, rule);
  CHECK(std::abs(v - 1.0 / 3) <= 1e-12);
  double m = integrate_cube_piecewise(
      [](std::span<const double> x) { return std::max({x[0], x[1], x[2]}); }, 3, rule);
  CHECK(std::abs(m - 0.75) <= 1e-12);
}

TEST_CASE("Gauss-Legendre rule integrates polynomials of degree 2n-1 exactly") {
  for (int n = 1; n <= 12; ++n) {
    const GaussRule& g = gauss_legendre(n);
    for (int d = 0; d < 2 * n; ++d) {
      double s = 0;
      for (int i = 0; i < n; ++i) s += g.weights[i] * std::pow(g.nodes[i], d);
      CHECK(s == doctest::Approx(1.0 / (d + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("default rule honours the environment") {
  setenv("FOLIA_GAUSS_ORDER", "5", 1);
  CHECK(default_rule().order == 5);
  unsetenv("FOLIA_GAUSS_ORDER");
  CHECK(default_rule().order == QuadratureRule{}.order);
}
