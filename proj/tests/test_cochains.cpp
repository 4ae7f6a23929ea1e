#include <doctest.h>

#include <cmath>
#include <random>

#include "folia/cochains.hpp"

using namespace folia;

namespace {

// A curved k-simplex in the leaf R^2 (no transverse directions).
SimplexMap bent(const Chart& ch, int k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1, 1);
  std::vector<Expr> comps;
  for (int d = 0; d < ch.n; ++d) {
    Expr e(U(rng));
    for (int i = 0; i < k; ++i) e = e + Expr(U(rng)) * Expr::var(i) + Expr(0.3 * U(rng)) * Expr::var(i) * Expr::var(i);
    comps.push_back(e);
  }
  return SimplexMap(ch, k, comps);
}

// Nonlinear scalar cochain of degree k sampling sigma at a few interior points.
Cochain probe(int k, double a) {
  return Cochain{k, 1, 1, [k, a](const SimplexMap& s) {
                   std::vector<double> t(k);
                   for (int i = 0; i < k; ++i) t[i] = (k - i) / (k + 1.5);
                   auto x = s.eval(t);
                   double v = std::sin(a * x[0]) + x[1] * x[1] * a;
                   for (int i = 0; i <= k; ++i) v += (i + a) * s.vertex(i)[0];
                   Eigen::MatrixXd m(1, 1);
                   m(0, 0) = v;
                   return m;
                 }};
}

Eigen::MatrixXd mat(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

}  // namespace

TEST_CASE("coboundary of a constant 0-cochain vanishes") {
  Chart ch(2, 0);
  std::mt19937_64 rng(11);
  Cochain c = Cochain::constant(0, 2.5);
  for (int trial = 0; trial < 5; ++trial) CHECK(delta(c).scalar(bent(ch, 1, rng)) == doctest::Approx(0.0));
}

TEST_CASE("delta squared is zero") {
  Chart ch(2, 0);
  std::mt19937_64 rng(12);
  for (int k = 0; k <= 2; ++k) {
    Cochain dd = delta(delta(probe(k, 0.7 + k)));
    for (int trial = 0; trial < 5; ++trial) CHECK(std::abs(dd.scalar(bent(ch, k + 2, rng))) <= 1e-12);
  }
}

TEST_CASE("cup product") {
  Chart ch(2, 0);
  std::mt19937_64 rng(13);
  Cochain one = Cochain::constant(0, 1.0);
  Cochain a = probe(1, 0.4), b = probe(1, 1.3), c = probe(0, 2.1);
  for (int trial = 0; trial < 5; ++trial) {
    SimplexMap s1 = bent(ch, 1, rng), s2 = bent(ch, 2, rng), s3 = bent(ch, 3, rng);
    CHECK(cup(one, a).scalar(s1) == doctest::Approx(a.scalar(s1)));
    CHECK(cup(a, one).scalar(s1) == doctest::Approx(a.scalar(s1)));
    CHECK(cup(cup(a, b), c).scalar(s2) == doctest::Approx(cup(a, cup(b, c)).scalar(s2)));
    // direct definition on the front and back faces
    CHECK(cup(a, b).scalar(s2) == doctest::Approx(a.scalar(s2.front(1)) * b.scalar(s2.back(1))));
    // Leibniz: delta(a u b) = delta a u b - a u delta b
    const double lhs = delta(cup(a, b)).scalar(s3);
    const double rhs = cup(delta(a), b).scalar(s3) - cup(a, delta(b)).scalar(s3);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("normalisation detects degenerate support") {
  Chart ch(2, 0);
  std::mt19937_64 rng(14);
  std::vector<SimplexMap> pts, segs;
  for (int i = 0; i < 4; ++i) {
    pts.push_back(bent(ch, 0, rng));
    segs.push_back(bent(ch, 1, rng));
  }
  double worst = 0;
  CHECK_FALSE(normalized_check(Cochain::constant(1, 1.0), pts, 1e-9, &worst));
  CHECK(worst == doctest::Approx(1.0));
  CHECK(normalized_check(Cochain::zero(1), pts));
  // the difference of endpoints is normalised; adding the midpoint value is not
  Cochain ends{1, 1, 1, [](const SimplexMap& s) { return mat(s.vertex(0)[0] - s.vertex(1)[0]); }};
  Cochain mid{1, 1, 1, [](const SimplexMap& s) { return mat(s.eval(std::vector<double>{0.5})[1]); }};
  CHECK(normalized_check(ends, pts));
  CHECK(degenerate_value(mid, pts) > 1e-3);
  // degree 2: degenerations of 1-simplices
  CHECK(normalized_check(cup(ends, ends), segs));
}

TEST_CASE("cone construction") {
  Chart ch(3, 1);
  SimplexMap s(ch, 1, {Expr(0.5) + Expr::var(0), Expr(-0.2) * Expr::var(0), Expr(0.8)});
  SimplexMap c = cone_simplex(s);
  CHECK(c.dim() == 2);
  auto p = c.vertex(0);
  CHECK(p[0] == doctest::Approx(0.0));
  CHECK(p[1] == doctest::Approx(0.0));
  CHECK(p[2] == doctest::Approx(0.8));
  for (double t : {0.0, 0.3, 1.0}) {
    auto a = c.face(0).eval(std::vector<double>{t});
    auto b = s.eval(std::vector<double>{t});
    for (int d = 0; d < 3; ++d) CHECK(a[d] == doctest::Approx(b[d]));
  }
}

TEST_CASE("homotopy operator") {
  Chart ch(2, 0);
  // phi(sigma) = x1(v0) - x1(v1); L phi at the point x is phi(segment p -> x) = -x1
  Cochain ends{1, 1, 1, [](const SimplexMap& s) { return mat(s.vertex(0)[0] - s.vertex(1)[0]); }};
  std::vector<double> x{0.7, -0.4};
  SimplexMap pt = SimplexMap::constant(ch, x);
  CHECK(homotopy_L(ends).scalar(pt) == doctest::Approx(-0.7));

  std::mt19937_64 rng(15);
  for (int k = 0; k <= 2; ++k)
    for (int trial = 0; trial < 4; ++trial)
      CHECK(std::abs(homotopy_L_residual(probe(k, 0.9 + k), bent(ch, k, rng))) <= 1e-12);
}

TEST_CASE("hat delta and the MC residual") {
  Chart ch(2, 0);
  std::mt19937_64 rng(16);
  Eigen::Matrix2d E0;
  E0 << 0, 0, 1, 0;
  Eigen::Matrix2d M;
  M << 1, 2, 3, 4;
  InfinityLocalSystem F;
  F.space = {{0, 0}};
  F.F0 = [&](std::span<const double>) -> Eigen::MatrixXd { return E0; };
  F.F = [&](const SimplexMap& s) -> Eigen::MatrixXd {
    return s.dim() == 1 ? Eigen::MatrixXd(M * (1 + s.vertex(0)[0])) : Eigen::MatrixXd::Zero(2, 2);
  };
  SimplexMap s1 = bent(ch, 1, rng);
  const Eigen::MatrixXd Fs = F.F(s1);
  CHECK((hat_delta(F, s1, McVariant::Commutator) - (E0 * Fs - Fs * E0)).norm() <= 1e-14);
  CHECK((hat_delta(F, s1, McVariant::Verbatim) - (E0 * Fs + Fs * E0)).norm() <= 1e-14);

  SimplexMap s2 = bent(ch, 2, rng);
  const Eigen::MatrixXd face = F.F(s2.face(1));
  CHECK((hat_delta(F, s2, McVariant::Commutator) - face).norm() <= 1e-14);
  const Eigen::MatrixXd expect = face - F.F(s2.front(1)) * F.F(s2.back(1));
  CHECK((mc_residual(F, s2, McVariant::Commutator) - expect).norm() <= 1e-13);
  CHECK(mc_residual(F, s2, McVariant::Commutator).norm() > 1e-2);

  // constant idempotent F_1 with E0 = 0 solves the equation
  Eigen::Matrix2d P;
  P << 1, 0, 0, 0;
  InfinityLocalSystem G;
  G.space = {{0, 0}};
  G.F0 = [](std::span<const double>) -> Eigen::MatrixXd { return Eigen::MatrixXd::Zero(2, 2); };
  G.F = [&](const SimplexMap& s) -> Eigen::MatrixXd {
    return s.dim() == 1 ? Eigen::MatrixXd(P) : Eigen::MatrixXd::Zero(2, 2);
  };
  for (int k = 1; k <= 3; ++k) CHECK(mc_residual(G, bent(ch, k, rng), McVariant::Commutator).norm() <= 1e-14);
}
