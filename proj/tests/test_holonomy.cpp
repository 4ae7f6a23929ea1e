#include <doctest.h>

#include <cmath>

#include "folia/ainfty.hpp"
#include "folia/fixtures.hpp"
#include "folia/holonomy.hpp"

using namespace folia;

namespace {

const QuadratureRule kRule{10, 1};

// Scaling and squaring with a Taylor polynomial.
Eigen::MatrixXd expm(const Eigen::MatrixXd& a) {
  int s = 0;
  double n = a.lpNorm<Eigen::Infinity>();
  while (n > 0.5) {
    n /= 2;
    ++s;
  }
  const Eigen::MatrixXd b = a / std::pow(2.0, s);
  Eigen::MatrixXd sum = Eigen::MatrixXd::Identity(a.rows(), a.cols()), term = sum;
  for (int p = 1; p < 25; ++p) {
    term = term * b / p;
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

// d - C dx1 on R^1 with a constant matrix C.
ZConnection constant_connection(const Eigen::MatrixXd& C) {
  Chart ch(1, 0);
  GradedVectorSpace V{std::vector<int>(C.rows(), 0)};
  EndValuedForm a0(ch, V, 1, 0), a1(ch, V, 0, 1);
  for (int r = 0; r < C.rows(); ++r)
    for (int c = 0; c < C.cols(); ++c)
      if (C(r, c) != 0) a1.set(r, c, LeafForm::monomial(ch, {0}, Expr(C(r, c))));
  return ZConnection(ch, V, {a0, a1});
}

SinglePath unit_segment() {
  Chart ch(1, 0);
  return SinglePath(ch, theta_path({}).map(std::vector<Expr>{Expr::var(0)}, 1));
}

MorphismBlock block(const Chart& ch, int deg, int rows, int cols) {
  return MorphismBlock{deg, rows, cols, std::vector<LeafForm>(rows * cols, LeafForm(ch, deg))};
}

double simpson(const std::function<double(double)>& f, int n = 2000) {
  const double h = 1.0 / n;
  double s = f(0) + f(1);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4 : 2) * f(i * h);
  return s * h / 3;
}

}  // namespace

TEST_CASE("holonomy terms of a constant connection") {
  Eigen::MatrixXd C(2, 2);
  C << 0.3, -0.5, 0.8, 0.1;
  ZConnection A = constant_connection(C);
  SinglePath path = unit_segment();  // runs from 1 to 0, so A_1(gamma') = -C
  CHECK(psi_p(A, path, 0, kRule).isApprox(Eigen::MatrixXd::Identity(2, 2)));
  CHECK((psi_p(A, path, 1, kRule) + C).norm() <= 1e-13);
  CHECK((psi_p(A, path, 2, kRule) - C * C / 2).norm() <= 1e-13);
  CHECK((psi_p(A, path, 3, kRule) + C * C * C / 6).norm() <= 1e-13);
  HolonomySeries ser = psi_series(A, path, 30, kRule);
  CHECK((ser.sum - expm(-C)).norm() <= 1e-12);
  CHECK(ser.length == doctest::Approx(1.0));
  CHECK(ser.sup_norm == doctest::Approx(C.operatorNorm()).epsilon(1e-10));
  CHECK(ser.envelope <= 1e-10);
}

TEST_CASE("nilpotent connections terminate") {
  Eigen::MatrixXd N = Eigen::MatrixXd::Zero(3, 3);
  N(0, 1) = 2.0;
  N(1, 2) = -1.5;
  ZConnection A = constant_connection(N);
  SinglePath path = unit_segment();
  CHECK(psi_p(A, path, 3, kRule).norm() <= 1e-15);
  CHECK(psi_p(A, path, 4, kRule).norm() <= 1e-15);
  CHECK((psi_series(A, path, 30, kRule).sum - expm(-N)).norm() <= 1e-13);
}

TEST_CASE("the zero connection") {
  ZConnection A = constant_connection(Eigen::MatrixXd::Zero(2, 2));
  CHECK(psi_series(A, unit_segment(), 30, kRule).sum.isApprox(Eigen::MatrixXd::Identity(2, 2)));
  Chart ch(1, 0);
  CHECK(psi_k_simplex(A, SimplexMap(ch, 1, {Expr::var(0)}), kRule).isApprox(Eigen::MatrixXd::Identity(2, 2)));
  CHECK(ode_transport_oracle(A.component(1), unit_segment(), 1e-2).isApprox(Eigen::MatrixXd::Identity(2, 2)));
}

TEST_CASE("abelian transport and the ODE oracle") {
  ZConnection A = abelian_fixture(-1.0);
  SinglePath path = unit_segment();
  CHECK(psi_series(A, path, 30, kRule).sum(0, 0) == doctest::Approx(std::exp(1.0)).epsilon(1e-10));
  CHECK(ode_transport_oracle(A.component(1), path, 1e-3)(0, 0) == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
}

TEST_CASE("gauge trivial transport is g(end) g(start)^-1") {
  ZConnection A = gauge_fixture();
  Rng rng(41);
  auto g = [](const std::vector<double>& x) {
    Eigen::Matrix2d m;
    m << 1, x[0], x[1], 1 + x[0] * x[1];
    return m;
  };
  for (int trial = 0; trial < 4; ++trial) {
    SimplexMap s = random_simplex(rng, A.chart(), 1, true, 0.5);
    SinglePath path(A.chart(), theta_path({}).map(s.components(), 2));
    const Eigen::MatrixXd exact = g(s.vertex(0)) * g(s.vertex(1)).inverse();
    CHECK((psi_series(A, path, 30, kRule).sum - exact).norm() <= 1e-10);
    CHECK((ode_transport_oracle(A.component(1), path, 1e-3) - exact).norm() <= 1e-9);
  }
}

TEST_CASE("psi_0 is the fibre differential") {
  ZConnection A = graded_fixture();
  std::vector<double> x{0.4, -0.2};
  Eigen::MatrixXd p = psi_k_simplex(A, SimplexMap::constant(A.chart(), x), kRule);
  CHECK(p(1, 0) == doctest::Approx(std::exp(0.4)));
  CHECK(p(0, 1) == 0.0);
  CHECK((p - fiber_differential(A, x)).norm() == 0.0);
}

TEST_CASE("series stays below the envelope") {
  Rng rng(42);
  for (const auto& A : {gauge_fixture(), graded_fixture(), curved_fixture()}) {
    ThetaFamily fam(random_simplex(rng, A.chart(), 2, true, 0.5));
    HolonomySeries ser = psi_series(A, fam, 30, kRule, 0.0, false);
    CHECK(ser.p_used == 30);
    for (int p = 0; p <= 30; ++p) CHECK(ser.terms[p].operatorNorm() <= ser.bound(p) * (1 + 1e-12) + 1e-300);
  }
}

TEST_CASE("non-convergence raises a numerical error") {
  Eigen::MatrixXd C = 40.0 * Eigen::MatrixXd::Identity(1, 1);
  CHECK_THROWS_AS(psi_series(constant_connection(C), unit_segment(), 5, kRule), NumericalError);
}

TEST_CASE("holonomy of a concatenation is the product") {
  ZConnection A = gauge_fixture();
  Rng rng(43);
  for (int trial = 0; trial < 3; ++trial) {
    SimplexMap tau = random_simplex(rng, A.chart(), 2, true, 0.5);
    const PiecewisePath th = theta_path({});
    SinglePath mu(A.chart(), concat_mu(1, th, th).map(tau.components(), 2));
    const Eigen::MatrixXd lhs = psi_series(A, mu, 30, kRule).sum;
    const Eigen::MatrixXd rhs = psi_k_simplex(A, tau.front(1), kRule) * psi_k_simplex(A, tau.back(1), kRule);
    CHECK((lhs - rhs).norm() <= 1e-10);
  }
}

TEST_CASE("RH_0 of flat connections solves the MC equation") {
  Rng rng(44);
  for (const auto& A : {gauge_fixture(), graded_fixture()}) {
    InfinityLocalSystem F = rh0(A, kRule);
    for (int k = 1; k <= 2; ++k)
      CHECK(mc_residual(F, random_simplex(rng, A.chart(), k, true, 0.4), McVariant::Commutator).norm() <= 1e-8);
  }
  InfinityLocalSystem C = rh0(curved_fixture(), kRule);
  CHECK(mc_residual(C, random_simplex(rng, curved_fixture().chart(), 2, true, 0.5), McVariant::Commutator).norm() >
        1e-3);
}

TEST_CASE("shifting the degrees twists psi_2 by (-1)^m") {
  ZConnection A = graded_fixture();
  Rng rng(45);
  SimplexMap s = random_simplex(rng, A.chart(), 2, true, 0.5);
  const Eigen::MatrixXd p = psi_k_simplex(A, s, kRule);
  CHECK((psi_k_simplex(shift(A, 1), s, kRule) + p).norm() <= 1e-12);
  CHECK((psi_k_simplex(shift(A, 2), s, kRule) - p).norm() <= 1e-12);
}

TEST_CASE("cone of a morphism") {
  ZConnection A = gauge_fixture();
  const Chart& ch = A.chart();
  Rng rng(46);
  SimplexMap s1 = random_simplex(rng, ch, 1, true, 0.4), s2 = random_simplex(rng, ch, 2, true, 0.4);

  // e = 0: the cone splits
  ConeConnection zero = cone({block(ch, 0, 2, 2)}, A, A);
  CHECK(flatness_defect_norm(zero.cone) <= 1e-12);
  CHECK(rh1(zero, s1, kRule).norm() == 0.0);
  CHECK(rh1_chain_residual(zero, s2, kRule).norm() <= 1e-10);

  // e = identity is closed
  MorphismBlock id = block(ch, 0, 2, 2);
  id.entries[0] = id.entries[3] = LeafForm::function(ch, Expr(1.0));
  ConeConnection ci = cone({id}, A, A);
  CHECK(flatness_defect_norm(ci.cone) <= 1e-10);
  // with all degrees zero the off-diagonal block has degree one, so it only
  // appears at points
  CHECK(rh1(ci, SimplexMap::constant(ch, s1.vertex(0)), kRule).isApprox(Eigen::MatrixXd::Identity(2, 2)));
  CHECK(rh1(ci, s1, kRule).norm() == 0.0);
  for (const auto& s : {s1, s2}) CHECK(rh1_chain_residual(ci, s, kRule).norm() <= 1e-9);

  ZConnection G = graded_fixture();
  MorphismBlock gid = block(G.chart(), 0, 2, 2);
  gid.entries[0] = gid.entries[3] = LeafForm::function(G.chart(), Expr(1.0));
  ConeConnection cg = cone({gid}, G, G);
  SimplexMap g1 = random_simplex(rng, G.chart(), 1, true, 0.4), g2 = random_simplex(rng, G.chart(), 2, true, 0.4);
  CHECK(flatness_defect_norm(cg.cone) <= 1e-10);
  // the identity has no higher components, so its image is strict
  CHECK(rh1(cg, g1, kRule).norm() == 0.0);
  for (const auto& s : {g1, g2}) CHECK(rh1_chain_residual(cg, s, kRule).norm() <= 1e-9);

  ConeConnection gm = cone(gauged_morphism(), gauged_source(), gauged_fixture());
  CHECK(flatness_defect_norm(gm.cone) <= 1e-10);
  Rng r3(47);
  SimplexMap h1 = random_simplex(r3, gm.cone.chart(), 1, true, 0.4);
  SimplexMap h2 = random_simplex(r3, gm.cone.chart(), 2, true, 0.4);
  CHECK(rh1(gm, h1, kRule).norm() > 1e-3);
  CHECK(rh1_chain_residual(gm, h1, kRule).norm() <= 1e-9);
  CHECK(rh1_chain_residual(gm, h2, kRule).norm() <= 1e-9);

  // a generic e_0 is not closed
  MorphismBlock r = block(ch, 0, 2, 2);
  for (auto& f : r.entries) f = LeafForm::function(ch, random_polynomial(rng, 2, 2, 2));
  ConeConnection cr = cone({r}, A, A);
  CHECK(flatness_defect_norm(cr.cone) > 1e-3);
  CHECK(rh1_chain_residual(cr, s1, kRule).norm() > 1e-4);

  // entries of the wrong degree are rejected
  MorphismBlock bad = block(ch, 1, 2, 2);
  bad.entries[0] = LeafForm::monomial(ch, {0}, Expr(1.0));
  CHECK_THROWS_AS(cone({block(ch, 0, 2, 2), bad}, A, A), ConfigError);
}

TEST_CASE("rank one cone by variation of constants") {
  // source degree 1, target degree 0, e_1 = f dx1; along gamma(u) = 1 - u the
  // lower-left block is int_0^1 e^{-b(1-s)} (-f(1-s)) e^{-a s} ds
  Chart ch(1, 0);
  const double a = 0.6, b = -0.9;
  auto line = [&](double c, int deg) {
    GradedVectorSpace V{{deg}};
    EndValuedForm a0(ch, V, 1, 0), a1(ch, V, 0, 1);
    a1.set(0, 0, LeafForm::monomial(ch, {0}, Expr(c)));
    return ZConnection(ch, V, {a0, a1});
  };
  MorphismBlock e1 = block(ch, 1, 1, 1);
  e1.entries[0] = LeafForm::monomial(ch, {0}, Expr(1.0) + Expr::var(0) * Expr::var(0));
  ConeConnection cc = cone({block(ch, 0, 1, 1), e1}, line(a, 1), line(b, 0));
  CHECK(flatness_defect_norm(cc.cone) <= 1e-12);
  const double exact = simpson([&](double s) {
    const double x = 1 - s;
    return std::exp(-b * (1 - s)) * -(1 + x * x) * std::exp(-a * s);
  });
  CHECK(rh1(cc, SimplexMap(ch, 1, {Expr::var(0)}), kRule)(0, 0) == doctest::Approx(exact).epsilon(1e-10));
}
