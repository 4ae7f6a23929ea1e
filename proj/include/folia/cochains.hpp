#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "folia/forms.hpp"
#include "folia/simplex.hpp"

namespace folia {

/// A smooth singular cochain of degree k: simplex of dimension k -> matrix.
/// Scalar cochains use 1x1 matrices. Negative degrees give the zero cochain.
struct Cochain {
  int degree = 0;
  int rows = 1, cols = 1;
  std::function<Eigen::MatrixXd(const SimplexMap&)> eval;

  Eigen::MatrixXd operator()(const SimplexMap& sigma) const;
  double scalar(const SimplexMap& sigma) const { return (*this)(sigma)(0, 0); }

  static Cochain zero(int degree, int rows = 1, int cols = 1);
  static Cochain constant(int degree, double c);
};

/// (delta phi)(sigma) = sum_{i=0}^{k+1} (-1)^i phi(sigma o d_i).
Cochain delta(const Cochain& phi);

/// Front/back face cup product (phi u psi)(sigma) = phi(V_i sigma) psi(U_j sigma).
Cochain cup(const Cochain& phi, const Cochain& psi);

/// True iff phi vanishes (to tol) on all degenerations sigma o s_i of the
/// given simplices of dimension deg phi - 1.
bool normalized_check(const Cochain& phi, std::span<const SimplexMap> sigmas, double tol = 1e-9,
                      double* worst = nullptr);

/// Largest |phi| over the degenerations used by normalized_check.
double degenerate_value(const Cochain& phi, std::span<const SimplexMap> sigmas);

/// Cone toward the leaf origin: (K sigma)(t) = (1 - t1) p + t1 sigma(t2/t1, ..., t_{k+1}/t1)
/// in the leaf coordinates, where p has zero leaf coordinates and the
/// transverse coordinates of sigma. Vertex 0 of K sigma is p and its face 0 is sigma.
SimplexMap cone_simplex(const SimplexMap& sigma);

/// (L phi)(tau) = (-1)^{deg tau} phi(K tau), of degree deg phi - 1.
Cochain homotopy_L(const Cochain& phi);

/// (-1)^{k+1} ((delta L - L delta) phi)(sigma) - phi(sigma), plus phi(p) when k = 0.
double homotopy_L_residual(const Cochain& phi, const SimplexMap& sigma);

/// Infinity local system: fiber differential F0 at points and F_k on k-simplices.
struct InfinityLocalSystem {
  GradedVectorSpace space;
  std::function<Eigen::MatrixXd(std::span<const double>)> F0;
  std::function<Eigen::MatrixXd(const SimplexMap&)> F;
};

/// Sign of the F(sigma) E0 term: Verbatim uses -(-1)^k,
/// the graded commutator [E0, F] uses +(-1)^k.
enum class McVariant { Verbatim, Commutator };
std::string to_string(McVariant v);

/// E0(x_0) F(sigma) + c_k F(sigma) E0(x_k) - sum_{i=1}^{k-1} (-1)^i F(sigma o d_i).
Eigen::MatrixXd hat_delta(const InfinityLocalSystem& F, const SimplexMap& sigma, McVariant v);

/// hat_delta plus sum_{i=1}^{k-1} (-1)^i F(V_i sigma) F(U_{k-i} sigma).
Eigen::MatrixXd mc_residual(const InfinityLocalSystem& F, const SimplexMap& sigma, McVariant v);

}  // namespace folia
