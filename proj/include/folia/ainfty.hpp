#pragma once

#include <random>
#include <string>
#include <vector>

#include "folia/chen.hpp"
#include "folia/cochains.hpp"

namespace folia {

/// Cochain degree of phi_n(word): sum T(a_i) - n + 1.
int phi_degree(const BarWord& word);

/// phi_1(a)(sigma) = (-1)^k int_{Delta^k} sigma^* a, with phi_1(f) = f(x) on points.
double phi1_direct(const LeafForm& a, const SimplexMap& sigma, const QuadratureRule& rule);

/// phi_n(word) as a scalar cochain. n = 1 integrates over the simplex,
/// n >= 2 evaluates the Chen integral over the theta family.
Cochain phi(const BarWord& word, const QuadratureRule& rule);

/// |(delta phi_1(a))(sigma) - phi_1(-da)(sigma)|.
double derham_chain_residual(const LeafForm& a, const SimplexMap& sigma, const QuadratureRule& rule);

/// The terms of the A-infinity relation evaluated on sigma.
struct AinftyTerms {
  double bar = 0.0;                // phi(D word)
  double coboundary = 0.0;         // delta phi_n(word)
  std::vector<double> cups;        // phi_l(a_1..a_l) u phi_{n-l}(..), l = 1..n-1
  std::vector<int> cup_signs;      // (-1)^{deg phi_l - 1}
  double residual() const;
};
AinftyTerms ainfty_terms(const BarWord& word, const SimplexMap& sigma, const QuadratureRule& rule);

/// |phi(D word) - delta phi_n(word) - sum_l (-1)^{deg phi_l - 1} phi_l u phi_{n-l}|
/// on a simplex of dimension deg phi_n(word) + 1.
double ainfty_relation_residual(const BarWord& word, const SimplexMap& sigma, const QuadratureRule& rule);

// Random instances: integer coefficients in [-3, 3], polynomial simplices of
// degree <= 3 that are leafwise by construction.
using Rng = std::mt19937_64;

Expr random_polynomial(Rng& rng, int nvars, int max_degree, int max_terms);
LeafForm random_form(Rng& rng, const Chart& chart, int degree, int max_poly_degree = 2);
/// Leafwise k-simplex: affine through random vertices in [-radius, radius]
/// plus a small cubic bend.
SimplexMap random_simplex(Rng& rng, const Chart& chart, int k, bool curved = true, double radius = 1.0);
/// Word of length n with the given form degrees.
BarWord random_word(Rng& rng, const Chart& chart, const std::vector<int>& degrees);

}  // namespace folia
