#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "folia/family.hpp"
#include "folia/forms.hpp"
#include "folia/quadrature.hpp"

namespace folia {

using BarWord = std::vector<LeafForm>;

/// Suspension degree |a| = T(a) - 1.
inline int suspended_degree(const LeafForm& a) { return a.degree() - 1; }

/// (-1)^spade with spade = sum_{1 <= i < n} (T(a_i) - 1)(n - i).
int spade_sign(std::span<const int> total_degrees);
int spade_sign(const BarWord& word);

/// True when the word can be integrated over a family with s_dim parameters:
/// every factor has positive degree and sum (T(a_i) - 1) = s_dim.
bool degree_balanced(const BarWord& word, int s_dim);

/// S(C(word)) on the family: the integral over the parameters s and the
/// time simplex 1 >= u_1 >= ... >= u_n >= 0 of the top s-component of
/// eta_1(u_1) ^ ... ^ eta_n(u_n), where eta_i contracts a_i with d gamma/du
/// and an ordered set of d gamma/ds_j. Exactly 0 when the degrees do not balance.
double chen_eval(const BarWord& word, const PathFamily& fam, const QuadratureRule& rule);

/// Same over the theta family of a simplex.
double chen_eval(const BarWord& word, const SimplexMap& sigma, const QuadratureRule& rule);

/// Bundle-valued version: factors are End(V)-valued forms multiplied in word
/// order with the Koszul sign of the Grassmann parameters against the
/// endomorphism degree.
Eigen::MatrixXd chen_eval_endo(const std::vector<EndValuedForm>& word, const PathFamily& fam,
                               const QuadratureRule& rule);

/// Formal linear combination of bar words.
struct BarTerm {
  double coef;
  BarWord word;
};

/// D(a_1...a_n) = sum_i (-1)^{|a_1|+..+|a_{i-1}|} (.., -d a_i, ..)
///              + sum_i (-1)^{|a_1|+..+|a_i|} (.., a_i ^ a_{i+1}, ..).
/// Terms with a zero factor are dropped.
std::vector<BarTerm> bar_differential(const BarWord& word);
std::vector<BarTerm> bar_differential(const std::vector<BarTerm>& sum);

/// |chen(word, fam) - chen(word, fam o phi)| for a monotone phi fixing 0 and 1.
double reparam_invariance_defect(const BarWord& word, const PathFamily& fam, const Expr& phi,
                                 const QuadratureRule& rule);

}  // namespace folia
