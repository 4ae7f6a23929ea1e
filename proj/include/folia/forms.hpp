#pragma once

#include <map>
#include <span>
#include <vector>

#include "folia/expr.hpp"

namespace folia {

/// Product-foliated chart R^n with leaves R^{n-q} x {pt}. Coordinates
/// x1..x_{n-q} are the leaf coordinates; indices are 0-based in code.
struct Chart {
  int n = 1;
  int q = 0;

  Chart() = default;
  Chart(int n_, int q_);

  int leaf_dim() const { return n - q; }
  bool is_leaf(int index) const { return index >= 0 && index < n - q; }
  bool operator==(const Chart&) const = default;
};

/// Strictly increasing tuple of leaf indices.
using MultiIndex = std::vector<int>;

/// Sign of the permutation sorting `idx`, or 0 if an index repeats.
int sort_sign(std::vector<int>& idx);

/// Leafwise differential form with expression coefficients. Zero
/// coefficients are never stored, so the zero form has an empty map.
class LeafForm {
 public:
  LeafForm() = default;
  LeafForm(const Chart& chart, int degree);

  static LeafForm function(const Chart& chart, const Expr& f);
  /// coef * dx_{idx[0]} ^ dx_{idx[1]} ^ ...; idx need not be sorted.
  static LeafForm monomial(const Chart& chart, std::vector<int> idx, const Expr& coef);

  const Chart& chart() const { return chart_; }
  int degree() const { return degree_; }
  const std::map<MultiIndex, Expr>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Adds coef to the coefficient of the sorted index `idx`.
  void add(const MultiIndex& idx, const Expr& coef);
  Expr coefficient(const MultiIndex& idx) const;

  LeafForm operator+(const LeafForm& o) const;
  LeafForm operator-(const LeafForm& o) const;
  LeafForm operator-() const;
  LeafForm scaled(const Expr& f) const;

  /// a(x)(v_1, ..., v_p) with full-length coordinate vectors v_j.
  double eval(std::span<const double> x, std::span<const std::vector<double>> vecs) const;

 private:
  Chart chart_;
  int degree_ = 0;
  std::map<MultiIndex, Expr> terms_;
};

LeafForm wedge(const LeafForm& a, const LeafForm& b);

/// Geometric leafwise exterior derivative (only leaf partials enter).
LeafForm leaf_d(const LeafForm& a);

/// Coefficientwise numerical equality.
bool forms_equal(const LeafForm& a, const LeafForm& b, double tol = 1e-10);

/// Pulls `a` back along x = m(t), where m gives n expressions in the k
/// variables t1..tk. The result lives on the chart (k, 0).
LeafForm pullback(const LeafForm& a, std::span<const Expr> m, int k);

/// Determinant of a small dense matrix stored row-major.
double small_det(std::span<const double> m, int p);

/// A LeafForm with its coefficients compiled for repeated evaluation.
class CompiledForm {
 public:
  CompiledForm() = default;
  explicit CompiledForm(const LeafForm& a);

  int degree() const { return degree_; }
  bool is_zero() const { return index_.empty(); }
  std::size_t num_coefs() const { return index_.size(); }

  void eval_coefs(std::span<const double> x, std::span<double> coefs) const;
  /// sum_I c_I det(vecs[col][I[row]]) for the given coefficient values.
  double contract(std::span<const double> coefs, std::span<const double* const> vecs) const;

 private:
  int degree_ = 0;
  std::vector<MultiIndex> index_;
  Program prog_;
};

/// Graded vector space given by the degree of each basis vector.
struct GradedVectorSpace {
  std::vector<int> degrees;

  int dim() const { return static_cast<int>(degrees.size()); }
  std::map<int, int> dims() const;
  bool operator==(const GradedVectorSpace&) const = default;
};

/// Element of End^j(V) (x) A^p. Entry (a, b) maps basis vector b to a, so it
/// is allowed to be nonzero only when deg a - deg b == j.
class EndValuedForm {
 public:
  EndValuedForm() = default;
  EndValuedForm(const Chart& chart, GradedVectorSpace space, int endo_degree, int form_degree);

  const Chart& chart() const { return chart_; }
  const GradedVectorSpace& space() const { return space_; }
  int endo_degree() const { return j_; }
  int form_degree() const { return p_; }
  int total_degree() const { return j_ + p_; }
  int dim() const { return space_.dim(); }

  const LeafForm& at(int a, int b) const { return entries_[a * dim() + b]; }
  void set(int a, int b, LeafForm f);
  bool entry_allowed(int a, int b) const;
  bool is_zero() const;

  EndValuedForm operator+(const EndValuedForm& o) const;
  EndValuedForm operator-() const;
  EndValuedForm scaled(double c) const;

  /// Matrix of the contraction with vectors vecs at point x.
  std::vector<double> eval(std::span<const double> x,
                           std::span<const std::vector<double>> vecs) const;

 private:
  Chart chart_;
  GradedVectorSpace space_;
  int j_ = 0, p_ = 0;
  std::vector<LeafForm> entries_;
};

/// (u (x) alpha) o (v (x) beta) = (-1)^{|alpha| |v|} (uv) (x) (alpha ^ beta).
EndValuedForm endo_compose(const EndValuedForm& u, const EndValuedForm& v);

/// Graded exterior derivative: d(e_a (x) alpha) = (-1)^{|e_a|} e_a (x) d alpha,
/// which on a homogeneous element is (-1)^j times the entrywise leaf_d.
EndValuedForm endo_d(const EndValuedForm& u);

bool endo_equal(const EndValuedForm& a, const EndValuedForm& b, double tol = 1e-10);

/// Z-connection nabla = d - sum_i A_i with A_i in End^{1-i} (x) A^i.
class ZConnection {
 public:
  ZConnection() = default;
  ZConnection(const Chart& chart, GradedVectorSpace space, std::vector<EndValuedForm> comps);

  const Chart& chart() const { return chart_; }
  const GradedVectorSpace& space() const { return space_; }
  int dim() const { return space_.dim(); }
  /// Components A_0..A_m; missing ones are zero.
  const std::vector<EndValuedForm>& components() const { return comps_; }
  EndValuedForm component(int i) const;
  int max_degree() const { return static_cast<int>(comps_.size()) - 1; }

 private:
  Chart chart_;
  GradedVectorSpace space_;
  std::vector<EndValuedForm> comps_;
};

/// Curvature -d omega + omega o omega split by form degree: entry r is the
/// component of form degree r (endo degree 2 - r).
std::vector<EndValuedForm> flatness_defect(const ZConnection& c);

/// Largest absolute entry of the defect over the sample points.
double flatness_defect_norm(const ZConnection& c, int samples = 16);

/// Degrees d -> d - m with A_i -> (-1)^{m(i+1)} A_i.
ZConnection shift(const ZConnection& c, int m);

}  // namespace folia
