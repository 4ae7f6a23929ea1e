#pragma once

#include <memory>
#include <span>
#include <vector>

#include "folia/expr.hpp"
#include "folia/forms.hpp"

namespace folia {

// Points of the ordered simplex 1 >= t1 >= ... >= tk >= 0. Vertex i is
// (1,..,1,0,..,0) with i ones.

std::vector<double> simplex_vertex(int i, int k);

/// Coface d_i from dimension k to k+1: i=0 prepends 1, 0<i<k+1 repeats t_i,
/// i=k+1 appends 0. The image misses vertex i.
std::vector<double> coface(int i, std::span<const double> t);

/// Codegeneracy s_i (1 <= i <= k): deletes coordinate i.
std::vector<double> codegeneracy(int i, std::span<const double> t);

/// Order preserving retraction pi_k(x)_i = max(x_i, ..., x_k).
std::vector<double> retraction(std::span<const double> x);

/// Coordinate expressions of the affine simplex maps, in the variables of
/// the source simplex.
std::vector<Expr> coface_exprs(int i, int k);        // Delta^k -> Delta^{k+1}
std::vector<Expr> codegeneracy_exprs(int i, int k);  // Delta^{k+1} -> Delta^k
std::vector<Expr> front_exprs(int i, int k);         // V_i: Delta^i -> Delta^k
std::vector<Expr> back_exprs(int j, int k);          // U_j: Delta^j -> Delta^k

/// A smooth map sigma: Delta^k -> chart, given by n expressions in t1..tk.
class SimplexMap {
 public:
  SimplexMap() = default;
  SimplexMap(const Chart& chart, int k, std::vector<Expr> comps);

  static SimplexMap constant(const Chart& chart, std::span<const double> point);
  /// Affine simplex through the given vertex points v_0..v_k.
  static SimplexMap affine(const Chart& chart, const std::vector<std::vector<double>>& verts);

  int dim() const { return k_; }
  const Chart& chart() const { return chart_; }
  const std::vector<Expr>& components() const { return comps_; }

  /// Transverse components are constant.
  bool leafwise() const;

  /// Precomposition with a map Delta^m -> Delta^k given by k expressions.
  SimplexMap compose(std::span<const Expr> inner, int m) const;

  SimplexMap face(int i) const { return compose(coface_exprs(i, k_ - 1), k_ - 1); }
  SimplexMap degeneracy(int i) const { return compose(codegeneracy_exprs(i, k_), k_ + 1); }
  SimplexMap front(int i) const { return compose(front_exprs(i, k_), i); }
  SimplexMap back(int j) const { return compose(back_exprs(j, k_), j); }

  std::vector<double> eval(std::span<const double> t) const;
  std::vector<double> vertex(int i) const { return eval(simplex_vertex(i, k_)); }

  /// Writes sigma(t) into x (size n) and the Jacobian into jac (row-major n x k).
  void eval_jet(std::span<const double> t, std::span<double> x, std::span<double> jac) const;

  std::string to_string() const;

 private:
  Chart chart_;
  int k_ = 0;
  std::vector<Expr> comps_;
  std::shared_ptr<const Program> jet_;  // outputs: comps then Jacobian
};

/// Piecewise path u in [0,1] -> R^d given by expressions in the variable u
/// (variable index 0) on consecutive pieces.
class PiecewisePath {
 public:
  struct Piece {
    double u0, u1;
    std::vector<Expr> comps;
  };

  PiecewisePath() = default;
  PiecewisePath(int dim, std::vector<Piece> pieces);

  int dim() const { return dim_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  std::vector<double> breakpoints() const;

  std::vector<double> eval(double u) const;
  /// Position and velocity on the piece containing u (left pieces win ties
  /// only at u = 1).
  void eval_jet(double u, std::span<double> x, std::span<double> dx) const;

  /// Applies a map given by expressions in the path coordinates.
  PiecewisePath map(std::span<const Expr> f, int out_dim) const;
  /// Reparametrises the time interval [0,1] affinely onto [a,b].
  PiecewisePath rescaled(double a, double b) const;
  /// The restriction to [a,b], reparametrised affinely by [0,1].
  PiecewisePath restricted(double a, double b) const;

  /// Joins paths, each placed on its time interval; empty intervals are skipped.
  static PiecewisePath join(int dim, const std::vector<std::pair<PiecewisePath, std::pair<double, double>>>& parts);

 private:
  std::size_t piece_index(double u) const;

  int dim_ = 0;
  std::vector<Piece> pieces_;
  std::vector<std::shared_ptr<const Program>> jets_;
};

PiecewisePath concatenate(const PiecewisePath& first, const PiecewisePath& second, double split);

/// lambda_w in I^k for w in I^{k-1} (w_k = 1): time 0 at sum w_i e_i, time 1
/// at 0, moving one coordinate per segment of length 1/k.
PiecewisePath lambda_path(std::span<const double> w);

/// theta_(k)(w) = pi_k o lambda_w, a path in Delta^k from vertex k to vertex 0.
PiecewisePath theta_path(std::span<const double> w);

/// mu_i(alpha, beta): runs U_{k-i} o beta on [0,(k-i)/k] then V_i o alpha.
/// alpha is a path in Delta^i and beta in Delta^{k-i}.
PiecewisePath concat_mu(int i, const PiecewisePath& alpha, const PiecewisePath& beta);

/// omega reparametrisation of a path in Delta^{k-1}: plateau on [(j-1)/k, j/k].
PiecewisePath omega_reparam(int j, int k, const PiecewisePath& gamma);

}  // namespace folia
