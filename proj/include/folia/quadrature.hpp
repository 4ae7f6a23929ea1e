#pragma once

#include <functional>
#include <span>
#include <vector>

namespace folia {

struct QuadratureRule {
  int order = 8;  // Gauss points per axis
  int depth = 2;  // each axis is split into 2^depth panels
};

/// Default rule, honouring the FOLIA_GAUSS_ORDER environment variable.
QuadratureRule default_rule();

/// Gauss-Legendre nodes and weights on [0, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int n);

/// Neumaier compensated sum; the order of additions fixes the result.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0, comp_ = 0.0;
};

/// Gauss nodes on [0,1] together with the cumulative integration matrix
/// Q(i,j) = int_0^{x_i} l_j, where l_j are the Lagrange basis polynomials.
struct SpectralPanel {
  int n = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> cumulative;  // row-major n x n
};
const SpectralPanel& spectral_panel(int n);

using Integrand = std::function<double(std::span<const double>)>;

/// Integral over the ordered simplex 1 >= t1 >= ... >= tk >= 0 through the
/// substitution t = (u1, u1 u2, ..., u1...uk).
double integrate_simplex(const Integrand& f, int k, const QuadratureRule& rule);

/// Integral over the unit cube I^k, cut into the k! ordering cells
/// x_{p1} >= ... >= x_{pk} so that functions built from max/min and
/// |x_i - x_j| are integrated cell by cell.
double integrate_cube_piecewise(const Integrand& f, int k, const QuadratureRule& rule);

/// Quadrature points (point, weight) for the cube I^k with the ordering-cell
/// decomposition above.
struct WeightedPoint {
  std::vector<double> x;
  double w;
};
std::vector<WeightedPoint> cube_cell_points(int k, const QuadratureRule& rule);

/// Quadrature points for the ordered simplex of dimension k.
std::vector<WeightedPoint> simplex_points(int k, const QuadratureRule& rule);

}  // namespace folia
