#pragma once

#include <span>
#include <vector>

#include "folia/forms.hpp"
#include "folia/quadrature.hpp"
#include "folia/simplex.hpp"

namespace folia {

struct FamilySample {
  std::vector<double> x;               // gamma(s, u)
  std::vector<double> du;              // d gamma / du
  std::vector<std::vector<double>> ds; // d gamma / ds_j
};

/// A (k-1)-parameter family of leafwise paths gamma(s, .) : [0,1] -> chart,
/// piecewise smooth in u with breakpoints depending on s.
class PathFamily {
 public:
  virtual ~PathFamily() = default;

  virtual const Chart& chart() const = 0;
  virtual int s_dim() const = 0;

  /// Quadrature points over the parameter cube I^{s_dim}.
  virtual std::vector<WeightedPoint> s_points(const QuadratureRule& rule) const;

  /// Sorted breakpoints in u, including 0 and 1.
  virtual std::vector<double> breakpoints(std::span<const double> s) const = 0;

  virtual void eval(std::span<const double> s, double u, FamilySample& out) const = 0;

  FamilySample make_sample() const;
};

/// The theta family of a k-simplex: s = w in I^{k-1} and
/// gamma(w, u) = sigma(pi_k(lambda_w(u))), running from sigma(v_k) to sigma(v_0).
class ThetaFamily : public PathFamily {
 public:
  explicit ThetaFamily(SimplexMap sigma, bool reverse = false);

  const Chart& chart() const override { return sigma_.chart(); }
  int s_dim() const override { return sigma_.dim() - 1; }
  std::vector<double> breakpoints(std::span<const double> s) const override;
  void eval(std::span<const double> s, double u, FamilySample& out) const override;

  const SimplexMap& simplex() const { return sigma_; }

  /// Point t = theta_k(u, s) in Delta^k with dt/du (k) and dt/ds (k x (k-1), row-major).
  void theta_jet(std::span<const double> s, double u, std::span<double> t, std::span<double> dt_du,
                 std::span<double> dt_ds) const;

 private:
  SimplexMap sigma_;
  bool reverse_;
};

/// A single path (no family parameters) in the chart.
class SinglePath : public PathFamily {
 public:
  SinglePath(const Chart& chart, PiecewisePath path);

  const Chart& chart() const override { return chart_; }
  int s_dim() const override { return 0; }
  std::vector<double> breakpoints(std::span<const double>) const override { return path_.breakpoints(); }
  void eval(std::span<const double> s, double u, FamilySample& out) const override;

  const PiecewisePath& path() const { return path_; }

 private:
  Chart chart_;
  PiecewisePath path_;
};

/// gamma(s, phi(u)) for a monotone reparametrisation phi of [0,1] fixing the ends.
class ReparamFamily : public PathFamily {
 public:
  ReparamFamily(const PathFamily& base, Expr phi);

  const Chart& chart() const override { return base_.chart(); }
  int s_dim() const override { return base_.s_dim(); }
  std::vector<WeightedPoint> s_points(const QuadratureRule& rule) const override {
    return base_.s_points(rule);
  }
  std::vector<double> breakpoints(std::span<const double> s) const override;
  void eval(std::span<const double> s, double u, FamilySample& out) const override;

 private:
  double inverse(double v) const;

  const PathFamily& base_;
  Expr phi_;
  Program jet_;
};

/// Euclidean length of gamma(s, .) estimated on the quadrature grid.
double path_length(const PathFamily& fam, std::span<const double> s, const QuadratureRule& rule);

}  // namespace folia
