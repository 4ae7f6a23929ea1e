#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "folia/cochains.hpp"
#include "folia/family.hpp"
#include "folia/forms.hpp"

namespace folia {

/// Conventions fixed by the residual suites and echoed in every report.
struct HolonomyConventions {
  bool reverse_orientation = false;
  McVariant mc = McVariant::Commutator;
  /// psi_k = sign(k) * (top component of the integrated holonomy); degrees
  /// missing from the table use (-1)^{k(k-1)/2}.
  std::map<int, int> psi_sign{{1, 1}, {2, -1}, {3, -1}};
  int p_max = 30;
  double envelope_tol = 1e-10;

  int sign(int k) const;
  std::string sign_table() const;
};

/// Truncated infinity-holonomy over a family. terms[p] is the top
/// parameter-degree component of Psi_p integrated over the parameters.
struct HolonomySeries {
  std::vector<Eigen::MatrixXd> terms;
  Eigen::MatrixXd sum;
  double length = 0.0;     // L: largest path length over sampled parameters
  double sup_norm = 0.0;   // M: sup of the operator norm of omega(gamma') / |gamma'|
  double envelope = 0.0;   // (L M)^{p+1} / (p+1)! at the last term
  int p_used = 0;

  /// (L M)^p / p!
  double bound(int p) const;
};

/// Psi_0..Psi_{p_max}; stops early once the envelope is below tol when
/// adaptive is set. Throws NumericalError when the envelope never gets below tol.
HolonomySeries psi_series(const ZConnection& c, const PathFamily& fam, int p_max,
                          const QuadratureRule& rule, double tol = 1e-10, bool adaptive = true);

/// The single term Psi_p (top component).
Eigen::MatrixXd psi_p(const ZConnection& c, const PathFamily& fam, int p, const QuadratureRule& rule);

/// psi_k(sigma): A_0 at the point for k = 0, else sign(k) times the
/// End^{1-k} component of the holonomy over the theta family.
Eigen::MatrixXd psi_k_simplex(const ZConnection& c, const SimplexMap& sigma, const QuadratureRule& rule,
                              const HolonomyConventions& conv = {});

/// A_0 evaluated at a point.
Eigen::MatrixXd fiber_differential(const ZConnection& c, std::span<const double> x);

/// RH_0: F_0 = A_0 and F_k = psi_k.
InfinityLocalSystem rh0(const ZConnection& c, const QuadratureRule& rule, const HolonomyConventions& conv = {});

/// Classical RK4 transport u' = A_1(gamma') u from the identity along a
/// single path (s_dim = 0), stepping each smooth piece with step <= h.
Eigen::MatrixXd ode_transport_oracle(const EndValuedForm& A1, const PathFamily& path, double h);

/// Morphism data e_i: rows index the target space, columns the source space,
/// entries are forms of degree i.
struct MorphismBlock {
  int form_degree = 0;
  int rows = 0, cols = 0;
  std::vector<LeafForm> entries;  // row-major

  const LeafForm& at(int a, int b) const { return entries[a * cols + b]; }
};

struct ConeConnection {
  ZConnection source, target;
  std::vector<MorphismBlock> e;
  ZConnection cone;  // on source[1] (+) target
  int source_dim() const { return source.dim(); }
};

/// L_i = [[(-1)^{i+1} A_i^E, 0], [e_i, A_i^F]] on E[1] (+) F. Entry (a, b) of
/// e_i must satisfy deg_F a - deg_E b = -i.
ConeConnection cone(const std::vector<MorphismBlock>& e, const ZConnection& source, const ZConnection& target);

/// Lower-left block of psi_k of the cone.
Eigen::MatrixXd rh1(const ConeConnection& cc, const SimplexMap& sigma, const QuadratureRule& rule,
                    const HolonomyConventions& conv = {});

/// Lower-left block of the cone's MC residual on sigma; zero when e is closed.
Eigen::MatrixXd rh1_chain_residual(const ConeConnection& cc, const SimplexMap& sigma, const QuadratureRule& rule,
                                   const HolonomyConventions& conv = {});

}  // namespace folia
