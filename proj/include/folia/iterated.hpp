#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "folia/family.hpp"
#include "folia/quadrature.hpp"

namespace folia {

/// Exterior algebra on g generators e_1..e_g; basis elements are bitmasks.
struct Grassmann {
  int g = 0;
  int size = 1;
  std::vector<int> sign;    // sign[S * size + T] of e_S ^ e_T, 0 if they overlap
  std::vector<int> grade;   // popcount

  static const Grassmann& get(int g);
  int top() const { return size - 1; }
};

/// Coefficient rings for super elements sum_S c_S e_S. The parity of a
/// matrix entry (a, b) is deg a - deg b; `flip` applies (-1)^{parity}.
struct ScalarRing {
  using Coef = double;
  Coef zero() const { return 0.0; }
  Coef one() const { return 1.0; }
  void flip(Coef&) const {}
  static bool is_zero(const Coef& c) { return c == 0.0; }
};

struct MatrixRing {
  using Coef = Eigen::MatrixXd;
  std::vector<int> degrees;

  int dim() const { return static_cast<int>(degrees.size()); }
  Coef zero() const { return Coef::Zero(dim(), dim()); }
  Coef one() const { return Coef::Identity(dim(), dim()); }
  void flip(Coef& m) const {
    for (int a = 0; a < dim(); ++a)
      for (int b = 0; b < dim(); ++b)
        if ((degrees[a] - degrees[b]) % 2 != 0) m(a, b) = -m(a, b);
  }
  static bool is_zero(const Coef& c) { return c.isZero(0.0); }
};

template <class Ring>
using Super = std::vector<typename Ring::Coef>;

/// out += a * b with (c e_S)(c' e_T) = (-1)^{|S||c'|} c c' e_S ^ e_T.
template <class Ring>
void super_mul_add(const Ring& ring, const Grassmann& gr, const Super<Ring>& a, const Super<Ring>& b,
                   Super<Ring>& out) {
  for (int S = 0; S < gr.size; ++S) {
    if (Ring::is_zero(a[S])) continue;
    for (int T = 0; T < gr.size; ++T) {
      const int sg = gr.sign[S * gr.size + T];
      if (sg == 0 || Ring::is_zero(b[T])) continue;
      if constexpr (std::is_same_v<typename Ring::Coef, double>) {
        out[S | T] += sg * a[S] * b[T];
      } else {
        typename Ring::Coef bt = b[T];
        if (gr.grade[S] % 2) ring.flip(bt);
        if (sg > 0)
          out[S | T].noalias() += a[S] * bt;
        else
          out[S | T].noalias() -= a[S] * bt;
      }
    }
  }
}

/// Evaluates the nested integrals J^(0) = 1, J^(m)(u) = int_0^u F_{f(m)} J^(m-1)
/// along gamma(s, .) for one parameter value s. `factors(sample, out)` fills
/// one super element per distinct factor. Returns J^(m)(1) for m = 0..levels.
template <class Ring, class FactorFn>
std::vector<Super<Ring>> nested_integrals(const Ring& ring, const Grassmann& gr, const PathFamily& fam,
                                          std::span<const double> s, const std::vector<int>& level_factor,
                                          int nfactors, FactorFn&& factors, const QuadratureRule& rule) {
  const int L = static_cast<int>(level_factor.size()) - 1;
  const SpectralPanel& sp = spectral_panel(2 * rule.order);
  const int N = sp.n;
  const int sub = 1 << std::max(rule.depth, 0);

  auto zero_super = [&] { return Super<Ring>(gr.size, ring.zero()); };
  std::vector<Super<Ring>> start(L + 1, zero_super());
  start[0][0] = ring.one();

  std::vector<std::vector<Super<Ring>>> F(nfactors, std::vector<Super<Ring>>(N, zero_super()));
  std::vector<std::vector<Super<Ring>>> J(L + 1, std::vector<Super<Ring>>(N, zero_super()));
  std::vector<Super<Ring>> h(N, zero_super());
  for (int i = 0; i < N; ++i) J[0][i] = start[0];

  FamilySample smp = fam.make_sample();
  std::vector<Super<Ring>> fvals(nfactors, zero_super());
  const std::vector<double> bps = fam.breakpoints(s);

  for (std::size_t piece = 0; piece + 1 < bps.size(); ++piece) {
    const double plen = bps[piece + 1] - bps[piece];
    if (plen <= 1e-15) continue;
    for (int q = 0; q < sub; ++q) {
      const double a = bps[piece] + plen * q / sub;
      const double len = plen / sub;
      for (int i = 0; i < N; ++i) {
        fam.eval(s, a + len * sp.nodes[i], smp);
        for (auto& fv : fvals)
          for (auto& c : fv) c = ring.zero();
        factors(smp, fvals);
        for (int f = 0; f < nfactors; ++f) F[f][i] = fvals[f];
      }
      for (int m = 1; m <= L; ++m) {
        const int f = level_factor[m];
        for (int i = 0; i < N; ++i) {
          for (auto& c : h[i]) c = ring.zero();
          super_mul_add(ring, gr, F[f][i], J[m - 1][i], h[i]);
        }
        Super<Ring> end = start[m];
        for (int i = 0; i < N; ++i) {
          Super<Ring> acc = start[m];
          for (int j = 0; j < N; ++j) {
            const double qij = len * sp.cumulative[i * N + j];
            for (int S = 0; S < gr.size; ++S) acc[S] += qij * h[j][S];
          }
          J[m][i] = std::move(acc);
          for (int S = 0; S < gr.size; ++S) end[S] += (len * sp.weights[i]) * h[i][S];
        }
        start[m] = std::move(end);
      }
    }
  }
  return start;
}

}  // namespace folia
