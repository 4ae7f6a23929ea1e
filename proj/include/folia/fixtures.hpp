#pragma once

#include <vector>

#include "folia/forms.hpp"
#include "folia/holonomy.hpp"

namespace folia {

/// A_1 = dg g^{-1} = sum_l (d_l g) g^{-1} dx_l, flat for d - A_1. g and g_inv
/// are row-major dim x dim matrices of expressions; their product is checked.
ZConnection gauge_connection(const Chart& chart, const GradedVectorSpace& space, const std::vector<Expr>& g,
                             const std::vector<Expr>& g_inv);

/// Rank one on R^1 with A_1 = c dx1.
ZConnection abelian_fixture(double c = 0.7);

/// Rank two on R^2, gauge trivial with g = [[1, x1], [x2, 1 + x1 x2]].
ZConnection gauge_fixture();

/// Rank two on R^2, A_1 = N1 dx1 + N2 dx2 with [N1, N2] != 0; not flat.
ZConnection curved_fixture();

/// Degrees (0, 1) on R^2 with A_0, A_1, A_2 all nonzero and flat.
ZConnection graded_fixture();

/// Degrees (0, 1, 2) on R^3: the constant A_0 = E_10 conjugated by
/// g = 1 + h with h of total degree 0, so A_0..A_3 are all nonzero.
ZConnection gauged_fixture();

/// The constant connection d - E_10 that gauged_fixture conjugates.
ZConnection gauged_source();

/// Closed cone data e_i = (-1)^i g_i from gauged_source to gauged_fixture.
std::vector<MorphismBlock> gauged_morphism();

}  // namespace folia
