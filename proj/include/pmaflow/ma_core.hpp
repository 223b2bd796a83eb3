#pragma once

#include <utility>

#include "pmaflow/geometry.hpp"

namespace pmaflow {

/// Non-uniform (Shortley-Weller) second differences along the four stencil
/// axes of one node, plus the monotonicity weight of each: w = 2/(d+ * d-)
/// is exactly |d(diff)/d(u_center)|. Slots: 0 = x, 1 = y, 2 = first
/// diagonal, 3 = second diagonal.
struct SecondDiffs {
    double d[4];
    double w[4];
};

SecondDiffs second_diffs(const GridFunction& u, std::size_t node);

/// Central first derivatives per axis, (u+ - u-)/(len+ + len-). Second-order
/// on uniform arms, first-order at cut arms. Does not involve the center
/// value.
Vec2 gradient_central(const GridFunction& u, std::size_t node);
std::vector<Vec2> gradient_central(const GridFunction& u);

/// Central-difference Hessian: diagonal from axis second differences, mixed
/// entry from the two diagonal second differences, u_xy = (d_diag1 -
/// d_diag2)/2. Exact on quadratics with uniform arms.
Sym2 hessian_central(const GridFunction& u, std::size_t node);
std::vector<Sym2> hessian_central(const GridFunction& u);

/// Monotone wide-stencil Monge-Ampere operator:
///   MA_h[u](p) = min over orthogonal direction pairs (v, v_perp) of
///                (D_vv u)+ * (D_pp u)+ + (D_vv u)- + (D_pp u)-
/// width 1 uses the axes pair only; width 2 (default) adds the diagonal
/// pair. Nondecreasing in every neighbor value, nonincreasing in the center.
double det_d2_monotone(const GridFunction& u, std::size_t node, int width = 2);

/// Determinant of the central-difference Hessian. Not monotone; kept as the
/// negative control for comparison-principle sensitivity tests.
double det_d2_central(const GridFunction& u, std::size_t node);

/// Fused per-node evaluation used by the stepper: monotone operator value,
/// its center-sensitivity bound lip = max over pairs of
/// w_v*max((D_pp)+, 1) + w_p*max((D_vv)+, 1), and the central Hessian.
struct MaNode {
    double ma;
    double lip;
    Sym2 hess;
};
MaNode ma_node(const GridFunction& u, std::size_t node, int width = 2);

/// Eigenvalues of a symmetric 2x2 matrix, ascending. Discriminant clamped at
/// zero so exact multiples of the identity return equal values.
std::pair<double, double> eig_2x2(const Sym2& H);

inline double eig_min_of(const Sym2& H) { return eig_2x2(H).first; }
inline double eig_max_of(const Sym2& H) { return eig_2x2(H).second; }

/// Eigenvalues plus an orthonormal eigenbasis (v1 for the smaller value).
struct Eig2 {
    double l1;
    double l2;
    Vec2 v1;
    Vec2 v2;
};
Eig2 eig_2x2_full(const Sym2& H);

/// Inverse via adjugate over determinant. Throws SingularHessian when
/// det(H) <= eps_sing.
Sym2 cofactor_inverse(const Sym2& H, double eps_sing = 1e-12);

}  // namespace pmaflow
