#pragma once

#include "pmaflow/stepper.hpp"

namespace pmaflow {

/// Uniform lattice in gradient space: nodes (ax + hx*i, ay + hy*j),
/// row-major index j*nx + i. A forced grid (user box) is bounds-checked
/// against the field's gradient range at transform time.
struct DualGrid {
    double ax = 0.0;
    double ay = 0.0;
    double hx = 0.0;
    double hy = 0.0;
    int nx = 0;
    int ny = 0;
    bool forced = false;

    double y1(int i) const { return ax + hx * i; }
    double y2(int j) const { return ay + hy * j; }
    std::size_t size() const { return std::size_t(nx) * std::size_t(ny); }
};

/// Auto-sized dual grid. Spacing per axis is h times the smallest axis
/// second difference over uniform-arm interior nodes; for a field with
/// second differences equal to c that aligns the dual lattice with the kink
/// spacing of the piecewise-linear conjugate, making its central second
/// differences exactly 1/c. Box = gradient range padded by 5% (at least one
/// cell) per side.
DualGrid auto_dual_grid(const GridFunction& u);

DualGrid manual_dual_grid(double ax, double ay, double hx, double hy, int nx, int ny);

/// Discrete conjugate U(y) = max over primal nodes (interior and boundary)
/// of y.x - u(x), every score evaluated as fl(fl(fl(y1*x1) - u) + fl(y2*x2)).
/// Ties take the larger partial fl(y1*x1) - u, then the smaller node index.
/// arg holds the winning global index (interior p, or n_interior + b);
/// att classifies it: 0 uniform-arm interior, 1 cut interior, 2 boundary.
struct DualField {
    DualGrid grid;
    double t = 0.0;
    std::vector<double> U;
    std::vector<int32_t> arg;
    std::vector<uint8_t> att;
};

/// Production transform: nodes grouped by exact x2, one column scan per
/// group, then per-row combination. Same score expression and tie order as
/// the brute scan, hence bit-identical output.
DualField legendre_transform(const GridFunction& u, const DualGrid& dg, double t = 0.0);

/// Normative quadratic-cost scan; the oracle the fast path is tested against.
DualField legendre_transform_brute(const GridFunction& u, const DualGrid& dg, double t = 0.0);

/// (u*)* back on the primal grid (interior and boundary nodes), the discrete
/// convex envelope seen through the dual lattice.
GridFunction biconjugate(const GridFunction& u, const DualGrid& dg);

/// 1-d conjugate over explicit nodes, same score and tie semantics.
struct Conjugate1D {
    std::vector<double> U;
    std::vector<int32_t> arg;
};
Conjugate1D conjugate_1d(const std::vector<double>& xs, const std::vector<double>& us,
                         const std::vector<double>& ys);

/// Sup of the spectral norm of the central dual Hessian, split into interior
/// nodes (3x3 stencil fully uniform-attained or cut-attained) and the ring
/// (stencil touches a boundary-attained node). Dual lattice edge nodes have
/// no full stencil and join neither class.
struct DualHessianSup {
    double interior_sup = 0.0;
    double ring_sup = 0.0;
    int64_t n_interior = 0;
    int64_t n_ring = 0;
};
DualHessianSup dual_hessian_sup(const DualField& F);

/// Residual of the dual equation -U_t - 1/det D^2 U + psi(DU, t) = 0 at
/// snapshot t_index, U_t by backward difference to the previous snapshot.
/// Nodes whose 3x3 stencil touches a boundary-attained argmax are skipped;
/// det <= eps_sing is excluded and counted. Throws DegenerateDual when either
/// snapshot has min MA_h <= 0.
struct DualResidualReport {
    double t = 0.0;
    double dt_snap = 0.0;
    double hx = 0.0;
    double hy = 0.0;
    double max_abs = 0.0;
    double mean_abs = 0.0;
    double max_abs_uniform = 0.0;  // over nodes whose whole stencil is class 0
    int64_t n_valid = 0;
    int64_t n_uniform = 0;
    int64_t n_singular = 0;
    int64_t n_skipped = 0;
};
DualResidualReport dual_residual(const SolutionTrace& tr, const ProblemSpec& spec,
                                 std::size_t t_index, double eps_sing = 1e-12);

}  // namespace pmaflow
