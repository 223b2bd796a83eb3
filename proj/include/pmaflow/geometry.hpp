#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "pmaflow/common.hpp"

namespace pmaflow {

enum class DomainKind { disk, ellipse };

/// Bounded convex domain: open disk or open ellipse. Membership is
/// (x - c)^T Q (x - c) < 1 with Q symmetric positive definite (for a disk of
/// radius r, Q = I / r^2).
struct Domain {
    DomainKind kind = DomainKind::disk;
    Vec2 center{0.0, 0.0};
    Sym2 Q{1.0, 0.0, 1.0};

    // Principal decomposition Q = R diag(1/a^2, 1/b^2) R^T, cached at
    // construction: semi-axes a >= b, R = [[cs, -sn], [sn, cs]].
    double a = 1.0;
    double b = 1.0;
    double cs = 1.0;
    double sn = 0.0;

    double form(Vec2 p) const {
        Vec2 d = p - center;
        return d.dot(Q.apply(d));
    }
    bool contains(Vec2 p) const { return form(p) < 1.0; }

    /// Point on the boundary at principal-axis parameter theta:
    /// c + R (a cos(theta), b sin(theta)).
    Vec2 boundary_point(double theta) const;
};

Domain make_disk(Vec2 center, double radius);
Domain make_ellipse(Vec2 center, Sym2 Q);

/// Signed distance to the boundary, positive inside, zero on the boundary.
/// Throws OutsideDomain for points beyond the closure.
double boundary_distance(const Domain& dom, Vec2 x);

/// Closest boundary point to x (x inside or on the closure).
Vec2 project_boundary(const Domain& dom, Vec2 x);

/// Axis-aligned bounding box {lo, hi} of the closed domain.
std::array<Vec2, 2> domain_bbox(const Domain& dom);

/// Euclidean length s > 0 of the ray x + s*dir (unit dir) until it exits the
/// domain. x must be inside.
double ray_exit_length(const Domain& dom, Vec2 x, Vec2 dir);

/// One stencil arm. For a full arm the target is an interior node at lattice
/// distance h (axes) or sqrt(2)h (diagonals); a cut arm ends at a boundary
/// node wherever the ray leaves the domain.
struct Arm {
    int32_t target = -1;
    uint8_t to_boundary = 0;
    double len = 0.0;
};

/// Interior lattice with boundary-aware stencil arms.
///
/// Interior nodes are the lattice points bbox_lo + h*(i, j) strictly inside
/// the domain. Every node carries 8 arms (directions +x, -x, +y, -y and the
/// two diagonals, see kDirSteps); arms that would leave the domain are
/// shortened to their boundary exit point, and those exit points become
/// boundary nodes (deduplicated by exact coordinates).
struct Grid {
    Domain domain;
    double h = 0.0;
    Vec2 origin;  // lattice anchor = bbox lower corner

    std::vector<Vec2> interior;
    std::vector<std::array<int32_t, 2>> ij;
    std::vector<Vec2> boundary;
    std::vector<std::array<Arm, 8>> arms;
    std::vector<uint8_t> has_cut;  // 1 if any of the node's arms is shortened
    std::map<std::pair<int32_t, int32_t>, int32_t> index;

    // Integer lattice steps per direction; opposite(k) == k^1.
    static constexpr int kDirSteps[8][2] = {
        {1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, -1}, {1, -1}, {-1, 1}};

    std::size_t n_interior() const { return interior.size(); }
    std::size_t n_boundary() const { return boundary.size(); }

    /// Full (uncut) Euclidean length of arm direction k.
    double full_len(int k) const { return k < 4 ? h : h * std::sqrt(2.0); }

    /// Unit vector of arm direction k.
    Vec2 dir(int k) const;

    int32_t find(int32_t i, int32_t j) const;
};

std::shared_ptr<const Grid> build_grid(const Domain& dom, double h);

/// Scalar field sampled on a grid: vi on interior nodes, vb on boundary nodes.
struct GridFunction {
    std::shared_ptr<const Grid> grid;
    std::vector<double> vi;
    std::vector<double> vb;

    GridFunction() = default;
    explicit GridFunction(std::shared_ptr<const Grid> g)
        : grid(std::move(g)), vi(grid->n_interior(), 0.0), vb(grid->n_boundary(), 0.0) {}

    /// Value at the end of arm `a`.
    double at_arm(const Arm& a) const {
        return a.to_boundary ? vb[std::size_t(a.target)] : vi[std::size_t(a.target)];
    }
};

}  // namespace pmaflow
