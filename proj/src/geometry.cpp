#include "pmaflow/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace pmaflow {

namespace {

/// Eigendecomposition of an SPD form, ascending eigenvalues, rotation angle
/// of the first eigenvector.
void principal_axes(const Sym2& Q, double& l1, double& l2, double& cs, double& sn) {
    double half_tr = 0.5 * (Q.xx + Q.yy);
    double disc = std::sqrt(std::max(0.0, half_tr * half_tr - Q.det()));
    l1 = half_tr - disc;
    l2 = half_tr + disc;
    if (std::fabs(Q.xy) < 1e-300 * std::max(1.0, std::fabs(Q.xx))) {
        if (Q.xx <= Q.yy) {
            cs = 1.0;
            sn = 0.0;
        } else {
            cs = 0.0;
            sn = 1.0;
        }
        return;
    }
    // Eigenvector for l1: (Q.xy, l1 - Q.xx) or (l1 - Q.yy, Q.xy).
    Vec2 v{Q.xy, l1 - Q.xx};
    if (v.norm2() < 1e-300) v = Vec2{l1 - Q.yy, Q.xy};
    double n = v.norm();
    cs = v.x / n;
    sn = v.y / n;
}

}  // namespace

Vec2 Domain::boundary_point(double theta) const {
    double px = a * std::cos(theta);
    double py = b * std::sin(theta);
    return {center.x + cs * px - sn * py, center.y + sn * px + cs * py};
}

Domain make_disk(Vec2 center, double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw NonConvexDomain("disk radius must be positive, got " + format_double(radius));
    Domain d;
    d.kind = DomainKind::disk;
    d.center = center;
    double q = 1.0 / (radius * radius);
    d.Q = {q, 0.0, q};
    d.a = d.b = radius;
    d.cs = 1.0;
    d.sn = 0.0;
    return d;
}

Domain make_ellipse(Vec2 center, Sym2 Q) {
    if (!std::isfinite(Q.xx) || !std::isfinite(Q.xy) || !std::isfinite(Q.yy) ||
        Q.xx <= 0.0 || Q.det() <= 0.0)
        throw NonConvexDomain("ellipse form must be symmetric positive definite");
    Domain d;
    d.kind = DomainKind::ellipse;
    d.center = center;
    d.Q = Q;
    double l1 = 0.0, l2 = 0.0;
    principal_axes(Q, l1, l2, d.cs, d.sn);
    if (l1 <= 0.0) throw NonConvexDomain("ellipse form must be symmetric positive definite");
    d.a = 1.0 / std::sqrt(l1);
    d.b = 1.0 / std::sqrt(l2);
    return d;
}

namespace {

constexpr double kMembershipSlack = 1e-12;

/// Nearest-point parameter on the ellipse (a cos t, b sin t) to a point p in
/// principal coordinates. Dense scan then Newton on the stationarity
/// condition g(t) = (e(t) - p) . e'(t) = 0.
double nearest_param(double a, double b, Vec2 p) {
    auto g = [&](double t) {
        double ct = std::cos(t), st = std::sin(t);
        return (b * b - a * a) * st * ct + a * p.x * st - b * p.y * ct;
    };
    auto dist2 = [&](double t) {
        double dx = a * std::cos(t) - p.x;
        double dy = b * std::sin(t) - p.y;
        return dx * dx + dy * dy;
    };
    const int n = 512;
    double best_t = 0.0;
    double best_d = dist2(0.0);
    for (int i = 1; i < n; ++i) {
        double t = 2.0 * 3.14159265358979323846 * double(i) / double(n);
        double d = dist2(t);
        if (d < best_d) {
            best_d = d;
            best_t = t;
        }
    }
    double t = best_t;
    for (int it = 0; it < 40; ++it) {
        double ct = std::cos(t), st = std::sin(t);
        double gv = (b * b - a * a) * st * ct + a * p.x * st - b * p.y * ct;
        double gp = (b * b - a * a) * (ct * ct - st * st) + a * p.x * ct + b * p.y * st;
        if (std::fabs(gp) < 1e-300) break;
        double step = gv / gp;
        t -= step;
        if (std::fabs(step) < 1e-15) break;
    }
    return dist2(t) <= best_d ? t : best_t;
}

Vec2 to_principal(const Domain& dom, Vec2 x) {
    Vec2 d = x - dom.center;
    return {dom.cs * d.x + dom.sn * d.y, -dom.sn * d.x + dom.cs * d.y};
}

Vec2 from_principal(const Domain& dom, Vec2 p) {
    return {dom.center.x + dom.cs * p.x - dom.sn * p.y,
            dom.center.y + dom.sn * p.x + dom.cs * p.y};
}

}  // namespace

double boundary_distance(const Domain& dom, Vec2 x) {
    if (dom.form(x) > 1.0 + kMembershipSlack)
        throw OutsideDomain("point (" + format_double(x.x) + ", " + format_double(x.y) +
                            ") lies outside the domain closure");
    if (dom.kind == DomainKind::disk) return dom.a - (x - dom.center).norm();
    Vec2 p = to_principal(dom, x);
    double t = nearest_param(dom.a, dom.b, p);
    double dx = dom.a * std::cos(t) - p.x;
    double dy = dom.b * std::sin(t) - p.y;
    return std::sqrt(dx * dx + dy * dy);
}

Vec2 project_boundary(const Domain& dom, Vec2 x) {
    if (dom.form(x) > 1.0 + kMembershipSlack)
        throw OutsideDomain("point (" + format_double(x.x) + ", " + format_double(x.y) +
                            ") lies outside the domain closure");
    if (dom.kind == DomainKind::disk) {
        Vec2 d = x - dom.center;
        double n = d.norm();
        if (n < 1e-300) return {dom.center.x + dom.a, dom.center.y};
        return dom.center + d * (dom.a / n);
    }
    Vec2 p = to_principal(dom, x);
    double t = nearest_param(dom.a, dom.b, p);
    return from_principal(dom, {dom.a * std::cos(t), dom.b * std::sin(t)});
}

std::array<Vec2, 2> domain_bbox(const Domain& dom) {
    // Support widths along the coordinate axes: sqrt((Q^{-1})_ii).
    double det = dom.Q.det();
    double wx = std::sqrt(dom.Q.yy / det);
    double wy = std::sqrt(dom.Q.xx / det);
    return {Vec2{dom.center.x - wx, dom.center.y - wy},
            Vec2{dom.center.x + wx, dom.center.y + wy}};
}

double ray_exit_length(const Domain& dom, Vec2 x, Vec2 dir) {
    Vec2 rel = x - dom.center;
    double qa = dir.dot(dom.Q.apply(dir));
    double qb = 2.0 * dir.dot(dom.Q.apply(rel));
    double qc = rel.dot(dom.Q.apply(rel)) - 1.0;
    double disc = qb * qb - 4.0 * qa * qc;
    if (disc < 0.0 || qa <= 0.0)
        throw OutsideDomain("ray does not exit through the boundary");
    return (-qb + std::sqrt(disc)) / (2.0 * qa);
}

Vec2 Grid::dir(int k) const {
    double dx = kDirSteps[k][0], dy = kDirSteps[k][1];
    if (k < 4) return {dx, dy};
    double inv = 1.0 / std::sqrt(2.0);
    return {dx * inv, dy * inv};
}

int32_t Grid::find(int32_t i, int32_t j) const {
    auto it = index.find({i, j});
    return it == index.end() ? -1 : it->second;
}

std::shared_ptr<const Grid> build_grid(const Domain& dom, double h) {
    if (!(h > 0.0) || !std::isfinite(h))
        throw ConfigError("grid spacing must be positive, got " + format_double(h));

    auto grid = std::make_shared<Grid>();
    grid->domain = dom;
    grid->h = h;

    auto box = domain_bbox(dom);
    grid->origin = box[0];
    int32_t ni = int32_t(std::floor((box[1].x - box[0].x) / h)) + 1;
    int32_t nj = int32_t(std::floor((box[1].y - box[0].y) / h)) + 1;

    for (int32_t j = 0; j <= nj; ++j) {
        for (int32_t i = 0; i <= ni; ++i) {
            Vec2 p{box[0].x + h * double(i), box[0].y + h * double(j)};
            if (!dom.contains(p)) continue;
            grid->index[{i, j}] = int32_t(grid->interior.size());
            grid->interior.push_back(p);
            grid->ij.push_back({i, j});
        }
    }
    if (grid->interior.empty())
        throw EmptyGrid("no interior lattice nodes at spacing h = " + format_double(h));

    std::map<std::pair<double, double>, int32_t> bindex;
    grid->arms.resize(grid->n_interior());
    grid->has_cut.assign(grid->n_interior(), 0);

    for (std::size_t n = 0; n < grid->n_interior(); ++n) {
        Vec2 p = grid->interior[n];
        auto [i, j] = grid->ij[n];
        for (int k = 0; k < 8; ++k) {
            int32_t nb = grid->find(i + Grid::kDirSteps[k][0], j + Grid::kDirSteps[k][1]);
            if (nb >= 0) {
                grid->arms[n][std::size_t(k)] = {nb, 0, grid->full_len(k)};
                continue;
            }
            Vec2 d = grid->dir(k);
            double s = ray_exit_length(dom, p, d);
            s = std::min(s, grid->full_len(k));
            Vec2 exit = p + d * s;
            auto [it, inserted] = bindex.try_emplace({exit.x, exit.y}, int32_t(grid->boundary.size()));
            if (inserted) grid->boundary.push_back(exit);
            grid->arms[n][std::size_t(k)] = {it->second, 1, s};
            grid->has_cut[n] = 1;
        }
    }
    return grid;
}

}  // namespace pmaflow
