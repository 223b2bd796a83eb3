#include "pmaflow/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace pmaflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct PrimalNodes {
    std::vector<Vec2> pos;
    std::vector<double> val;
    std::vector<uint8_t> cls;  // 0 uniform interior, 1 cut interior, 2 boundary
};

PrimalNodes collect_nodes(const GridFunction& u) {
    const Grid& G = *u.grid;
    PrimalNodes P;
    std::size_t n = G.n_interior() + G.n_boundary();
    P.pos.reserve(n);
    P.val.reserve(n);
    P.cls.reserve(n);
    for (std::size_t p = 0; p < G.n_interior(); ++p) {
        P.pos.push_back(G.interior[p]);
        P.val.push_back(u.vi[p]);
        P.cls.push_back(G.has_cut[p] ? 1 : 0);
    }
    for (std::size_t b = 0; b < G.n_boundary(); ++b) {
        P.pos.push_back(G.boundary[b]);
        P.val.push_back(u.vb[b]);
        P.cls.push_back(2);
    }
    return P;
}

struct AxisRange {
    double lo = kInf;
    double hi = -kInf;
};

void gradient_ranges(const GridFunction& u, AxisRange& rx, AxisRange& ry) {
    for (std::size_t p = 0; p < u.grid->n_interior(); ++p) {
        Vec2 g = gradient_central(u, p);
        rx.lo = std::min(rx.lo, g.x);
        rx.hi = std::max(rx.hi, g.x);
        ry.lo = std::min(ry.lo, g.y);
        ry.hi = std::max(ry.hi, g.y);
    }
}

struct AxisBuild {
    double a = 0.0;
    double h = 0.0;
    int n = 0;
};

AxisBuild build_axis(const AxisRange& r, double spacing) {
    double range = std::max(r.hi - r.lo, 0.0);
    int cells = int(std::ceil(range / spacing - 1e-9));
    if (cells > 16384) {
        spacing = range / 16384.0;
        cells = 16384;
    }
    int pad = std::max(1, int(std::ceil(0.05 * cells)));
    AxisBuild b;
    b.h = spacing;
    b.a = r.lo - pad * spacing;
    b.n = cells + 2 * pad + 1;
    return b;
}

}  // namespace

DualGrid auto_dual_grid(const GridFunction& u) {
    const Grid& G = *u.grid;
    if (G.n_interior() == 0) throw EmptyGrid("dual grid needs interior nodes");
    double dmin_x = kInf, dmin_y = kInf;
    for (std::size_t p = 0; p < G.n_interior(); ++p) {
        const auto& arms = G.arms[p];
        SecondDiffs sd = second_diffs(u, p);
        if (!arms[0].to_boundary && !arms[1].to_boundary) dmin_x = std::min(dmin_x, sd.d[0]);
        if (!arms[2].to_boundary && !arms[3].to_boundary) dmin_y = std::min(dmin_y, sd.d[1]);
    }
    double sx = dmin_x > 1e-9 && std::isfinite(dmin_x) ? dmin_x * G.h : G.h;
    double sy = dmin_y > 1e-9 && std::isfinite(dmin_y) ? dmin_y * G.h : G.h;

    AxisRange rx, ry;
    gradient_ranges(u, rx, ry);
    AxisBuild bx = build_axis(rx, sx);
    AxisBuild by = build_axis(ry, sy);
    DualGrid dg;
    dg.ax = bx.a;
    dg.hx = bx.h;
    dg.nx = bx.n;
    dg.ay = by.a;
    dg.hy = by.h;
    dg.ny = by.n;
    return dg;
}

DualGrid manual_dual_grid(double ax, double ay, double hx, double hy, int nx, int ny) {
    if (!(hx > 0.0) || !(hy > 0.0)) throw RangeError("dual spacing must be positive");
    if (nx < 2 || ny < 2) throw DualGridTooSmall("dual grid needs at least 2 nodes per axis");
    DualGrid dg;
    dg.ax = ax;
    dg.ay = ay;
    dg.hx = hx;
    dg.hy = hy;
    dg.nx = nx;
    dg.ny = ny;
    dg.forced = true;
    return dg;
}

namespace {

void check_coverage(const GridFunction& u, const DualGrid& dg) {
    if (!dg.forced) return;
    AxisRange rx, ry;
    gradient_ranges(u, rx, ry);
    double tol = 1e-12;
    if (rx.lo < dg.ax - tol || rx.hi > dg.y1(dg.nx - 1) + tol || ry.lo < dg.ay - tol ||
        ry.hi > dg.y2(dg.ny - 1) + tol)
        throw DualGridTooSmall("dual box does not cover the discrete gradient range");
}

/// Canonical score of primal node (x, u) against slope y, with the exact
/// rounding sequence all transform paths share.
inline double score_part(double y1, double px, double uval) { return y1 * px - uval; }

}  // namespace

DualField legendre_transform_brute(const GridFunction& u, const DualGrid& dg, double t) {
    check_coverage(u, dg);
    PrimalNodes P = collect_nodes(u);
    const std::size_t n = P.val.size();
    DualField F;
    F.grid = dg;
    F.t = t;
    F.U.resize(dg.size());
    F.arg.resize(dg.size());
    F.att.resize(dg.size());
    for (int j = 0; j < dg.ny; ++j) {
        double y2 = dg.y2(j);
        for (int i = 0; i < dg.nx; ++i) {
            double y1 = dg.y1(i);
            double best = -kInf, best_part = -kInf;
            int32_t bidx = -1;
            for (std::size_t g = 0; g < n; ++g) {
                double part = score_part(y1, P.pos[g].x, P.val[g]);
                double s = part + y2 * P.pos[g].y;
                if (s > best || (s == best && part > best_part)) {
                    best = s;
                    best_part = part;
                    bidx = int32_t(g);
                }
            }
            if (bidx < 0)
                throw NonFiniteField("conjugation saw non-finite primal values");
            std::size_t idx = std::size_t(j) * dg.nx + i;
            F.U[idx] = best;
            F.arg[idx] = bidx;
            F.att[idx] = P.cls[std::size_t(bidx)];
        }
    }
    return F;
}

DualField legendre_transform(const GridFunction& u, const DualGrid& dg, double t) {
    check_coverage(u, dg);
    PrimalNodes P = collect_nodes(u);
    const std::size_t n = P.val.size();

    // Nodes sharing an exact x2 coordinate contribute the same fl(y2*x2) per
    // dual row, so the per-column max of the partial score can be taken once
    // per group. Groups iterate in ascending x2; the cross-group tie compare
    // reproduces the brute order (score, partial, index) regardless.
    std::map<double, std::size_t> group_of;
    struct Group {
        double y_coord;
        std::vector<int32_t> members;
    };
    std::vector<Group> groups;
    for (std::size_t g = 0; g < n; ++g) {
        auto [it, fresh] = group_of.try_emplace(P.pos[g].y, groups.size());
        if (fresh) groups.push_back({P.pos[g].y, {}});
        groups[it->second].members.push_back(int32_t(g));
    }
    std::vector<std::size_t> order;
    order.reserve(groups.size());
    for (const auto& [coord, gi] : group_of) order.push_back(gi);

    const std::size_t nG = groups.size();
    std::vector<double> col_best(nG * dg.nx);
    std::vector<int32_t> col_idx(nG * dg.nx);
    for (std::size_t gi = 0; gi < nG; ++gi) {
        const Group& grp = groups[gi];
        for (int i = 0; i < dg.nx; ++i) {
            double y1 = dg.y1(i);
            double best = -kInf;
            int32_t bidx = -1;
            for (int32_t g : grp.members) {
                double part = score_part(y1, P.pos[std::size_t(g)].x, P.val[std::size_t(g)]);
                if (part > best) {
                    best = part;
                    bidx = g;
                }
            }
            col_best[gi * dg.nx + i] = best;
            col_idx[gi * dg.nx + i] = bidx;
        }
    }

    DualField F;
    F.grid = dg;
    F.t = t;
    F.U.resize(dg.size());
    F.arg.resize(dg.size());
    F.att.resize(dg.size());
    std::vector<double> row_term(nG);
    for (int j = 0; j < dg.ny; ++j) {
        double y2 = dg.y2(j);
        for (std::size_t gi = 0; gi < nG; ++gi) row_term[gi] = y2 * groups[gi].y_coord;
        for (int i = 0; i < dg.nx; ++i) {
            double best = -kInf, best_part = -kInf;
            int32_t bidx = -1;
            for (std::size_t gi : order) {
                double part = col_best[gi * dg.nx + i];
                double s = part + row_term[gi];
                int32_t g = col_idx[gi * dg.nx + i];
                if (s > best || (s == best && (part > best_part ||
                                               (part == best_part && g < bidx)))) {
                    best = s;
                    best_part = part;
                    bidx = g;
                }
            }
            if (bidx < 0)
                throw NonFiniteField("conjugation saw non-finite primal values");
            std::size_t idx = std::size_t(j) * dg.nx + i;
            F.U[idx] = best;
            F.arg[idx] = bidx;
            F.att[idx] = P.cls[std::size_t(bidx)];
        }
    }
    return F;
}

GridFunction biconjugate(const GridFunction& u, const DualGrid& dg) {
    DualField F = legendre_transform(u, dg);
    const Grid& G = *u.grid;
    GridFunction out(u.grid);
    auto envelope = [&](Vec2 x) {
        double best = -kInf;
        for (int j = 0; j < dg.ny; ++j) {
            double term = x.y * dg.y2(j);
            const double* row = F.U.data() + std::size_t(j) * dg.nx;
            for (int i = 0; i < dg.nx; ++i) {
                double s = (dg.y1(i) * x.x - row[i]) + term;
                best = std::max(best, s);
            }
        }
        return best;
    };
    for (std::size_t p = 0; p < G.n_interior(); ++p) out.vi[p] = envelope(G.interior[p]);
    for (std::size_t b = 0; b < G.n_boundary(); ++b) out.vb[b] = envelope(G.boundary[b]);
    return out;
}

Conjugate1D conjugate_1d(const std::vector<double>& xs, const std::vector<double>& us,
                         const std::vector<double>& ys) {
    if (xs.size() != us.size()) throw ConfigError("node and value counts differ");
    if (xs.empty()) throw ConfigError("conjugate needs at least one node");
    Conjugate1D out;
    out.U.reserve(ys.size());
    out.arg.reserve(ys.size());
    for (double y : ys) {
        double best = -kInf;
        int32_t bidx = -1;
        for (std::size_t g = 0; g < xs.size(); ++g) {
            double s = y * xs[g] - us[g];
            if (s > best) {
                best = s;
                bidx = int32_t(g);
            }
        }
        out.U.push_back(best);
        out.arg.push_back(bidx);
    }
    return out;
}

namespace {

struct DualStencil {
    Sym2 H;
    Vec2 DU;
    bool any_boundary = false;
    bool all_uniform = true;
};

DualStencil dual_stencil(const DualField& F, int i, int j) {
    const DualGrid& dg = F.grid;
    auto at = [&](int ii, int jj) { return F.U[std::size_t(jj) * dg.nx + ii]; };
    DualStencil st;
    for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) {
            uint8_t a = F.att[std::size_t(j + dj) * dg.nx + (i + di)];
            if (a == 2) st.any_boundary = true;
            if (a != 0) st.all_uniform = false;
        }
    double c = at(i, j);
    st.H.xx = (at(i + 1, j) - 2.0 * c + at(i - 1, j)) / (dg.hx * dg.hx);
    st.H.yy = (at(i, j + 1) - 2.0 * c + at(i, j - 1)) / (dg.hy * dg.hy);
    st.H.xy = (at(i + 1, j + 1) - at(i + 1, j - 1) - at(i - 1, j + 1) + at(i - 1, j - 1)) /
              (4.0 * dg.hx * dg.hy);
    st.DU = {(at(i + 1, j) - at(i - 1, j)) / (2.0 * dg.hx),
             (at(i, j + 1) - at(i, j - 1)) / (2.0 * dg.hy)};
    return st;
}

}  // namespace

DualHessianSup dual_hessian_sup(const DualField& F) {
    DualHessianSup out;
    const DualGrid& dg = F.grid;
    for (int j = 1; j + 1 < dg.ny; ++j)
        for (int i = 1; i + 1 < dg.nx; ++i) {
            DualStencil st = dual_stencil(F, i, j);
            auto [l1, l2] = eig_2x2(st.H);
            double norm = std::max(std::fabs(l1), std::fabs(l2));
            if (st.any_boundary) {
                out.ring_sup = std::max(out.ring_sup, norm);
                ++out.n_ring;
            } else {
                out.interior_sup = std::max(out.interior_sup, norm);
                ++out.n_interior;
            }
        }
    return out;
}

DualResidualReport dual_residual(const SolutionTrace& tr, const ProblemSpec& spec,
                                 std::size_t t_index, double eps_sing) {
    if (spec.kind != EquationKind::pma)
        throw ConfigError("the dual residual is defined for the parabolic equation");
    if (t_index == 0 || t_index >= tr.snaps.size())
        throw RangeError("dual residual needs a snapshot with a predecessor");
    const GridFunction& u_now = tr.snaps[t_index].u;
    const GridFunction& u_prev = tr.snaps[t_index - 1].u;
    double t_now = tr.snaps[t_index].t;
    double dt_snap = t_now - tr.snaps[t_index - 1].t;
    if (!(dt_snap > 0.0)) throw IncompatibleTraces("snapshots are not time-ordered");

    for (const GridFunction* f : {&u_now, &u_prev}) {
        double mn = kInf;
        for (std::size_t p = 0; p < f->grid->n_interior(); ++p)
            mn = std::min(mn, det_d2_monotone(*f, p));
        if (mn <= 0.0)
            throw DegenerateDual("snapshot has min MA_h = " + format_double(mn) +
                                 "; conjugation is unreliable");
    }

    DualGrid dg = auto_dual_grid(u_now);
    DualField now = legendre_transform(u_now, dg, t_now);
    DualField prev = legendre_transform(u_prev, dg, tr.snaps[t_index - 1].t);

    ScalarField psi = spec.psi.empty() ? ScalarField::zero() : spec.psi;
    DualResidualReport rep;
    rep.t = t_now;
    rep.dt_snap = dt_snap;
    rep.hx = dg.hx;
    rep.hy = dg.hy;
    double sum = 0.0;
    for (int j = 1; j + 1 < dg.ny; ++j)
        for (int i = 1; i + 1 < dg.nx; ++i) {
            DualStencil st = dual_stencil(now, i, j);
            if (st.any_boundary) {
                ++rep.n_skipped;
                continue;
            }
            double det = st.H.det();
            if (det <= eps_sing) {
                ++rep.n_singular;
                continue;
            }
            std::size_t idx = std::size_t(j) * dg.nx + i;
            double Ut = (now.U[idx] - prev.U[idx]) / dt_snap;
            double r = -Ut - 1.0 / det + psi(st.DU, t_now);
            double a = std::fabs(r);
            rep.max_abs = std::max(rep.max_abs, a);
            sum += a;
            ++rep.n_valid;
            if (st.all_uniform) {
                rep.max_abs_uniform = std::max(rep.max_abs_uniform, a);
                ++rep.n_uniform;
            }
        }
    rep.mean_abs = rep.n_valid > 0 ? sum / double(rep.n_valid) : 0.0;
    return rep;
}

}  // namespace pmaflow
