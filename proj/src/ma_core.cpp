#include "pmaflow/ma_core.hpp"

#include <algorithm>
#include <cmath>

namespace pmaflow {

namespace {

inline double pair_value(double da, double db) {
    double pa = std::max(da, 0.0), pb = std::max(db, 0.0);
    double na = std::min(da, 0.0), nb = std::min(db, 0.0);
    return pa * pb + na + nb;
}

inline double pair_lip(double da, double db, double wa, double wb) {
    return wa * std::max(std::max(db, 0.0), 1.0) + wb * std::max(std::max(da, 0.0), 1.0);
}

}  // namespace

SecondDiffs second_diffs(const GridFunction& u, std::size_t node) {
    SecondDiffs out;
    const auto& arms = u.grid->arms[node];
    const double uc = u.vi[node];
    for (int k = 0; k < 4; ++k) {
        const Arm& plus = arms[std::size_t(2 * k)];
        const Arm& minus = arms[std::size_t(2 * k + 1)];
        double dp = plus.len, dm = minus.len;
        double up = u.at_arm(plus), um = u.at_arm(minus);
        out.d[k] = 2.0 / (dp + dm) * ((up - uc) / dp + (um - uc) / dm);
        out.w[k] = 2.0 / (dp * dm);
    }
    return out;
}

Vec2 gradient_central(const GridFunction& u, std::size_t node) {
    const auto& arms = u.grid->arms[node];
    auto axis = [&](int k) {
        const Arm& plus = arms[std::size_t(2 * k)];
        const Arm& minus = arms[std::size_t(2 * k + 1)];
        return (u.at_arm(plus) - u.at_arm(minus)) / (plus.len + minus.len);
    };
    return {axis(0), axis(1)};
}

std::vector<Vec2> gradient_central(const GridFunction& u) {
    std::vector<Vec2> out(u.grid->n_interior());
    parallel_for(out.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t n = b; n < e; ++n) out[n] = gradient_central(u, n);
    });
    return out;
}

Sym2 hessian_central(const GridFunction& u, std::size_t node) {
    SecondDiffs sd = second_diffs(u, node);
    return {sd.d[0], 0.5 * (sd.d[2] - sd.d[3]), sd.d[1]};
}

std::vector<Sym2> hessian_central(const GridFunction& u) {
    std::vector<Sym2> out(u.grid->n_interior());
    parallel_for(out.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t n = b; n < e; ++n) out[n] = hessian_central(u, n);
    });
    return out;
}

double det_d2_monotone(const GridFunction& u, std::size_t node, int width) {
    SecondDiffs sd = second_diffs(u, node);
    double v = pair_value(sd.d[0], sd.d[1]);
    if (width >= 2) v = std::min(v, pair_value(sd.d[2], sd.d[3]));
    return v;
}

double det_d2_central(const GridFunction& u, std::size_t node) {
    return hessian_central(u, node).det();
}

MaNode ma_node(const GridFunction& u, std::size_t node, int width) {
    SecondDiffs sd = second_diffs(u, node);
    MaNode out;
    out.ma = pair_value(sd.d[0], sd.d[1]);
    out.lip = pair_lip(sd.d[0], sd.d[1], sd.w[0], sd.w[1]);
    if (width >= 2) {
        out.ma = std::min(out.ma, pair_value(sd.d[2], sd.d[3]));
        out.lip = std::max(out.lip, pair_lip(sd.d[2], sd.d[3], sd.w[2], sd.w[3]));
    }
    out.hess = {sd.d[0], 0.5 * (sd.d[2] - sd.d[3]), sd.d[1]};
    return out;
}

std::pair<double, double> eig_2x2(const Sym2& H) {
    double mid = 0.5 * (H.xx + H.yy);
    double off = 0.5 * (H.xx - H.yy);
    double disc = std::sqrt(std::max(0.0, off * off + H.xy * H.xy));
    return {mid - disc, mid + disc};
}

Eig2 eig_2x2_full(const Sym2& H) {
    auto [l1, l2] = eig_2x2(H);
    Eig2 out;
    out.l1 = l1;
    out.l2 = l2;
    // Eigenvector for l2 from whichever residual column is better conditioned.
    Vec2 v{H.xy, l2 - H.xx};
    Vec2 w{l2 - H.yy, H.xy};
    if (w.norm2() > v.norm2()) v = w;
    double n = v.norm();
    if (n < 1e-300) {
        out.v1 = {1.0, 0.0};
        out.v2 = {0.0, 1.0};
        return out;
    }
    out.v2 = {v.x / n, v.y / n};
    out.v1 = {-out.v2.y, out.v2.x};
    return out;
}

Sym2 cofactor_inverse(const Sym2& H, double eps_sing) {
    double det = H.det();
    if (!(det > eps_sing))
        throw SingularHessian("determinant " + format_double(det) +
                              " at or below eps_sing = " + format_double(eps_sing));
    return {H.yy / det, -H.xy / det, H.xx / det};
}

}  // namespace pmaflow
