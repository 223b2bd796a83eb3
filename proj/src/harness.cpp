#include "pmaflow/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pmaflow {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ComparisonReport check_comparison(const SolutionTrace& tw, const ProblemSpec& sw,
                                  const SolutionTrace& tv, const ProblemSpec& sv,
                                  double tolerance) {
    if (tw.grid != tv.grid) throw IncompatibleTraces("comparison traces live on different grids");
    if (tw.snaps.size() != tv.snaps.size())
        throw IncompatibleTraces("comparison traces have different step counts");
    const Grid& G = *tw.grid;

    ComparisonReport rep;
    rep.tolerance = tolerance;
    rep.data_ordered = true;
    rep.worst_gap = -kInf;

    ScalarField psi_w = sw.psi.empty() ? ScalarField::zero() : sw.psi;
    ScalarField psi_v = sv.psi.empty() ? ScalarField::zero() : sv.psi;

    for (std::size_t k = 0; k < tw.snaps.size(); ++k) {
        double t = tw.snaps[k].t;
        if (std::fabs(t - tv.snaps[k].t) > 1e-12 * std::max(1.0, tw.T))
            throw IncompatibleTraces("comparison traces have different step times");
        const GridFunction& w = tw.snaps[k].u;
        const GridFunction& v = tv.snaps[k].u;

        for (std::size_t p = 0; p < G.n_interior(); ++p) {
            if (psi_w(G.interior[p], t) < psi_v(G.interior[p], t) - tolerance)
                rep.data_ordered = false;
            double gap = w.vi[p] - v.vi[p];
            if (gap > rep.worst_gap) {
                rep.worst_gap = gap;
                rep.worst_t = t;
            }
            if (gap > tolerance) ++rep.violations;
            ++rep.nodes_checked;
        }
        for (std::size_t b = 0; b < G.n_boundary(); ++b) {
            double gap = w.vb[b] - v.vb[b];
            if (gap > tolerance) rep.data_ordered = false;  // boundary data not ordered
            if (gap > rep.worst_gap) {
                rep.worst_gap = gap;
                rep.worst_t = t;
            }
            ++rep.nodes_checked;
        }
        // Initial interior data belong to the parabolic boundary as well.
        if (k == 0)
            for (std::size_t p = 0; p < G.n_interior(); ++p)
                if (w.vi[p] - v.vi[p] > tolerance) rep.data_ordered = false;
        ++rep.steps_checked;
    }
    rep.pass = rep.data_ordered && rep.violations == 0;
    return rep;
}

UtBoundReport check_ut_bounds(const SolutionTrace& tr, const ProblemSpec& spec, double kappa) {
    if (tr.snaps.empty() || tr.diag.empty())
        throw IncompatibleTraces("trace carries no steps to check");
    UtBoundReport rep;
    rep.applicable = validate_conditions(spec).all_pass;
    rep.slack = kappa * tr.grid->h;

    const GridFunction& u0 = tr.snaps.front().u;
    double ma0 = kInf;
    for (std::size_t p = 0; p < tr.grid->n_interior(); ++p)
        ma0 = std::min(ma0, det_d2_monotone(u0, p, tr.stencil_width));
    rep.bound = std::min(spec.c0, ma0);

    rep.observed_min = kInf;
    rep.observed_max = -kInf;
    for (const Diagnostics& d : tr.diag) {
        rep.observed_min = std::min(rep.observed_min, d.min_ut_psi);
        rep.observed_max = std::max(rep.observed_max, d.max_ut_psi);
    }
    rep.margin = rep.observed_min - (rep.bound - rep.slack);
    rep.pass = !rep.applicable || rep.margin >= 0.0;
    return rep;
}

EigenBoundReport check_eigen_bounds(const SolutionTrace& tr, const ProblemSpec& spec,
                                    double kappa) {
    if (tr.snaps.empty()) throw IncompatibleTraces("trace carries no snapshots");
    EigenBoundReport rep;
    double min_ma = kInf;
    for (const Diagnostics& d : tr.diag) min_ma = std::min(min_ma, d.min_ma);
    rep.applicable = spec.kind == EquationKind::pma && min_ma > 0.0;
    rep.worst_margin = kInf;
    if (!rep.applicable) {
        rep.pass = true;
        return rep;
    }
    const double h = tr.grid->h;
    for (const Snapshot& s : tr.snaps) {
        EigenBoundRow row;
        row.t = s.t;
        row.min_lambda = kInf;
        for (std::size_t p = 0; p < tr.grid->n_interior(); ++p)
            row.min_lambda = std::min(row.min_lambda, eig_min_of(hessian_central(s.u, p)));
        DualField F = legendre_transform(s.u, auto_dual_grid(s.u), s.t);
        row.ring_sup = dual_hessian_sup(F).ring_sup;
        row.bound = row.ring_sup > 0.0 ? 1.0 / row.ring_sup - kappa * h : -kInf;
        row.pass = row.min_lambda >= row.bound;
        rep.worst_margin = std::min(rep.worst_margin, row.min_lambda - row.bound);
        rep.rows.push_back(row);
    }
    rep.pass = std::all_of(rep.rows.begin(), rep.rows.end(),
                           [](const EigenBoundRow& r) { return r.pass; });
    return rep;
}

DualMaxReport check_dual_max_principle(const SolutionTrace& tr, const ProblemSpec& spec,
                                       double kappa) {
    if (tr.snaps.empty()) throw IncompatibleTraces("trace carries no snapshots");
    (void)spec;
    DualMaxReport rep;
    rep.worst_margin = kInf;
    const double h = tr.grid->h;
    for (const Snapshot& s : tr.snaps) {
        DualField F = legendre_transform(s.u, auto_dual_grid(s.u), s.t);
        DualHessianSup sup = dual_hessian_sup(F);
        DualMaxRow row;
        row.t = s.t;
        row.interior_sup = sup.interior_sup;
        row.ring_sup = sup.ring_sup;
        row.bound = sup.ring_sup + kappa * h;
        row.pass = row.interior_sup <= row.bound;
        rep.worst_margin = std::min(rep.worst_margin, row.bound - row.interior_sup);
        rep.rows.push_back(row);
    }
    rep.pass = std::all_of(rep.rows.begin(), rep.rows.end(),
                           [](const DualMaxRow& r) { return r.pass; });
    return rep;
}

HolderReport holder_seminorm(const std::vector<Snapshot>& snaps, double alpha, int64_t pairs,
                             uint64_t seed) {
    if (snaps.size() < 2) throw IncompatibleTraces("Holder quotients need two snapshots");
    if (!(alpha > 0.0 && alpha <= 2.0)) throw RangeError("Holder exponent must be in (0, 2]");
    const Grid& G = *snaps.front().u.grid;
    const std::size_t ni = G.n_interior();
    const std::size_t nn = ni + G.n_boundary();
    const std::size_t nt = snaps.size();

    auto value = [&](std::size_t node, std::size_t k) {
        return node < ni ? snaps[k].u.vi[node] : snaps[k].u.vb[node - ni];
    };
    auto place = [&](std::size_t node) {
        return node < ni ? G.interior[node] : G.boundary[node - ni];
    };

    // Weyl sequence on the 4-torus: multipliers 1/g^j with g^5 = g + 1, the
    // offsets drawn from the seed. Deterministic and uniformly space-filling,
    // so the running sup is monotone in `pairs` by construction.
    const double g = 1.1673039782614186843;
    double mult[4], off[4];
    SplitMix64 rng(seed);
    double inv = 1.0;
    for (int j = 0; j < 4; ++j) {
        inv /= g;
        mult[j] = inv;
        off[j] = rng.uniform();
    }
    auto coord = [&](int64_t k, int j, std::size_t n) {
        double f = std::fmod(double(k + 1) * mult[j] + off[j], 1.0);
        std::size_t idx = std::size_t(f * double(n));
        return std::min(idx, n - 1);
    };

    HolderReport rep;
    rep.alpha = alpha;
    rep.pairs = pairs;
    rep.seed = seed;
    double sum = 0.0;
    int64_t used = 0;
    for (int64_t k = 0; k < pairs; ++k) {
        std::size_t n1 = coord(k, 0, nn), k1 = coord(k, 1, nt);
        std::size_t n2 = coord(k, 2, nn), k2 = coord(k, 3, nt);
        Vec2 x1 = place(n1), x2 = place(n2);
        double dt = std::fabs(snaps[k1].t - snaps[k2].t);
        double d2 = (x1 - x2).norm2() + dt;
        if (d2 <= 0.0) continue;
        double q = std::fabs(value(n1, k1) - value(n2, k2)) / std::pow(d2, 0.5 * alpha);
        rep.seminorm = std::max(rep.seminorm, q);
        sum += q;
        ++used;
    }
    rep.mean_quotient = used > 0 ? sum / double(used) : 0.0;
    return rep;
}

std::vector<Snapshot> ut_quotients(const SolutionTrace& tr) {
    if (tr.snaps.size() < 2) throw IncompatibleTraces("difference quotients need two snapshots");
    std::vector<Snapshot> out;
    out.reserve(tr.snaps.size() - 1);
    for (std::size_t k = 0; k + 1 < tr.snaps.size(); ++k) {
        const Snapshot& a = tr.snaps[k];
        const Snapshot& b = tr.snaps[k + 1];
        double dt = b.t - a.t;
        if (!(dt > 0.0)) throw IncompatibleTraces("snapshots are not time-ordered");
        Snapshot q;
        q.t = 0.5 * (a.t + b.t);
        q.u = GridFunction(tr.grid);
        for (std::size_t p = 0; p < q.u.vi.size(); ++p)
            q.u.vi[p] = (b.u.vi[p] - a.u.vi[p]) / dt;
        for (std::size_t i = 0; i < q.u.vb.size(); ++i)
            q.u.vb[i] = (b.u.vb[i] - a.u.vb[i]) / dt;
        out.push_back(std::move(q));
    }
    return out;
}

GcfGradientReport check_gcf_gradient_bound(const SolutionTrace& coarse,
                                           const SolutionTrace& fine, double kappa) {
    if (coarse.snaps.empty() || fine.snaps.empty())
        throw IncompatibleTraces("gradient comparison needs snapshots on both traces");
    GcfGradientReport rep;
    for (const Snapshot& s : coarse.snaps)
        rep.sup_coarse = std::max(rep.sup_coarse, sup_gradient(s.u));
    for (const Snapshot& s : fine.snaps)
        rep.sup_fine = std::max(rep.sup_fine, sup_gradient(s.u));
    double lo = std::min(rep.sup_coarse, rep.sup_fine);
    double hi = std::max(rep.sup_coarse, rep.sup_fine);
    rep.ratio = lo > 0.0 ? hi / lo : 1.0;
    rep.bound = 1.0 + kappa * coarse.grid->h;
    rep.pass = rep.ratio <= rep.bound;
    return rep;
}

}  // namespace pmaflow
