#include "pmaflow/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

namespace pmaflow {

double gcf_speed(double ma_plus, double grad_sq, double gamma) {
    if (ma_plus <= 0.0) return 0.0;
    return std::pow(ma_plus, gamma) * std::pow(1.0 + grad_sq, 0.5 * (1.0 - 4.0 * gamma));
}

double gcf_speed_unit(double ma_plus, double grad_sq) {
    if (ma_plus <= 0.0) return 0.0;
    return ma_plus * std::pow(1.0 + grad_sq, -1.5);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct EvalReduce {
    double max_lip = 0.0;
    double a11 = 0.0;  // max positive linearized coefficient on u_xx
    double a22 = 0.0;
    double min_quo = kInf;
    double max_quo = -kInf;
    double min_ma = kInf;
    double min_l_core = kInf;
    double max_l_core = -kInf;
    double min_l_cut = kInf;
    double max_l_cut = -kInf;
    bool nonfinite = false;

    void merge(const EvalReduce& o) {
        max_lip = std::max(max_lip, o.max_lip);
        a11 = std::max(a11, o.a11);
        a22 = std::max(a22, o.a22);
        min_quo = std::min(min_quo, o.min_quo);
        max_quo = std::max(max_quo, o.max_quo);
        min_ma = std::min(min_ma, o.min_ma);
        min_l_core = std::min(min_l_core, o.min_l_core);
        max_l_core = std::max(max_l_core, o.max_l_core);
        min_l_cut = std::min(min_l_cut, o.min_l_cut);
        max_l_cut = std::max(max_l_cut, o.max_l_cut);
        nonfinite = nonfinite || o.nonfinite;
    }
};

/// One sweep over the interior: fills rate[] with u_t at the current time and
/// reduces the step-size and diagnostics quantities. All reductions are
/// min/max only, so the merge order (and thread count) cannot change results.
EvalReduce eval_rates(const GridFunction& u, const ProblemSpec& spec, double t, int width,
                      bool central, std::vector<double>& rate) {
    const Grid& G = *u.grid;
    const std::size_t n = G.n_interior();
    rate.resize(n);
    const bool is_gcf = spec.kind == EquationKind::gcf;
    const double gamma = spec.gamma;
    const double gexp = 0.5 * (1.0 - 4.0 * gamma);
    const ScalarField* psi = spec.psi.empty() ? nullptr : &spec.psi;

    EvalReduce total;
    std::mutex mu;
    parallel_for(n, [&](std::size_t lo, std::size_t hi) {
        EvalReduce R;
        for (std::size_t p = lo; p < hi; ++p) {
            double ma, lip;
            Sym2 hess;
            if (central) {
                SecondDiffs sd = second_diffs(u, p);
                hess = {sd.d[0], 0.5 * (sd.d[2] - sd.d[3]), sd.d[1]};
                ma = hess.det();
                lip = sd.w[0] * std::fabs(hess.yy) + sd.w[1] * std::fabs(hess.xx) +
                      0.5 * std::fabs(hess.xy) * std::fabs(sd.w[3] - sd.w[2]);
            } else {
                MaNode m = ma_node(u, p, width);
                ma = m.ma;
                lip = m.lip;
                hess = m.hess;
            }

            double quo;
            if (is_gcf) {
                Vec2 g = gradient_central(u, p);
                double g2 = g.norm2();
                double map = std::max(ma, 0.0);
                double speed =
                    gamma == 1.0 ? gcf_speed_unit(map, g2) : gcf_speed(map, g2, gamma);
                rate[p] = speed;
                quo = speed;
                double fac =
                    map > 0.0 ? gamma * std::pow(map, gamma - 1.0) * std::pow(1.0 + g2, gexp)
                              : 0.0;
                R.max_lip = std::max(R.max_lip, fac * lip);
                R.a11 = std::max(R.a11, fac * std::max(hess.yy, 0.0));
                R.a22 = std::max(R.a22, fac * std::max(hess.xx, 0.0));
            } else {
                double ps = psi ? (*psi)(G.interior[p], t) : 0.0;
                rate[p] = ma - ps;
                quo = ma;
                R.max_lip = std::max(R.max_lip, lip);
                R.a11 = std::max(R.a11, std::max(hess.yy, 0.0));
                R.a22 = std::max(R.a22, std::max(hess.xx, 0.0));
            }

            R.min_quo = std::min(R.min_quo, quo);
            R.max_quo = std::max(R.max_quo, quo);
            R.min_ma = std::min(R.min_ma, ma);
            auto [l1, l2] = eig_2x2(hess);
            if (G.has_cut[p]) {
                R.min_l_cut = std::min(R.min_l_cut, l1);
                R.max_l_cut = std::max(R.max_l_cut, l2);
            } else {
                R.min_l_core = std::min(R.min_l_core, l1);
                R.max_l_core = std::max(R.max_l_core, l2);
            }
            if (!std::isfinite(rate[p])) R.nonfinite = true;
        }
        std::lock_guard<std::mutex> lock(mu);
        total.merge(R);
    });
    return total;
}

double formula_dt(const EvalReduce& R, double h, double safety) {
    double denom = 2.0 * (R.a11 + R.a22);
    return denom > 0.0 ? safety * h * h / denom : kInf;
}

void require_2d(const ProblemSpec& spec) {
    if (spec.kind != EquationKind::pma && spec.kind != EquationKind::gcf)
        throw ConfigError("the grid solver handles the 2-d kinds; use the interval drivers");
    if (!spec.domain) throw ConfigError("2-d problem needs a domain");
    if (spec.kind == EquationKind::gcf && !(spec.gamma > 0.0 && spec.gamma <= 1.0))
        throw RangeError("curvature exponent must lie in (0, 1]");
}

void check_options(const SolveOptions& opts) {
    if (opts.width != 1 && opts.width != 2) throw RangeError("stencil width must be 1 or 2");
    if (!(opts.safety > 0.0 && opts.safety <= 1.0))
        throw RangeError("safety factor must lie in (0, 1]");
}

std::vector<double> plan_times(std::vector<double> ts, double T) {
    ts.push_back(0.0);
    ts.push_back(T);
    for (auto& v : ts) v = std::clamp(v, 0.0, T);
    std::sort(ts.begin(), ts.end());
    double tol = 1e-12 * std::max(1.0, T);
    ts.erase(std::unique(ts.begin(), ts.end(),
                         [tol](double p, double q) { return std::fabs(p - q) <= tol; }),
             ts.end());
    return ts;
}

void refresh_boundary(GridFunction& u, const ProblemSpec& spec, double t) {
    const Grid& G = *u.grid;
    for (std::size_t b = 0; b < G.n_boundary(); ++b) u.vb[b] = spec.phi(G.boundary[b], t);
}

void record_plan_snaps(SolutionTrace& tr, std::size_t& next, const std::vector<double>& plan,
                       const ProblemSpec& spec, double t_old, double t_new, double dt,
                       const GridFunction& u_old, const GridFunction& u_new) {
    double tol = 1e-12 * std::max(1.0, tr.T);
    while (next < plan.size() && plan[next] <= t_new + tol) {
        double tau = plan[next];
        double theta = dt > 0.0 ? (tau - t_old) / dt : 1.0;
        Snapshot s;
        s.t = tau;
        if (theta >= 1.0 - 1e-12) {
            s.u = u_new;
        } else {
            s.u = GridFunction(u_old.grid);
            for (std::size_t p = 0; p < s.u.vi.size(); ++p)
                s.u.vi[p] = u_old.vi[p] + theta * (u_new.vi[p] - u_old.vi[p]);
            refresh_boundary(s.u, spec, tau);
        }
        tr.snaps.push_back(std::move(s));
        ++next;
    }
}

struct StepOutcome {
    double dt = 0.0;
    double formula = 0.0;
    EvalReduce R;
};

/// Chooses dt (formula bound, exact monotonicity bound, remaining time) and
/// applies the update into `next`. Boundary values are not touched here.
StepOutcome advance_field(const GridFunction& u, const ProblemSpec& spec, double t, double T,
                          const SolveOptions& opts, std::vector<double>& rate,
                          GridFunction& next_u, double forced_dt = 0.0) {
    StepOutcome out;
    out.R = eval_rates(u, spec, t, opts.width, opts.central_det, rate);
    if (out.R.nonfinite)
        throw NonFiniteField("operator evaluation lost finiteness at t = " + format_double(t));
    out.formula = formula_dt(out.R, u.grid->h, opts.safety);
    if (forced_dt > 0.0) {
        out.dt = forced_dt;
    } else {
        double cand = out.formula;
        if (out.R.max_lip > 0.0) cand = std::min(cand, opts.safety / out.R.max_lip);
        double cap = T - t;
        double floor = 1e-10 * std::max(1.0, T);
        if (cand < floor && cap > floor)
            throw StiffnessOverflow("stable step collapsed to " + format_double(cand) +
                                    " at t = " + format_double(t));
        out.dt = std::min(cand, cap);
    }
    next_u.grid = u.grid;
    next_u.vi.resize(u.vi.size());
    next_u.vb = u.vb;
    bool bad = false;
    for (std::size_t p = 0; p < u.vi.size(); ++p) {
        next_u.vi[p] = u.vi[p] + out.dt * rate[p];
        if (!std::isfinite(next_u.vi[p])) bad = true;
    }
    if (bad)
        throw NonFiniteField("field lost finiteness at t = " + format_double(t + out.dt));
    return out;
}

Diagnostics make_row(int64_t step, double t, const StepOutcome& o) {
    Diagnostics d;
    d.step = step;
    d.t = t;
    d.dt = o.dt;
    d.min_ut_psi = o.R.min_quo;
    d.max_ut_psi = o.R.max_quo;
    d.min_lambda_core = o.R.min_l_core;
    d.max_lambda_core = o.R.max_l_core;
    d.min_lambda_cut = o.R.min_l_cut;
    d.max_lambda_cut = o.R.max_l_cut;
    d.min_ma = o.R.min_ma;
    d.cfl_ratio = o.formula > 0.0 && std::isfinite(o.formula) ? o.dt / o.formula : 0.0;
    return d;
}

}  // namespace

SolverState make_initial_state(const ProblemSpec& spec, std::shared_ptr<const Grid> grid,
                               const std::function<double(Vec2)>& initial_delta) {
    require_2d(spec);
    SolverState st;
    st.u = GridFunction(std::move(grid));
    const Grid& G = *st.u.grid;
    for (std::size_t p = 0; p < G.n_interior(); ++p) {
        st.u.vi[p] = spec.phi(G.interior[p], 0.0);
        if (initial_delta) st.u.vi[p] += initial_delta(G.interior[p]);
    }
    refresh_boundary(st.u, spec, 0.0);
    return st;
}

double cfl_dt(const SolverState& state, const ProblemSpec& spec, double safety) {
    require_2d(spec);
    if (!(safety > 0.0 && safety <= 1.0))
        throw RangeError("safety factor must lie in (0, 1]");
    std::vector<double> rate;
    EvalReduce R = eval_rates(state.u, spec, state.t, 2, false, rate);
    if (R.nonfinite)
        throw NonFiniteField("operator evaluation lost finiteness at t = " +
                             format_double(state.t));
    double formula = formula_dt(R, state.u.grid->h, safety);
    double cap = spec.T - state.t;
    double floor = 1e-10 * std::max(1.0, spec.T);
    if (formula < floor && cap > floor)
        throw StiffnessOverflow("stable step collapsed to " + format_double(formula) +
                                " at t = " + format_double(state.t));
    return std::max(std::min(formula, cap), 0.0);
}

namespace {

SolverState step_once(const SolverState& state, const ProblemSpec& spec, double dt,
                      EquationKind expect) {
    require_2d(spec);
    if (spec.kind != expect)
        throw ConfigError("problem kind is " + kind_name(spec.kind) + ", expected " +
                          kind_name(expect));
    if (!(dt > 0.0)) throw RangeError("dt must be positive");
    SolveOptions opts;
    std::vector<double> rate;
    SolverState next;
    advance_field(state.u, spec, state.t, spec.T, opts, rate, next.u, dt);
    next.t = state.t + dt;
    next.step = state.step + 1;
    refresh_boundary(next.u, spec, next.t);
    return next;
}

}  // namespace

SolverState step_pma(const SolverState& state, const ProblemSpec& spec, double dt) {
    return step_once(state, spec, dt, EquationKind::pma);
}

SolverState step_gcf(const SolverState& state, const ProblemSpec& spec, double dt) {
    return step_once(state, spec, dt, EquationKind::gcf);
}

SolutionTrace solve(const ProblemSpec& spec, std::shared_ptr<const Grid> grid,
                    const SolveOptions& opts) {
    require_2d(spec);
    check_options(opts);
    SolverState st = make_initial_state(spec, grid, opts.initial_delta);

    SolutionTrace tr;
    tr.grid = grid;
    tr.problem = spec.name;
    tr.T = spec.T;
    tr.stencil_width = opts.width;
    tr.safety = opts.safety;

    auto plan = plan_times(opts.output_times, spec.T);
    std::size_t next_out = 0;
    if (opts.record_steps) {
        tr.snaps.push_back({0.0, st.u});
    } else {
        record_plan_snaps(tr, next_out, plan, spec, 0.0, 0.0, 0.0, st.u, st.u);
    }

    const double tolT = 1e-12 * std::max(1.0, spec.T);
    std::vector<double> rate;
    GridFunction next_u;
    while (st.t < spec.T - tolT) {
        StepOutcome o = advance_field(st.u, spec, st.t, spec.T, opts, rate, next_u);
        double t_new = o.dt >= spec.T - st.t - tolT ? spec.T : st.t + o.dt;
        refresh_boundary(next_u, spec, t_new);
        tr.diag.push_back(make_row(st.step + 1, t_new, o));
        if (opts.record_steps) {
            tr.snaps.push_back({t_new, next_u});
        } else {
            record_plan_snaps(tr, next_out, plan, spec, st.t, t_new, t_new - st.t, st.u,
                              next_u);
        }
        st.u.vi.swap(next_u.vi);
        st.u.vb.swap(next_u.vb);
        st.t = t_new;
        ++st.step;
    }
    return tr;
}

std::pair<SolutionTrace, SolutionTrace> lockstep_solve(const ProblemSpec& spec_w,
                                                       const ProblemSpec& spec_v,
                                                       std::shared_ptr<const Grid> grid,
                                                       const SolveOptions& opts) {
    require_2d(spec_w);
    require_2d(spec_v);
    check_options(opts);
    if (spec_w.kind != spec_v.kind) throw ConfigError("lockstep problems must share a kind");
    if (spec_w.T != spec_v.T) throw ConfigError("lockstep problems must share the horizon");
    const double T = spec_w.T;

    SolverState w = make_initial_state(spec_w, grid, opts.initial_delta);
    SolverState v = make_initial_state(spec_v, grid);

    auto mk_trace = [&](const ProblemSpec& s) {
        SolutionTrace tr;
        tr.grid = grid;
        tr.problem = s.name;
        tr.T = T;
        tr.stencil_width = opts.width;
        tr.safety = opts.safety;
        return tr;
    };
    SolutionTrace tw = mk_trace(spec_w), tv = mk_trace(spec_v);
    tw.snaps.push_back({0.0, w.u});
    tv.snaps.push_back({0.0, v.u});

    const double tolT = 1e-12 * std::max(1.0, T);
    std::vector<double> rate_w, rate_v;
    GridFunction next_w, next_v;
    double t = 0.0;
    int64_t step = 0;
    while (t < T - tolT) {
        EvalReduce Rw = eval_rates(w.u, spec_w, t, opts.width, opts.central_det, rate_w);
        EvalReduce Rv = eval_rates(v.u, spec_v, t, opts.width, opts.central_det, rate_v);
        if (Rw.nonfinite || Rv.nonfinite)
            throw NonFiniteField("operator evaluation lost finiteness at t = " +
                                 format_double(t));
        double fw = formula_dt(Rw, grid->h, opts.safety);
        double fv = formula_dt(Rv, grid->h, opts.safety);
        double cand = std::min(fw, fv);
        double lip = std::max(Rw.max_lip, Rv.max_lip);
        if (lip > 0.0) cand = std::min(cand, opts.safety / lip);
        double floor = 1e-10 * std::max(1.0, T);
        if (cand < floor && T - t > floor)
            throw StiffnessOverflow("stable step collapsed to " + format_double(cand) +
                                    " at t = " + format_double(t));
        double dt = std::min(cand, T - t);
        double t_new = dt >= T - t - tolT ? T : t + dt;
        dt = t_new - t;

        auto apply = [&](SolverState& st, const std::vector<double>& rate, GridFunction& nx,
                         const ProblemSpec& sp) {
            nx.grid = grid;
            nx.vi.resize(st.u.vi.size());
            nx.vb = st.u.vb;
            bool bad = false;
            for (std::size_t p = 0; p < nx.vi.size(); ++p) {
                nx.vi[p] = st.u.vi[p] + dt * rate[p];
                if (!std::isfinite(nx.vi[p])) bad = true;
            }
            if (bad)
                throw NonFiniteField("field lost finiteness at t = " + format_double(t_new));
            refresh_boundary(nx, sp, t_new);
        };
        apply(w, rate_w, next_w, spec_w);
        apply(v, rate_v, next_v, spec_v);

        StepOutcome ow{dt, fw, Rw}, ov{dt, fv, Rv};
        tw.diag.push_back(make_row(step + 1, t_new, ow));
        tv.diag.push_back(make_row(step + 1, t_new, ov));
        tw.snaps.push_back({t_new, next_w});
        tv.snaps.push_back({t_new, next_v});

        w.u.vi.swap(next_w.vi);
        w.u.vb.swap(next_w.vb);
        v.u.vi.swap(next_v.vi);
        v.u.vb.swap(next_v.vb);
        t = t_new;
        ++step;
    }
    return {std::move(tw), std::move(tv)};
}

GridFunction sample_field(const ScalarField& f, std::shared_ptr<const Grid> grid, double t) {
    GridFunction g(std::move(grid));
    const Grid& G = *g.grid;
    for (std::size_t p = 0; p < G.n_interior(); ++p) g.vi[p] = f(G.interior[p], t);
    for (std::size_t b = 0; b < G.n_boundary(); ++b) g.vb[b] = f(G.boundary[b], t);
    return g;
}

double sup_gradient(const GridFunction& u) {
    double best = 0.0;
    for (std::size_t p = 0; p < u.grid->n_interior(); ++p)
        best = std::max(best, std::sqrt(gradient_central(u, p).norm2()));
    return best;
}

}  // namespace pmaflow
