#include "pmaflow/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "pmaflow/counterexamples.hpp"
#include "pmaflow/harness.hpp"

namespace pmaflow {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kMaxCsvRows = 2000;

void write_text(const fs::path& p, const std::string& body) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot open " + p.string() + " for writing");
    out << body;
    if (!out.good()) throw Error("short write to " + p.string());
}

void write_json_file(const fs::path& p, const ordered_json& j) {
    write_text(p, j.dump(2) + "\n");
}

std::string snap_name(std::size_t k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snapshot_%03zu.csv", k);
    return buf;
}

double merge_min(double a, double b) {
    if (!std::isfinite(a)) return b;
    if (!std::isfinite(b)) return a;
    return std::min(a, b);
}

double merge_max(double a, double b) {
    if (!std::isfinite(a)) return b;
    if (!std::isfinite(b)) return a;
    return std::max(a, b);
}

// Long traces are thinned to ~kMaxCsvRows evenly strided rows; the final row
// is always kept so the file ends at t = T.
std::size_t row_stride(std::size_t n) {
    return n > kMaxCsvRows ? (n + kMaxCsvRows - 1) / kMaxCsvRows : 1;
}

void write_diag_csv(const fs::path& p, const std::string& hash,
                    const std::vector<Diagnostics>& diag) {
    std::string s = "# config_hash=" + hash + "\n";
    s += "step,t,dt,min_ut_psi,max_ut_psi,min_lambda,max_lambda,min_MAh\n";
    const std::size_t stride = row_stride(diag.size());
    auto emit = [&](const Diagnostics& d) {
        s += std::to_string(d.step);
        s += ",";
        s += format_double(d.t);
        s += ",";
        s += format_double(d.dt);
        s += ",";
        s += format_double(d.min_ut_psi);
        s += ",";
        s += format_double(d.max_ut_psi);
        s += ",";
        s += format_double(merge_min(d.min_lambda_core, d.min_lambda_cut));
        s += ",";
        s += format_double(merge_max(d.max_lambda_core, d.max_lambda_cut));
        s += ",";
        s += format_double(d.min_ma);
        s += "\n";
    };
    for (std::size_t i = 0; i < diag.size(); i += stride) emit(diag[i]);
    if (!diag.empty() && (diag.size() - 1) % stride != 0) emit(diag.back());
    write_text(p, s);
}

void write_snapshot_csv(const fs::path& p, const std::string& hash, const Grid& g,
                        const Snapshot& snap) {
    std::string s = "# config_hash=" + hash + "\n";
    s += "# t=" + format_double(snap.t) + "\n";
    s += "x1,x2,u\n";
    for (std::size_t i = 0; i < g.n_interior(); ++i) {
        s += format_double(g.interior[i].x) + "," + format_double(g.interior[i].y) +
             "," + format_double(snap.u.vi[i]) + "\n";
    }
    for (std::size_t b = 0; b < g.n_boundary(); ++b) {
        s += format_double(g.boundary[b].x) + "," + format_double(g.boundary[b].y) +
             "," + format_double(snap.u.vb[b]) + "\n";
    }
    write_text(p, s);
}

void write_diag_1d_csv(const fs::path& p, const std::string& hash, const Trace1D& tr) {
    std::string s = "# config_hash=" + hash + "\n";
    s += "step,min_second,max_second\n";
    const std::size_t n = tr.step_min_second.size();
    const std::size_t stride = row_stride(n);
    auto emit = [&](std::size_t i) {
        s += std::to_string(i) + "," + format_double(tr.step_min_second[i]) + "," +
             format_double(tr.step_max_second[i]) + "\n";
    };
    for (std::size_t i = 0; i < n; i += stride) emit(i);
    if (n > 0 && (n - 1) % stride != 0) emit(n - 1);
    write_text(p, s);
}

void write_snapshot_1d_csv(const fs::path& p, const std::string& hash, const Trace1D& tr,
                           std::size_t k) {
    std::string s = "# config_hash=" + hash + "\n";
    s += "# t=" + format_double(tr.times[k]) + "\n";
    s += "x,u\n";
    for (std::size_t i = 0; i < tr.xs.size(); ++i)
        s += format_double(tr.xs[i]) + "," + format_double(tr.snaps[k][i]) + "\n";
    write_text(p, s);
}

ordered_json conditions_json(const ConditionReport& r) {
    ordered_json j;
    j["kind"] = kind_name(r.kind);
    j["tolerance"] = r.tolerance;
    j["density"] = r.density;
    j["p1_margin"] = r.p1_margin;
    j["p2_min_eig"] = r.p2_min_eig;
    j["p3_max_violation"] = r.p3_max_violation;
    j["p1_samples"] = r.p1_samples;
    j["p23_samples"] = r.p23_samples;
    j["p1_pass"] = r.p1_pass;
    j["p2_pass"] = r.p2_pass;
    j["p3_pass"] = r.p3_pass;
    j["all_pass"] = r.all_pass;
    return j;
}

ordered_json compat_json(const CompatReport& r) {
    ordered_json j;
    j["applicable"] = r.applicable;
    j["max_residual"] = r.max_residual;
    j["tolerance"] = r.tolerance;
    j["samples"] = r.samples;
    j["pass"] = r.pass;
    return j;
}

ordered_json ut_json(const UtBoundReport& r) {
    ordered_json j;
    j["applicable"] = r.applicable;
    j["bound"] = r.bound;
    j["slack"] = r.slack;
    j["observed_min"] = r.observed_min;
    j["observed_max"] = r.observed_max;
    j["margin"] = r.margin;
    j["pass"] = r.pass;
    return j;
}

ordered_json eigen_json(const EigenBoundReport& r) {
    ordered_json j;
    j["applicable"] = r.applicable;
    ordered_json rows = ordered_json::array();
    for (const auto& row : r.rows) {
        ordered_json e;
        e["t"] = row.t;
        e["min_lambda"] = row.min_lambda;
        e["ring_sup"] = row.ring_sup;
        e["bound"] = row.bound;
        e["pass"] = row.pass;
        rows.push_back(e);
    }
    j["rows"] = rows;
    j["worst_margin"] = r.worst_margin;
    j["pass"] = r.pass;
    return j;
}

ordered_json dualmax_json(const DualMaxReport& r) {
    ordered_json j;
    ordered_json rows = ordered_json::array();
    for (const auto& row : r.rows) {
        ordered_json e;
        e["t"] = row.t;
        e["interior_sup"] = row.interior_sup;
        e["ring_sup"] = row.ring_sup;
        e["bound"] = row.bound;
        e["pass"] = row.pass;
        rows.push_back(e);
    }
    j["rows"] = rows;
    j["worst_margin"] = r.worst_margin;
    j["pass"] = r.pass;
    return j;
}

ordered_json holder_json(const HolderReport& r) {
    ordered_json j;
    j["alpha"] = r.alpha;
    j["pairs"] = r.pairs;
    j["seed"] = r.seed;
    j["seminorm"] = r.seminorm;
    j["mean_quotient"] = r.mean_quotient;
    return j;
}

ordered_json residual_json(const DualResidualReport& r) {
    ordered_json j;
    j["t"] = r.t;
    j["dt_snap"] = r.dt_snap;
    j["hx"] = r.hx;
    j["hy"] = r.hy;
    j["max_abs"] = r.max_abs;
    j["mean_abs"] = r.mean_abs;
    j["max_abs_uniform"] = r.max_abs_uniform;
    j["n_valid"] = r.n_valid;
    j["n_uniform"] = r.n_uniform;
    j["n_singular"] = r.n_singular;
    j["n_skipped"] = r.n_skipped;
    return j;
}

ordered_json grid_json(const Grid& g) {
    ordered_json j;
    j["h"] = g.h;
    j["n_interior"] = g.n_interior();
    j["n_boundary"] = g.n_boundary();
    bool any_cut = false;
    for (uint8_t c : g.has_cut) any_cut = any_cut || c != 0;
    j["has_cut_nodes"] = any_cut;
    return j;
}

ordered_json problem_json(const ProblemSpec& spec) {
    ordered_json j;
    j["name"] = spec.name;
    j["kind"] = kind_name(spec.kind);
    j["T"] = spec.T;
    j["c0"] = spec.c0;
    if (spec.kind == EquationKind::gcf) j["gamma"] = spec.gamma;
    if (spec.kind == EquationKind::radial) j["dim"] = spec.dim;
    if (spec.bump) {
        j["bump"] = {{"A", spec.bump->A}, {"B", spec.bump->B}};
    }
    j["has_exact"] = !spec.exact.empty();
    return j;
}

ordered_json report_head(const char* schema, const RunConfig& cfg) {
    ordered_json j;
    j["schema"] = schema;
    j["config_hash"] = cfg.hash;
    j["config"] = cfg.resolved;
    return j;
}

bool is_planar(const ProblemSpec& spec) {
    return spec.kind == EquationKind::pma || spec.kind == EquationKind::gcf;
}

SolutionTrace solve_planar(const ProblemSpec& spec, const RunConfig& cfg, double h,
                           std::shared_ptr<const Grid>* grid_out = nullptr) {
    auto grid = build_grid(*spec.domain, h);
    SolveOptions opts;
    opts.output_times = cfg.output_times;
    opts.safety = cfg.safety;
    opts.width = cfg.stencil_width;
    if (grid_out) *grid_out = grid;
    return solve(spec, grid, opts);
}

Trace1D solve_interval(const ProblemSpec& spec, double h, double T,
                       const std::vector<double>& out_times) {
    if (spec.kind == EquationKind::heat_1d)
        return solve_1d(spec.psi, spec.phi, h, T, out_times);
    return solve_radial(spec.dim, spec.psi, spec.phi, h, T, out_times);
}

double planar_exact_error(const SolutionTrace& tr, const ProblemSpec& spec) {
    double err = 0.0;
    const Grid& g = *tr.grid;
    for (const auto& snap : tr.snaps) {
        for (std::size_t i = 0; i < g.n_interior(); ++i)
            err = std::max(err, std::abs(snap.u.vi[i] - spec.exact(g.interior[i], snap.t)));
        for (std::size_t b = 0; b < g.n_boundary(); ++b)
            err = std::max(err, std::abs(snap.u.vb[b] - spec.exact(g.boundary[b], snap.t)));
    }
    return err;
}

double interval_exact_error(const Trace1D& tr, const ScalarField& exact) {
    double err = 0.0;
    for (std::size_t k = 0; k < tr.snaps.size(); ++k)
        for (std::size_t i = 0; i < tr.xs.size(); ++i)
            err = std::max(err, std::abs(tr.snaps[k][i] - exact(tr.xs[i], 0.0, tr.times[k])));
    return err;
}

ordered_json trace1d_json(const Trace1D& tr) {
    ordered_json j;
    j["h"] = tr.h;
    j["dt"] = tr.dt;
    j["T"] = tr.T;
    j["nodes"] = tr.xs.size();
    j["steps"] = tr.step_min_second.empty() ? 0 : tr.step_min_second.size() - 1;
    j["min_second"] = tr.min_second;
    j["min_second_x"] = tr.min_second_x;
    j["min_second_t"] = tr.min_second_t;
    j["negative_slope"] = tr.negative_slope;
    return j;
}

void write_interval_outputs(const fs::path& dir, const RunConfig& cfg, const Trace1D& tr) {
    write_diag_1d_csv(dir / "diagnostics.csv", cfg.hash, tr);
    for (std::size_t k = 0; k < tr.snaps.size(); ++k)
        write_snapshot_1d_csv(dir / snap_name(k), cfg.hash, tr, k);
}

void write_planar_outputs(const fs::path& dir, const RunConfig& cfg,
                          const SolutionTrace& tr) {
    write_diag_csv(dir / "diagnostics.csv", cfg.hash, tr.diag);
    for (std::size_t k = 0; k < tr.snaps.size(); ++k)
        write_snapshot_csv(dir / snap_name(k), cfg.hash, *tr.grid, tr.snaps[k]);
}

ordered_json snapshot_listing(const std::vector<double>& times) {
    ordered_json arr = ordered_json::array();
    for (std::size_t k = 0; k < times.size(); ++k) {
        ordered_json e;
        e["index"] = k;
        e["t"] = times[k];
        e["file"] = snap_name(k);
        arr.push_back(e);
    }
    return arr;
}

int cmd_solve(const RunConfig& cfg, const fs::path& dir) {
    const ProblemSpec spec = materialize_problem(cfg);
    ordered_json rep = report_head("pmaflow/solve/v1", cfg);
    rep["problem"] = problem_json(spec);

    if (is_planar(spec)) {
        std::shared_ptr<const Grid> grid;
        const SolutionTrace tr = solve_planar(spec, cfg, cfg.h, &grid);
        write_planar_outputs(dir, cfg, tr);
        rep["grid"] = grid_json(*grid);
        rep["steps"] = tr.diag.size();
        rep["final_t"] = tr.snaps.back().t;
        std::vector<double> times;
        for (const auto& s : tr.snaps) times.push_back(s.t);
        rep["snapshots"] = snapshot_listing(times);
        rep["sup_gradient_final"] = sup_gradient(tr.snaps.back().u);
        if (!spec.exact.empty()) rep["exact_linf_error"] = planar_exact_error(tr, spec);
    } else {
        const Trace1D tr = solve_interval(spec, cfg.h, spec.T, cfg.output_times);
        write_interval_outputs(dir, cfg, tr);
        rep["trace"] = trace1d_json(tr);
        rep["snapshots"] = snapshot_listing(tr.times);
        if (!spec.exact.empty())
            rep["exact_linf_error"] = interval_exact_error(tr, spec.exact);
    }
    write_json_file(dir / "report.json", rep);
    std::cout << "solve: done (config_hash=" << cfg.hash << ")\n";
    return 0;
}

int cmd_verify(const RunConfig& cfg, const fs::path& dir) {
    const ProblemSpec spec = materialize_problem(cfg);
    ordered_json rep = report_head("pmaflow/verify/v1", cfg);
    rep["problem"] = problem_json(spec);

    const ConditionReport cond = validate_conditions(spec, cfg.density, cfg.tol.condition);
    const CompatReport compat = check_compatibility_order1(spec, cfg.tol.compatibility);
    rep["conditions"] = conditions_json(cond);
    rep["compatibility"] = compat_json(compat);

    bool pass = cond.all_pass && (!compat.applicable || compat.pass);
    ordered_json asserted = ordered_json::array();
    asserted.push_back("conditions");
    if (compat.applicable) asserted.push_back("compatibility");

    if (is_planar(spec)) {
        std::shared_ptr<const Grid> grid;
        const SolutionTrace tr = solve_planar(spec, cfg, cfg.h, &grid);
        write_planar_outputs(dir, cfg, tr);
        rep["grid"] = grid_json(*grid);
        rep["steps"] = tr.diag.size();

        const UtBoundReport ut = check_ut_bounds(tr, spec, cfg.kappa);
        rep["ut_bound"] = ut_json(ut);
        asserted.push_back("ut_bound");
        pass = pass && ut.pass;

        if (spec.kind == EquationKind::pma) {
            const EigenBoundReport eig = check_eigen_bounds(tr, spec, cfg.kappa);
            rep["eigen_bound"] = eigen_json(eig);
            asserted.push_back("eigen_bound");
            pass = pass && eig.pass;

            const DualMaxReport dm = check_dual_max_principle(tr, spec, cfg.kappa);
            rep["dual_max"] = dualmax_json(dm);
            asserted.push_back("dual_max");
            pass = pass && dm.pass;

            if (tr.snaps.size() >= 2) {
                try {
                    const DualResidualReport dr =
                        dual_residual(tr, spec, tr.snaps.size() - 1);
                    rep["dual_residual"] = residual_json(dr);
                } catch (const Error& e) {
                    rep["dual_residual"] = {{"skipped", error_name(e)},
                                            {"message", e.what()}};
                }
            }
        } else {
            rep["eigen_bound"] = {{"skipped", "curvature flow has no dual equation"}};
            rep["dual_max"] = {{"skipped", "curvature flow has no dual equation"}};
        }

        rep["holder_u"] =
            holder_json(holder_seminorm(tr.snaps, cfg.holder.alpha, cfg.holder.pairs,
                                        cfg.seed));
        if (tr.snaps.size() >= 3) {
            rep["holder_ut"] = holder_json(holder_seminorm(
                ut_quotients(tr), cfg.holder.alpha, cfg.holder.pairs, cfg.seed));
        }
        if (!spec.exact.empty()) rep["exact_linf_error"] = planar_exact_error(tr, spec);
    } else {
        const Trace1D tr = solve_interval(spec, cfg.h, spec.T, cfg.output_times);
        write_interval_outputs(dir, cfg, tr);
        rep["trace"] = trace1d_json(tr);
        if (!spec.exact.empty())
            rep["exact_linf_error"] = interval_exact_error(tr, spec.exact);
    }

    rep["asserted"] = asserted;
    rep["pass"] = pass;
    write_json_file(dir / "estimate_report.json", rep);
    std::cout << "verify: " << (pass ? "PASS" : "FAIL") << " (config_hash=" << cfg.hash
              << ")\n";
    return pass ? 0 : 1;
}

int cmd_legendre(const RunConfig& cfg, const fs::path& dir) {
    const ProblemSpec spec = materialize_problem(cfg);
    if (!is_planar(spec))
        throw ConfigError("the legendre command needs a planar (pma or gcf) problem");

    std::shared_ptr<const Grid> grid;
    const SolutionTrace tr = solve_planar(spec, cfg, cfg.h, &grid);
    const std::size_t idx =
        cfg.legendre.t_index < 0 ? tr.snaps.size() - 1
                                 : static_cast<std::size_t>(cfg.legendre.t_index);
    if (idx >= tr.snaps.size())
        throw RangeError("legendre.t_index is past the last snapshot");
    const GridFunction& u = tr.snaps[idx].u;
    const double t = tr.snaps[idx].t;

    DualGrid dg;
    if (cfg.legendre.box) {
        const auto& b = *cfg.legendre.box;
        const double s = *cfg.legendre.spacing;
        const int nx = static_cast<int>(std::floor((b[2] - b[0]) / s + 1e-9)) + 1;
        const int ny = static_cast<int>(std::floor((b[3] - b[1]) / s + 1e-9)) + 1;
        dg = manual_dual_grid(b[0], b[1], s, s, nx, ny);
    } else {
        dg = auto_dual_grid(u);
    }

    const DualField F = legendre_transform(u, dg, t);
    const DualHessianSup sup = dual_hessian_sup(F);

    std::string s = "# config_hash=" + cfg.hash + "\n";
    s += "# t=" + format_double(t) + "\n";
    s += "y1,y2,U,arg,att\n";
    for (int j = 0; j < dg.ny; ++j) {
        for (int i = 0; i < dg.nx; ++i) {
            const std::size_t k = std::size_t(j) * dg.nx + i;
            s += format_double(dg.y1(i)) + "," + format_double(dg.y2(j)) + "," +
                 format_double(F.U[k]) + "," + std::to_string(F.arg[k]) + "," +
                 std::to_string(int(F.att[k])) + "\n";
        }
    }
    write_text(dir / "legendre.csv", s);

    const GridFunction bc = biconjugate(u, dg);
    double env_gap = 0.0;
    double env_overshoot = 0.0;
    for (std::size_t i = 0; i < u.vi.size(); ++i) {
        env_gap = std::max(env_gap, u.vi[i] - bc.vi[i]);
        env_overshoot = std::max(env_overshoot, bc.vi[i] - u.vi[i]);
    }
    for (std::size_t b = 0; b < u.vb.size(); ++b) {
        env_gap = std::max(env_gap, u.vb[b] - bc.vb[b]);
        env_overshoot = std::max(env_overshoot, bc.vb[b] - u.vb[b]);
    }

    ordered_json rep = report_head("pmaflow/legendre/v1", cfg);
    rep["problem"] = problem_json(spec);
    rep["t_index"] = idx;
    rep["t"] = t;
    {
        ordered_json g;
        g["ax"] = dg.ax;
        g["ay"] = dg.ay;
        g["hx"] = dg.hx;
        g["hy"] = dg.hy;
        g["nx"] = dg.nx;
        g["ny"] = dg.ny;
        g["forced"] = dg.forced;
        rep["dual_grid"] = g;
    }
    {
        ordered_json hs;
        hs["interior_sup"] = sup.interior_sup;
        hs["ring_sup"] = sup.ring_sup;
        hs["n_interior"] = sup.n_interior;
        hs["n_ring"] = sup.n_ring;
        rep["hessian_sup"] = hs;
    }
    rep["envelope_gap"] = env_gap;
    rep["envelope_overshoot"] = env_overshoot;
    if (spec.kind == EquationKind::pma && idx >= 1) {
        try {
            rep["dual_residual"] = residual_json(dual_residual(tr, spec, idx));
        } catch (const Error& e) {
            rep["dual_residual"] = {{"skipped", error_name(e)}, {"message", e.what()}};
        }
    } else {
        rep["dual_residual"] = {{"skipped", "needs a pma snapshot with a predecessor"}};
    }
    write_json_file(dir / "report.json", rep);
    std::cout << "legendre: done (config_hash=" << cfg.hash << ")\n";
    return 0;
}

int cmd_counterexample(const RunConfig& cfg, const fs::path& dir) {
    const ProblemSpec spec = materialize_problem(cfg);
    if (spec.kind != EquationKind::heat_1d && spec.kind != EquationKind::radial)
        throw ConfigError("the counterexample command needs ce_1d or ce_radial");

    CeParams params;
    params.A0 = cfg.ce.A0;
    params.h = cfg.ce.h;
    params.max_doublings = cfg.ce.max_doublings;
    params.bisect_iters = cfg.ce.bisect_iters;
    params.sweep_amplitudes = cfg.ce.amplitudes;

    const ConvexityLossReport r = spec.kind == EquationKind::heat_1d
                                      ? run_counterexample_1d(spec, params)
                                      : run_counterexample_radial(spec, params);

    std::string s = "# config_hash=" + cfg.hash + "\n";
    s += "A,min_second,psi_at_r0\n";
    for (const auto& row : r.sweep)
        s += format_double(row.A) + "," + format_double(row.min_second) + "," +
             format_double(row.psi_at_r0) + "\n";
    write_text(dir / "ce_sweep.csv", s);

    ordered_json rep = report_head("pmaflow/counterexample/v1", cfg);
    rep["problem"] = problem_json(spec);
    rep["B"] = r.B;
    rep["h"] = r.h;
    rep["dt"] = r.dt;
    rep["T"] = r.T;
    rep["found"] = r.found;
    rep["A_loss"] = r.A_loss;
    rep["doublings"] = r.doublings;
    rep["threshold_A_grid_dependent"] = r.threshold_A;
    rep["min_second_at_loss"] = r.min_second_at_loss;
    rep["argmin_x"] = r.argmin_x;
    rep["argmin_t"] = r.argmin_t;
    rep["superposition_gap"] = r.superposition_gap;
    rep["superposition_C"] = r.superposition_C;
    rep["rho_boundary_max"] = r.rho_boundary_max;
    if (spec.kind == EquationKind::radial) {
        rep["r0"] = r.r0;
        rep["fit_slope"] = r.fit_slope;
        rep["fit_r2"] = r.fit_r2;
    }
    rep["sweep_file"] = "ce_sweep.csv";
    write_json_file(dir / "report.json", rep);
    std::cout << "counterexample: " << (r.found ? "convexity loss found" : "no loss found")
              << " (config_hash=" << cfg.hash << ")\n";
    return r.found ? 0 : 1;
}

int cmd_convergence(const RunConfig& cfg, const fs::path& dir) {
    const ProblemSpec spec = materialize_problem(cfg);
    if (spec.exact.empty())
        throw ConfigError("the convergence command needs a problem with an exact solution");

    std::vector<double> errors;
    for (double h : cfg.h_list) {
        if (is_planar(spec)) {
            const SolutionTrace tr = solve_planar(spec, cfg, h);
            errors.push_back(planar_exact_error(tr, spec));
        } else {
            const Trace1D tr = solve_interval(spec, h, spec.T, cfg.output_times);
            errors.push_back(interval_exact_error(tr, spec.exact));
        }
    }

    std::string s = "# config_hash=" + cfg.hash + "\n";
    s += "h,linf_error,observed_order\n";
    ordered_json rows = ordered_json::array();
    bool monotone = true;
    double final_order = 0.0;
    for (std::size_t i = 0; i < cfg.h_list.size(); ++i) {
        std::string order_cell = "-";
        ordered_json row;
        row["h"] = cfg.h_list[i];
        row["linf_error"] = errors[i];
        if (i > 0) {
            monotone = monotone && errors[i] < errors[i - 1];
            const double order = std::log(errors[i - 1] / errors[i]) /
                                 std::log(cfg.h_list[i - 1] / cfg.h_list[i]);
            order_cell = format_double(order);
            row["observed_order"] = order;
            final_order = order;
        }
        rows.push_back(row);
        s += format_double(cfg.h_list[i]) + "," + format_double(errors[i]) + "," +
             order_cell + "\n";
    }
    write_text(dir / "convergence.csv", s);

    ordered_json rep = report_head("pmaflow/convergence/v1", cfg);
    rep["problem"] = problem_json(spec);
    rep["rows"] = rows;
    rep["monotone_decrease"] = monotone;
    rep["final_order"] = final_order;
    write_json_file(dir / "report.json", rep);
    std::cout << "convergence: done (config_hash=" << cfg.hash << ")\n";
    return 0;
}

}  // namespace

std::string error_name(const Error& e) {
    if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
    if (dynamic_cast<const UnknownKey*>(&e)) return "UnknownKey";
    if (dynamic_cast<const RangeError*>(&e)) return "RangeError";
    if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
    if (dynamic_cast<const NonConvexDomain*>(&e)) return "NonConvexDomain";
    if (dynamic_cast<const EmptyGrid*>(&e)) return "EmptyGrid";
    if (dynamic_cast<const OutsideDomain*>(&e)) return "OutsideDomain";
    if (dynamic_cast<const UnknownProblem*>(&e)) return "UnknownProblem";
    if (dynamic_cast<const EvaluationError*>(&e)) return "EvaluationError";
    if (dynamic_cast<const SingularHessian*>(&e)) return "SingularHessian";
    if (dynamic_cast<const StiffnessOverflow*>(&e)) return "StiffnessOverflow";
    if (dynamic_cast<const NonFiniteField*>(&e)) return "NonFiniteField";
    if (dynamic_cast<const DegenerateDual*>(&e)) return "DegenerateDual";
    if (dynamic_cast<const DualGridTooSmall*>(&e)) return "DualGridTooSmall";
    if (dynamic_cast<const IncompatibleTraces*>(&e)) return "IncompatibleTraces";
    return "Error";
}

void write_failure_report(const std::string& out_dir, const std::string& config_hash,
                          const Error& e) {
    try {
        fs::create_directories(out_dir);
        ordered_json j;
        j["error_type"] = error_name(e);
        j["message"] = e.what();
        j["config_hash"] = config_hash.empty() ? "unresolved" : config_hash;
        write_json_file(fs::path(out_dir) / "failure.json", j);
    } catch (...) {
        // Reporting must never mask the original error.
    }
}

int run_command(const RunConfig& cfg) {
    const fs::path dir(cfg.out);
    fs::create_directories(dir);
    if (cfg.command == "solve") return cmd_solve(cfg, dir);
    if (cfg.command == "verify") return cmd_verify(cfg, dir);
    if (cfg.command == "legendre") return cmd_legendre(cfg, dir);
    if (cfg.command == "counterexample") return cmd_counterexample(cfg, dir);
    if (cfg.command == "convergence") return cmd_convergence(cfg, dir);
    throw ConfigError("unknown command '" + cfg.command + "'");
}

}  // namespace pmaflow
