// Acceptance gate: eleven criteria, one verdict line each, nonzero exit on
// any failure. Criteria 1 and 8 fail by design of the scheme and of the
// closed-form source term; README section "Acceptance status" carries the
// analysis.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pmaflow/counterexamples.hpp"
#include "pmaflow/harness.hpp"
#include "pmaflow/runner.hpp"

namespace fs = std::filesystem;
using namespace pmaflow;

namespace {

int g_failures = 0;

void verdict(int id, bool pass, const std::string& detail) {
    if (!pass) ++g_failures;
    std::printf("%2d %s %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

std::vector<double> default_times(double T) {
    return {0.0, T / 4.0, T / 2.0, 3.0 * T / 4.0, T};
}

double linf_error(const SolutionTrace& tr, const ProblemSpec& spec) {
    double worst = 0.0;
    for (const auto& snap : tr.snaps) {
        GridFunction ex = sample_field(spec.exact, tr.grid, snap.t);
        for (std::size_t p = 0; p < ex.vi.size(); ++p)
            worst = std::max(worst, std::abs(snap.u.vi[p] - ex.vi[p]));
        for (std::size_t b = 0; b < ex.vb.size(); ++b)
            worst = std::max(worst, std::abs(snap.u.vb[b] - ex.vb[b]));
    }
    return worst;
}

void criterion_1_mms_convergence() {
    const auto t0 = std::chrono::steady_clock::now();
    const ProblemSpec spec = builtin_problem("mms_quadratic");
    const std::vector<double> hs = {1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0};
    std::vector<double> errs;
    for (double h : hs) {
        SolveOptions opts;
        opts.output_times = default_times(spec.T);
        errs.push_back(linf_error(solve(spec, build_grid(*spec.domain, h), opts), spec));
    }
    const double runtime = seconds_since(t0);
    const bool monotone = errs[0] > errs[1] && errs[1] > errs[2];
    const double order = std::log2(errs[1] / errs[2]);
    const bool pass = monotone && order >= 0.9 && runtime < 120.0;
    verdict(1, pass,
            fmt("mms L-inf errors %.3e / %.3e / %.3e at h=1/8,1/16,1/32; "
                "fine-pair order %.2f (need >= 0.9, monotone decrease); %.1fs",
                errs[0], errs[1], errs[2], order, runtime));
}

void criterion_2_stationarity() {
    const ProblemSpec spec = builtin_problem("stationary_quadratic");
    SolveOptions opts;
    opts.output_times = {spec.T};
    SolutionTrace tr = solve(spec, build_grid(*spec.domain, 1.0 / 8.0), opts);
    const auto& first = tr.snaps.front().u;
    const auto& last = tr.snaps.back().u;
    double drift = 0.0;
    for (std::size_t p = 0; p < first.vi.size(); ++p)
        drift = std::max(drift, std::abs(last.vi[p] - first.vi[p]));
    const bool pass = drift <= 1e-10 && tr.snaps.back().t == spec.T;
    verdict(2, pass, fmt("stationary drift %.3e after T=1 at h=1/8 (need <= 1e-10)", drift));
}

void criterion_3_comparison() {
    const ProblemSpec base = builtin_problem("mms_quadratic");
    auto grid = build_grid(*base.domain, 1.0 / 8.0);
    SplitMix64 rng(2026);
    int64_t violations = 0;
    int ordered = 0;
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const double lift0 = rng.uniform();
        const double lift2 = 0.5 * rng.uniform();
        const double drop = rng.uniform();
        ProblemSpec lifted = base;
        lifted.name = "lifted";
        const ScalarField bp = base.psi;
        const ScalarField bf = base.phi;
        lifted.psi = ScalarField::native("lifted psi", [=](double x, double y, double t) {
            return bp(x, y, t) + lift0 + lift2 * (2.0 - x * x - y * y);
        });
        lifted.phi = ScalarField::native("lowered phi", [=](double x, double y, double t) {
            return bf(x, y, t) - drop;
        });
        auto [tw, tv] = lockstep_solve(lifted, base, grid);
        ComparisonReport rep = check_comparison(tw, lifted, tv, base, 1e-12);
        ordered += rep.data_ordered ? 1 : 0;
        violations += rep.violations;
        worst = std::max(worst, rep.worst_gap);
    }
    const bool pass = ordered == 20 && violations == 0;
    verdict(3, pass,
            fmt("20 ordered lockstep pairs: %lld violations at 1e-12, worst gap %.3e",
                static_cast<long long>(violations), worst));
}

void criterion_4_ut_lower_bound() {
    int checked = 0;
    int applicable = 0;
    int failed = 0;
    double worst_margin = 1e300;
    for (const std::string& name : builtin_problem_names()) {
        const ProblemSpec spec = builtin_problem(name);
        if (!spec.domain || (spec.kind != EquationKind::pma && spec.kind != EquationKind::gcf))
            continue;
        for (double h : {1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0}) {
            UtBoundReport rep =
                check_ut_bounds(solve(spec, build_grid(*spec.domain, h)), spec, 10.0);
            ++checked;
            if (rep.applicable) {
                ++applicable;
                worst_margin = std::min(worst_margin, rep.margin);
            }
            if (!rep.pass) ++failed;
        }
    }
    const bool pass = failed == 0 && applicable >= 6;
    verdict(4, pass,
            fmt("operator floor on %d builtin runs (%d with validated data): "
                "%d failures, worst margin %.3e",
                checked, applicable, failed, worst_margin));
}

void criterion_5_dual_max_principle() {
    const ProblemSpec spec = builtin_problem("mms_quadratic");
    SolveOptions opts;
    opts.output_times = default_times(spec.T);
    SolutionTrace tr = solve(spec, build_grid(*spec.domain, 1.0 / 8.0), opts);
    DualMaxReport rep = check_dual_max_principle(tr, spec, 10.0);
    const DualMaxRow& mid = rep.rows.at(2);
    const DualMaxRow& end = rep.rows.at(4);
    const bool pass = mid.pass && end.pass;
    verdict(5, pass,
            fmt("dual Hessian sup at t=%.2f: %.4f <= %.4f; at t=%.2f: %.4f <= %.4f",
                mid.t, mid.interior_sup, mid.bound, end.t, end.interior_sup, end.bound));
}

void criterion_6_dual_residual() {
    const ProblemSpec mms = builtin_problem("mms_quadratic");
    SolveOptions opts;
    opts.output_times = default_times(mms.T);
    SolutionTrace tm = solve(mms, build_grid(*mms.domain, 1.0 / 8.0), opts);
    DualResidualReport rm = dual_residual(tm, mms, 2);
    const double bound = 5.0 * (1.0 / 8.0 + rm.dt_snap);

    const ProblemSpec st = builtin_problem("stationary_quadratic");
    SolutionTrace ts = solve(st, build_grid(*st.domain, 1.0 / 8.0), opts);
    DualResidualReport rs = dual_residual(ts, st, 2);

    const bool pass = rm.n_valid > 0 && rm.max_abs <= bound && rs.n_uniform > 0 &&
                      rs.max_abs_uniform <= 1e-12;
    verdict(6, pass,
            fmt("mms residual %.3e <= %.3f; stationary uniform-node residual %.3e <= 1e-12",
                rm.max_abs, bound, rs.max_abs_uniform));
}

void criterion_7_legendre_oracle() {
    auto grid = build_grid(make_disk({0.0, 0.0}, 1.0), 0.25);
    SplitMix64 rng(1889);
    bool bit_exact = true;
    double fy_worst = 0.0;
    double overshoot = 0.0;
    for (int k = 0; k < 50; ++k) {
        const double a = 0.5 + 1.5 * rng.uniform();
        const double b = 0.5 + 1.5 * rng.uniform();
        const double c = 0.8 * std::sqrt(a * b) * (2.0 * rng.uniform() - 1.0);
        const double lx = 2.0 * rng.uniform() - 1.0;
        const double ly = 2.0 * rng.uniform() - 1.0;
        GridFunction u(grid);
        auto value = [&](Vec2 p) {
            return a * p.x * p.x + b * p.y * p.y + c * p.x * p.y + lx * p.x + ly * p.y +
                   1e-3 * (rng.uniform() - 0.5);
        };
        for (std::size_t p = 0; p < grid->n_interior(); ++p) u.vi[p] = value(grid->interior[p]);
        for (std::size_t q = 0; q < grid->n_boundary(); ++q) u.vb[q] = value(grid->boundary[q]);

        DualGrid dg = auto_dual_grid(u);
        DualField fast = legendre_transform(u, dg);
        DualField brute = legendre_transform_brute(u, dg);
        bit_exact = bit_exact && fast.U == brute.U && fast.arg == brute.arg &&
                    fast.att == brute.att;

        for (int j = 0; j < dg.ny; ++j)
            for (int i = 0; i < dg.nx; ++i) {
                const double y1 = dg.y1(i), y2 = dg.y2(j);
                const double U = fast.U[std::size_t(j) * dg.nx + i];
                for (std::size_t p = 0; p < grid->n_interior(); ++p) {
                    const Vec2 x = grid->interior[p];
                    fy_worst = std::min(fy_worst, U + u.vi[p] - y1 * x.x - y2 * x.y);
                }
                for (std::size_t q = 0; q < grid->n_boundary(); ++q) {
                    const Vec2 x = grid->boundary[q];
                    fy_worst = std::min(fy_worst, U + u.vb[q] - y1 * x.x - y2 * x.y);
                }
            }

        GridFunction bc = biconjugate(u, dg);
        for (std::size_t p = 0; p < u.vi.size(); ++p)
            overshoot = std::max(overshoot, bc.vi[p] - u.vi[p]);
        for (std::size_t q = 0; q < u.vb.size(); ++q)
            overshoot = std::max(overshoot, bc.vb[q] - u.vb[q]);
    }

    // Convex-input equality is read at nodes whose arms are all uniform: the
    // kink-aligned dual spacing guarantees a supporting lattice slope there,
    // while cut-arm nodes expose a strictly narrower subdifferential.
    double eq_gap = 0.0;
    for (int k = 0; k < 12; ++k) {
        const double a = 0.5 + 1.5 * rng.uniform();
        const double b = 0.5 + 1.5 * rng.uniform();
        const double q4 = 0.5 * rng.uniform();
        const double lx = 2.0 * rng.uniform() - 1.0;
        const double ly = 2.0 * rng.uniform() - 1.0;
        GridFunction u(grid);
        auto value = [&](Vec2 p) {
            return a * p.x * p.x + b * p.y * p.y + lx * p.x + ly * p.y +
                   q4 * (std::pow(p.x, 4) + std::pow(p.y, 4));
        };
        for (std::size_t p = 0; p < grid->n_interior(); ++p) u.vi[p] = value(grid->interior[p]);
        for (std::size_t j = 0; j < grid->n_boundary(); ++j) u.vb[j] = value(grid->boundary[j]);
        GridFunction bc = biconjugate(u, auto_dual_grid(u));
        for (std::size_t p = 0; p < u.vi.size(); ++p) {
            overshoot = std::max(overshoot, bc.vi[p] - u.vi[p]);
            if (!grid->has_cut[p]) eq_gap = std::max(eq_gap, std::abs(bc.vi[p] - u.vi[p]));
        }
    }

    const bool pass = bit_exact && fy_worst >= -1e-13 && overshoot <= 1e-12 && eq_gap <= 1e-12;
    verdict(7, pass,
            fmt("fast==brute on 50 fields: %s; Fenchel-Young slack %.1e >= -1e-13; "
                "envelope overshoot %.1e; convex equality gap %.1e <= 1e-12",
                bit_exact ? "bit-exact" : "MISMATCH", fy_worst, overshoot, eq_gap));
}

void criterion_8_closed_forms() {
    bool max_ok = true;
    for (auto [A, B] : {std::pair{1.0, 1.0}, {3.5, 0.25}, {2.0, 2.0}}) {
        double m = 0.0;
        for (int i = 1; i < 10000; ++i) m = std::max(m, bump_w(i * 1e-4, 1.0, A, B));
        max_ok = max_ok && std::abs(m - A * std::exp(-16.0 * B)) <= 1e-12 * A * std::exp(-16.0 * B);
    }

    const bool p6_ok = p6(0.0, 1.0) == 2.0 && p6(1.0, 1.0) == 2.0;

    bool under_ok = true;
    for (double x : {1e-4, 5e-4, 1e-3, 1.0 - 1e-3, 1.0 - 5e-4, 1.0 - 1e-4})
        for (int k = 0; k <= 4; ++k)
            under_ok = under_ok && std::abs(bump_w_dx(k, x, 1.0, 1.0, 1.0)) < 1e-100;

    // The minimum is scanned over the open half-interval (0, 1/2) the clause
    // names; the global minimum sits exactly at x = 1/2.
    double rho_min = 1e300;
    double x_min = 0.0;
    for (int i = 1; i < 5000; ++i) {
        const double r = bump_rho(i * 1e-4, 1.0, 1.0, 1.0);
        if (r < rho_min) {
            rho_min = r;
            x_min = i * 1e-4;
        }
    }
    const double rho_half = bump_rho(0.5, 1.0, 1.0, 1.0);
    const bool neg_min_ok = rho_min < 0.0 && x_min > 0.0 && x_min < 0.5;
    const bool half_ok = rho_half > 0.0;

    const bool pass = max_ok && p6_ok && under_ok && neg_min_ok && half_ok;
    verdict(8, pass,
            fmt("bump max %s; P6 endpoints %s; endpoint underflow %s; "
                "rho min %.3e at x=%.4f in (0,1/2); rho(1/2)=%.3e (need > 0)",
                max_ok ? "ok" : "OFF", p6_ok ? "exact" : "INEXACT", under_ok ? "ok" : "LEAK",
                rho_min, x_min, rho_half));
}

void criterion_9_convexity_loss() {
    CeParams p1;
    p1.h = 1.0 / 200.0;
    p1.max_doublings = 20;
    p1.bisect_iters = 6;
    ConvexityLossReport r1 = run_counterexample_1d(builtin_problem("ce_1d"), p1);

    CeParams pr;
    pr.h = 1.0 / 200.0;
    pr.bisect_iters = 20;
    pr.sweep_amplitudes = {1.0, 10.0, 100.0};
    ConvexityLossReport rr = run_counterexample_radial(builtin_problem("ce_radial"), pr);
    const bool sweep_dec = rr.sweep.size() == 3 && rr.sweep[0].psi_at_r0 > rr.sweep[1].psi_at_r0 &&
                           rr.sweep[1].psi_at_r0 > rr.sweep[2].psi_at_r0;
    const bool radial_cross = rr.found && rr.min_second_at_loss < 0.0 &&
                              !rr.sweep.empty() && rr.sweep[0].min_second > 0.0;

    const bool pass = r1.found && r1.doublings <= 20 && r1.superposition_C < 10.0 &&
                      sweep_dec && rr.fit_r2 > 0.99 && radial_cross;
    verdict(9, pass,
            fmt("1d loss after %d doublings (A=%.0f), superposition C=%.2f < 10; "
                "radial Psi(r0,1) decreasing over A={1,10,100}, fit R2=%.5f, "
                "min(u_rr,u_r/r) %.3e < 0 at finite A",
                r1.doublings, r1.A_loss, r1.superposition_C, rr.fit_r2,
                rr.min_second_at_loss));
}

void criterion_10_gcf() {
    const ProblemSpec base = builtin_problem("gcf_quadratic_start");
    bool completed = true;
    bool refined = true;
    double worst_ratio = 0.0;
    for (double gamma : {1.0, 0.5}) {
        ProblemSpec spec = base;
        spec.gamma = gamma;
        SolutionTrace coarse = solve(spec, build_grid(*spec.domain, 1.0 / 8.0));
        SolutionTrace fine = solve(spec, build_grid(*spec.domain, 1.0 / 16.0));
        completed = completed && coarse.snaps.back().t == spec.T && fine.snaps.back().t == spec.T;
        GcfGradientReport rep = check_gcf_gradient_bound(coarse, fine, 10.0);
        refined = refined && rep.pass;
        worst_ratio = std::max(worst_ratio, rep.ratio);
    }

    SplitMix64 rng(4242);
    double unit_gap = 0.0;
    for (int k = 0; k < 2000; ++k) {
        const double ma = 10.0 * rng.uniform();
        const double gsq = 25.0 * rng.uniform();
        unit_gap = std::max(unit_gap, std::abs(gcf_speed(ma, gsq, 1.0) - gcf_speed_unit(ma, gsq)));
    }

    const bool pass = completed && refined && unit_gap <= 1e-15;
    verdict(10, pass,
            fmt("gamma 1 and 1/2 reach T=0.5; sup|Du| refinement ratio %.4f <= 2.25; "
                "generic-vs-unit speed gap %.1e <= 1e-15",
                worst_ratio, unit_gap));
}

bool same_bytes(const fs::path& a, const fs::path& b) {
    std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
    std::ostringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    return fa.good() == fb.good() && sa.str() == sb.str();
}

void criterion_11_determinism() {
    const fs::path work = "acceptance_tmp";
    fs::remove_all(work);
    fs::create_directories(work);
    int compared = 0;
    bool identical = true;
    for (const char* text :
         {R"({"command": "solve", "problem": "mms_quadratic", "h": 0.125, "seed": 7,
             "out": "acceptance_tmp/run"})",
          R"({"command": "verify", "problem": "stationary_quadratic", "h": 0.125, "seed": 7,
             "out": "acceptance_tmp/run"})"}) {
        RunConfig cfg = parse_config(text);
        finalize_config(cfg);
        fs::remove_all(work / "run");
        run_command(cfg);
        fs::remove_all(work / "first");
        fs::copy(work / "run", work / "first", fs::copy_options::recursive);
        run_command(cfg);
        for (const auto& e : fs::recursive_directory_iterator(work / "first")) {
            if (!e.is_regular_file()) continue;
            ++compared;
            const fs::path rel = fs::relative(e.path(), work / "first");
            identical = identical && same_bytes(e.path(), work / "run" / rel);
        }
    }
    const bool pass = identical && compared > 0;
    verdict(11, pass,
            fmt("%d files byte-compared across repeated solve and verify runs: %s", compared,
                identical ? "identical" : "DIFFER"));
}

}  // namespace

int main() {
    std::printf("acceptance: 11 criteria, stated tolerances, no retries\n");
    struct Item {
        int id;
        void (*run)();
    };
    const Item items[] = {
        {1, criterion_1_mms_convergence}, {2, criterion_2_stationarity},
        {3, criterion_3_comparison},      {4, criterion_4_ut_lower_bound},
        {5, criterion_5_dual_max_principle}, {6, criterion_6_dual_residual},
        {7, criterion_7_legendre_oracle}, {8, criterion_8_closed_forms},
        {9, criterion_9_convexity_loss},  {10, criterion_10_gcf},
        {11, criterion_11_determinism},
    };
    for (const Item& it : items) {
        try {
            it.run();
        } catch (const std::exception& e) {
            verdict(it.id, false, fmt("exception: %s", e.what()));
        }
    }
    if (g_failures == 0) {
        std::printf("acceptance: all 11 criteria pass\n");
        return 0;
    }
    std::printf(
        "acceptance: %d of 11 criteria fail; expected failures are analyzed in "
        "README.md (Acceptance status)\n",
        g_failures);
    return 1;
}
