#include "pmaflow/counterexamples.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pmaflow {

double p6(double x, double B) {
    double c2 = 8.0 * B - 3.0;
    double acc = -10.0;
    acc = acc * x + 30.0;
    acc = acc * x - 33.0;
    acc = acc * x + 16.0;
    acc = acc * x + c2;
    acc = acc * x - 8.0 * B;
    acc = acc * x + 2.0 * B;
    return acc;
}

namespace {

// s(x) = x^2 (1-x)^2 and friends, via a = x(1-x):
//   s = a^2, s' = 2a(1-2x), s'' = 2(1-6a).
struct SParts {
    double a;
    double s;
    double s1;
    double s2;
};

SParts s_parts(double x) {
    double a = x * (1.0 - x);
    return {a, a * a, 2.0 * a * (1.0 - 2.0 * x), 2.0 * (1.0 - 6.0 * a)};
}

double p6_d1(double x, double B) {
    double acc = -60.0;
    acc = acc * x + 150.0;
    acc = acc * x - 132.0;
    acc = acc * x + 48.0;
    acc = acc * x + 2.0 * (8.0 * B - 3.0);
    acc = acc * x - 8.0 * B;
    return acc;
}

double p6_d2(double x, double B) {
    double acc = -300.0;
    acc = acc * x + 600.0;
    acc = acc * x - 396.0;
    acc = acc * x + 96.0;
    acc = acc * x + 2.0 * (8.0 * B - 3.0);
    return acc;
}

// exp(-B/s - m log s), the shared decay factor of every derivative. Underflows
// to exactly 0 near the endpoints, where -B/s dominates any -m log s.
double decay(double s, double B, int m) {
    return std::exp(-B / s - double(m) * std::log(s));
}

bool outside(double x, double s) { return x <= 0.0 || x >= 1.0 || s <= 0.0; }

}  // namespace

double bump_w(double x, double t, double A, double B) {
    double s = s_parts(x).s;
    if (outside(x, s)) return 0.0;
    return A * t * decay(s, B, 0);
}

double bump_w_t(double x, double A, double B) {
    double s = s_parts(x).s;
    if (outside(x, s)) return 0.0;
    return A * decay(s, B, 0);
}

double bump_w_dx(int k, double x, double t, double A, double B) {
    if (k < 0 || k > 4) throw ConfigError("derivative order must be 0..4");
    SParts q = s_parts(x);
    const double s = q.s, s1 = q.s1, s2 = q.s2;
    if (outside(x, s)) return 0.0;
    switch (k) {
        case 0:
            return A * t * decay(s, B, 0);
        case 1:
            return A * B * t * s1 * decay(s, B, 2);
        case 2:
            return 2.0 * A * B * t * decay(s, B, 3) * p6(x, B);
        default:
            break;
    }
    double P = p6(x, B);
    double P1 = p6_d1(x, B);
    double Q = s1 * (B - 3.0 * s) * P + s * s * P1;
    if (k == 3) return 2.0 * A * B * t * decay(s, B, 5) * Q;
    double P2 = p6_d2(x, B);
    double Q1 = s2 * (B - 3.0 * s) * P - 3.0 * s1 * s1 * P + s1 * (B - 3.0 * s) * P1 +
                2.0 * s * s1 * P1 + s * s * P2;
    return 2.0 * A * B * t * decay(s, B, 7) * (s1 * (B - 5.0 * s) * Q + s * s * Q1);
}

double bump_rho(double x, double t, double A, double B) {
    return -bump_w_t(x, A, B) + bump_w_dx(2, x, t, A, B);
}

double radial_psi_eff(double r, double t, int n, double A, double B) {
    double vt = 0.5 * r * r;
    double vrr = 1.0 + t;
    double wt = bump_w_t(r, A, B);
    double wrr = bump_w_dx(2, r, t, A, B);
    double slope;
    if (r > 0.0) {
        slope = (vrr * r + bump_w_dx(1, r, t, A, B)) / r;
    } else {
        slope = vrr + wrr;
    }
    double pw = 1.0;
    for (int k = 1; k < n; ++k) pw *= slope;
    return -vt - wt + pw * (vrr + wrr);
}

namespace {

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

void record_snapshots(Trace1D& tr, std::size_t& next, const std::vector<double>& plan,
                      double t_old, double t_new, double dt, const std::vector<double>& u_old,
                      const std::vector<double>& u_new, double T) {
    double tol = 1e-12 * std::max(1.0, T);
    while (next < plan.size() && plan[next] <= t_new + tol) {
        double tau = plan[next];
        double theta = dt > 0.0 ? (tau - t_old) / dt : 1.0;
        if (theta >= 1.0 - 1e-12) {
            tr.snaps.push_back(u_new);
        } else {
            std::vector<double> snap(u_old.size());
            for (std::size_t i = 0; i < snap.size(); ++i)
                snap[i] = u_old[i] + theta * (u_new[i] - u_old[i]);
            tr.snaps.push_back(std::move(snap));
        }
        tr.times.push_back(tau);
        ++next;
    }
}

struct SecondScan {
    double mn = std::numeric_limits<double>::infinity();
    double mx = -std::numeric_limits<double>::infinity();
    double argmin_x = 0.0;
};

}  // namespace

Trace1D solve_1d(const ScalarField& psi, const ScalarField& phi, double h, double T,
                 const std::vector<double>& out_times) {
    if (h <= 0.0 || h >= 0.5) throw ConfigError("interval step must lie in (0, 0.5)");
    std::size_t n = std::size_t(std::llround(1.0 / h)) + 1;
    double hh = 1.0 / double(n - 1);

    Trace1D tr;
    tr.h = hh;
    tr.T = T;
    tr.xs.resize(n);
    for (std::size_t i = 0; i < n; ++i) tr.xs[i] = double(i) * hh;

    int64_t steps = std::max<int64_t>(1, (int64_t)std::ceil(T / (0.4 * hh * hh)));
    double dt = T / double(steps);
    tr.dt = dt;

    std::vector<double> u(n), un(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = phi(tr.xs[i], 0.0, 0.0);

    auto scan_second = [&](const std::vector<double>& f) {
        SecondScan sc;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            double d2 = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (hh * hh);
            if (d2 < sc.mn) {
                sc.mn = d2;
                sc.argmin_x = tr.xs[i];
            }
            sc.mx = std::max(sc.mx, d2);
        }
        return sc;
    };

    auto plan = plan_times(out_times, T);
    std::size_t next = 0;
    record_snapshots(tr, next, plan, 0.0, 0.0, 0.0, u, u, T);

    SecondScan sc0 = scan_second(u);
    tr.step_min_second.push_back(sc0.mn);
    tr.step_max_second.push_back(sc0.mx);
    tr.min_second = sc0.mn;
    tr.min_second_x = sc0.argmin_x;
    tr.min_second_t = 0.0;

    double t = 0.0;
    for (int64_t k = 0; k < steps; ++k) {
        double t_new = k + 1 == steps ? T : t + dt;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            double d2 = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (hh * hh);
            un[i] = u[i] + dt * (d2 - psi(tr.xs[i], 0.0, t));
        }
        un[0] = phi(0.0, 0.0, t_new);
        un[n - 1] = phi(1.0, 0.0, t_new);
        for (double v : un)
            if (!std::isfinite(v))
                throw NonFiniteField("1-d field lost finiteness at t = " + format_double(t_new));

        SecondScan sc = scan_second(un);
        tr.step_min_second.push_back(sc.mn);
        tr.step_max_second.push_back(sc.mx);
        if (sc.mn < tr.min_second) {
            tr.min_second = sc.mn;
            tr.min_second_x = sc.argmin_x;
            tr.min_second_t = t_new;
        }

        record_snapshots(tr, next, plan, t, t_new, t_new - t, u, un, T);
        u.swap(un);
        t = t_new;
    }
    return tr;
}

Trace1D solve_radial(int n_dim, const ScalarField& psi, const ScalarField& phi, double h,
                     double T, const std::vector<double>& out_times) {
    if (h <= 0.0 || h >= 0.5) throw ConfigError("interval step must lie in (0, 0.5)");
    if (n_dim < 1 || n_dim > 6) throw ConfigError("radial dimension must be 1..6");
    std::size_t n = std::size_t(std::llround(1.0 / h)) + 1;
    double hh = 1.0 / double(n - 1);

    Trace1D tr;
    tr.h = hh;
    tr.T = T;
    tr.xs.resize(n);
    for (std::size_t i = 0; i < n; ++i) tr.xs[i] = double(i) * hh;

    std::vector<double> u(n), un(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = phi(tr.xs[i], 0.0, 0.0);

    auto plan = plan_times(out_times, T);
    std::size_t next = 0;
    record_snapshots(tr, next, plan, 0.0, 0.0, 0.0, u, u, T);

    tr.min_second = std::numeric_limits<double>::infinity();

    auto scan_pair = [&](const std::vector<double>& f, double t_at) {
        SecondScan sc;
        double urr0 = 2.0 * (f[1] - f[0]) / (hh * hh);
        sc.mn = urr0;
        sc.argmin_x = 0.0;
        sc.mx = urr0;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            double urr = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (hh * hh);
            double slope = (f[i + 1] - f[i - 1]) / (2.0 * hh * tr.xs[i]);
            if (slope < 0.0) tr.negative_slope = true;
            double mn = std::min(urr, slope);
            if (mn < sc.mn) {
                sc.mn = mn;
                sc.argmin_x = tr.xs[i];
            }
            sc.mx = std::max(sc.mx, std::max(urr, slope));
        }
        if (sc.mn < tr.min_second) {
            tr.min_second = sc.mn;
            tr.min_second_x = sc.argmin_x;
            tr.min_second_t = t_at;
        }
        tr.step_min_second.push_back(sc.mn);
        tr.step_max_second.push_back(sc.mx);
        return sc;
    };

    SecondScan sc = scan_pair(u, 0.0);
    double t = 0.0;
    double tolT = 1e-12 * std::max(1.0, T);
    bool first = true;
    while (t < T - tolT) {
        double coeff = std::max(1.0, std::pow(std::max(std::fabs(sc.mx), 1.0), n_dim - 1));
        double dt = std::min(0.4 * hh * hh / coeff, T - t);
        if (first) {
            tr.dt = dt;
            first = false;
        }
        double t_new = t + dt >= T - tolT ? T : t + dt;
        dt = t_new - t;

        double urr0 = 2.0 * (u[1] - u[0]) / (hh * hh);
        double op0 = 1.0;
        for (int k = 0; k < n_dim; ++k) op0 *= urr0;
        un[0] = u[0] + dt * (op0 - psi(0.0, 0.0, t));
        for (std::size_t i = 1; i + 1 < n; ++i) {
            double urr = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (hh * hh);
            double slope = (u[i + 1] - u[i - 1]) / (2.0 * hh * tr.xs[i]);
            double pw = 1.0;
            for (int k = 1; k < n_dim; ++k) pw *= slope;
            un[i] = u[i] + dt * (pw * urr - psi(tr.xs[i], 0.0, t));
        }
        un[n - 1] = phi(1.0, 0.0, t_new);
        for (double v : un)
            if (!std::isfinite(v))
                throw NonFiniteField("radial field lost finiteness at t = " +
                                     format_double(t_new));

        sc = scan_pair(un, t_new);
        record_snapshots(tr, next, plan, t, t_new, dt, u, un, T);
        u.swap(un);
        t = t_new;
    }
    return tr;
}

namespace {

double trace_gap_vs_exact(const Trace1D& tr, const ScalarField& exact) {
    const std::vector<double>& last = tr.snaps.back();
    double t = tr.times.back();
    double gap = 0.0;
    for (std::size_t i = 0; i < tr.xs.size(); ++i)
        gap = std::max(gap, std::fabs(last[i] - exact(tr.xs[i], 0.0, t)));
    return gap;
}

}  // namespace

ConvexityLossReport run_counterexample_1d(const ProblemSpec& spec, const CeParams& params) {
    if (spec.kind != EquationKind::heat_1d || !spec.bump)
        throw ConfigError("1-d convexity-loss search needs the 1-d bump problem");
    ConvexityLossReport rep;
    rep.problem = spec.name;
    rep.B = spec.bump->B;
    rep.h = params.h;
    rep.T = spec.T;

    auto solve_at = [&](double A) {
        ProblemSpec sp = with_amplitude(spec, A);
        return solve_1d(sp.psi, sp.phi, params.h, spec.T, {spec.T});
    };

    Trace1D base = solve_at(params.A0);
    rep.dt = base.dt;
    {
        ProblemSpec sp = with_amplitude(spec, params.A0);
        rep.superposition_gap = trace_gap_vs_exact(base, sp.exact);
        rep.superposition_C = rep.superposition_gap / (base.h * base.h + base.dt);
        for (int k = 0; k <= 100; ++k) {
            double t = spec.T * double(k) / 100.0;
            rep.rho_boundary_max =
                std::max({rep.rho_boundary_max, std::fabs(bump_rho(0.0, t, params.A0, rep.B)),
                          std::fabs(bump_rho(1.0, t, params.A0, rep.B))});
        }
    }

    double A = params.A0;
    double last_convex = params.A0;
    Trace1D tr = base;
    for (int d = 0; d <= params.max_doublings; ++d) {
        if (d > 0) {
            A = A * 2.0;
            tr = solve_at(A);
        }
        rep.sweep.push_back({A, tr.min_second, 0.0});
        if (tr.min_second < 0.0) {
            rep.found = true;
            rep.A_loss = A;
            rep.doublings = d;
            rep.min_second_at_loss = tr.min_second;
            rep.argmin_x = tr.min_second_x;
            rep.argmin_t = tr.min_second_t;
            break;
        }
        last_convex = A;
    }
    if (!rep.found) return rep;

    double lo = last_convex, hi = rep.A_loss;
    for (int it = 0; it < params.bisect_iters; ++it) {
        double mid = 0.5 * (lo + hi);
        Trace1D tm = solve_at(mid);
        (tm.min_second < 0.0 ? hi : lo) = mid;
    }
    rep.threshold_A = 0.5 * (lo + hi);
    return rep;
}

ConvexityLossReport run_counterexample_radial(const ProblemSpec& spec, const CeParams& params) {
    if (spec.kind != EquationKind::radial || !spec.bump)
        throw ConfigError("radial convexity-loss search needs the radial bump problem");
    ConvexityLossReport rep;
    rep.problem = spec.name;
    rep.B = spec.bump->B;
    rep.h = params.h;
    rep.T = spec.T;
    const double B = rep.B;
    const int n = spec.dim;
    const double tq = 1.0;  // the closed-form scans probe the final time

    // argmin of w_rr(., 1) at unit amplitude, dense scan.
    double best = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 10000; ++k) {
        double r = double(k) * 1e-4;
        double v = bump_w_dx(2, r, tq, 1.0, B);
        if (v < best) {
            best = v;
            rep.r0 = r;
        }
    }

    // u = v + w at amplitude A: radial Hessian eigenvalues at t = 1 are
    // u_rr = 2 + A w_rr and u_r/r = 2 + A w_r/r.
    auto min_pair_at = [&](double A) {
        double mn = std::numeric_limits<double>::infinity();
        double arg = 0.0;
        for (int k = 0; k < 10000; ++k) {
            double r = double(k) * 1e-4;
            double urr = (1.0 + tq) + A * bump_w_dx(2, r, tq, 1.0, B);
            double m = urr;
            if (r > 0.0) {
                double slope = (1.0 + tq) + A * bump_w_dx(1, r, tq, 1.0, B) / r;
                m = std::min(urr, slope);
            }
            if (m < mn) {
                mn = m;
                arg = r;
            }
        }
        return std::pair<double, double>{mn, arg};
    };

    std::vector<double> amps = params.sweep_amplitudes;
    if (amps.empty()) amps = {1.0, 10.0, 100.0};
    for (double A : amps)
        rep.sweep.push_back({A, min_pair_at(A).first, radial_psi_eff(rep.r0, tq, n, A, B)});

    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    double m = double(rep.sweep.size());
    for (const auto& row : rep.sweep) {
        sx += row.A;
        sy += row.psi_at_r0;
        sxx += row.A * row.A;
        sxy += row.A * row.psi_at_r0;
        syy += row.psi_at_r0 * row.psi_at_r0;
    }
    double denom = m * sxx - sx * sx;
    rep.fit_slope = denom != 0.0 ? (m * sxy - sx * sy) / denom : 0.0;
    double cov = m * sxy - sx * sy;
    double vy = m * syy - sy * sy;
    rep.fit_r2 = denom > 0.0 && vy > 0.0 ? (cov * cov) / (denom * vy) : 1.0;

    double A = params.A0;
    double last_convex = params.A0;
    for (int d = 0; d <= params.max_doublings; ++d) {
        if (d > 0) A = A * 2.0;
        auto [mn, arg] = min_pair_at(A);
        if (mn < 0.0) {
            rep.found = true;
            rep.A_loss = A;
            rep.doublings = d;
            rep.min_second_at_loss = mn;
            rep.argmin_x = arg;
            rep.argmin_t = tq;
            break;
        }
        last_convex = A;
    }
    if (rep.found) {
        double lo = last_convex, hi = rep.A_loss;
        for (int it = 0; it < 40; ++it) {
            double mid = 0.5 * (lo + hi);
            (min_pair_at(mid).first < 0.0 ? hi : lo) = mid;
        }
        rep.threshold_A = 0.5 * (lo + hi);
    }

    ProblemSpec sp = with_amplitude(spec, params.A0);
    Trace1D direct = solve_radial(n, sp.psi, sp.phi, params.h, spec.T, {spec.T});
    rep.dt = direct.dt;
    rep.superposition_gap = trace_gap_vs_exact(direct, sp.exact);
    rep.superposition_C = rep.superposition_gap / (direct.h * direct.h + direct.dt);
    return rep;
}

}  // namespace pmaflow
