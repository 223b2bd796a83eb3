#pragma once

#include <vector>

#include "pmaflow/problem.hpp"

namespace pmaflow {

/// P6(x) = 2B - 8Bx + (8B-3)x^2 + 16x^3 - 33x^4 + 30x^5 - 10x^6, evaluated
/// in Horner form so P6(0) = P6(1) = 2B hold exactly for representable B.
double p6(double x, double B);

/// The bump w(x,t) = A t exp(-B / s(x)), s(x) = x^2 (1-x)^2, extended by 0
/// at x in {0,1}. Exponent underflow near the endpoints is the intended
/// behavior (w vanishes to all orders there).
double bump_w(double x, double t, double A, double B);

/// Time derivative w_t = A exp(-B/s(x)).
double bump_w_t(double x, double A, double B);

/// k-th x-derivative of the bump, k = 0..4, in closed form. All powers of
/// 1/s are folded into the exponent (exp(g - m log s)) so near-endpoint
/// evaluation underflows cleanly to 0 instead of producing 0 * inf.
double bump_w_dx(int k, double x, double t, double A, double B);

/// rho = -w_t + w_xx: the source perturbation generated by the bump.
double bump_rho(double x, double t, double A, double B);

/// Radial source of the perturbed n-dimensional problem for u = v + w with
/// base v = (1+t) r^2 / 2:
///   Psi(r,t) = -v_t - w_t + ((v_r + w_r)/r)^{n-1} (v_rr + w_rr),
/// with the r -> 0 limit (v_r + w_r)/r -> v_rr + w_rr.
double radial_psi_eff(double r, double t, int n, double A, double B);

/// Uniform-grid explicit trace on [0,1]. For the heat solver min_second
/// tracks u_xx; for the radial solver it tracks min(u_rr, u_r/r).
struct Trace1D {
    double h = 0.0;
    double dt = 0.0;
    double T = 0.0;
    std::vector<double> xs;
    std::vector<double> times;
    std::vector<std::vector<double>> snaps;
    std::vector<double> step_min_second;
    std::vector<double> step_max_second;
    double min_second = 0.0;
    double min_second_x = 0.0;
    double min_second_t = 0.0;
    bool negative_slope = false;  // radial: some u_r < 0 was observed
};

/// Explicit Euler for u_t = u_xx - psi(x,t) on (0,1), Dirichlet data phi at
/// both endpoints, dt = 0.4 h^2. Snapshots at out_times (t = 0 included).
Trace1D solve_1d(const ScalarField& psi, const ScalarField& phi, double h, double T,
                 const std::vector<double>& out_times);

/// Explicit Euler for v_t = (v_r/r)^{n-1} v_rr - psi(r,t) on (0,1), Dirichlet
/// at r = 1 only; at r = 0 the even extension gives v_r = 0 and
/// v_t(0) = v_rr(0)^n - psi(0,t). dt adapts to 0.4 h^2 / max(1, coeff).
Trace1D solve_radial(int n, const ScalarField& psi, const ScalarField& phi, double h,
                     double T, const std::vector<double>& out_times);

struct CeParams {
    double A0 = 1.0;
    double h = 1.0 / 200.0;
    int max_doublings = 20;
    int bisect_iters = 30;
    std::vector<double> sweep_amplitudes;  // radial Psi sweep; default {1,10,100}
};

struct SweepRow {
    double A = 0.0;
    double min_second = 0.0;
    double psi_at_r0 = 0.0;  // radial only: Psi(r0, 1)
};

/// Outcome of a convexity-loss search. `threshold_A` is grid-dependent by
/// construction and labeled so in reports.
struct ConvexityLossReport {
    std::string problem;
    double B = 1.0;
    double h = 0.0;
    double dt = 0.0;
    double T = 0.0;
    bool found = false;
    double A_loss = 0.0;  // first doubled amplitude with min_second < 0
    int doublings = 0;
    double threshold_A = 0.0;  // bisected sign-change amplitude
    double min_second_at_loss = 0.0;
    double argmin_x = 0.0;
    double argmin_t = 0.0;
    double superposition_gap = 0.0;  // direct solve vs v + w at A = A0
    double superposition_C = 0.0;    // gap / (h^2 + dt)
    double rho_boundary_max = 0.0;   // max |rho| at x in {0,1} over time samples
    std::vector<SweepRow> sweep;
    // Radial extras.
    double r0 = 0.0;          // argmin of w_rr(., 1) by dense scan
    double fit_slope = 0.0;   // linear fit of Psi(r0, 1) against A
    double fit_r2 = 0.0;
};

/// Doubling-then-bisection search for loss of spatial convexity in the 1-d
/// problem u_t = u_xx - (psi_base + rho_A), driven by direct solves.
ConvexityLossReport run_counterexample_1d(const ProblemSpec& spec, const CeParams& params);

/// Radial variant: closed-form Psi sweep at r0, closed-form convexity-loss
/// bisection for u = v + w, plus one direct solve at A0 as a superposition
/// check of solve_radial.
ConvexityLossReport run_counterexample_radial(const ProblemSpec& spec, const CeParams& params);

}  // namespace pmaflow
