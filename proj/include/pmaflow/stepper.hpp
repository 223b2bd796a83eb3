#pragma once

#include <functional>

#include "pmaflow/ma_core.hpp"
#include "pmaflow/problem.hpp"

namespace pmaflow {

struct SolverState {
    GridFunction u;
    double t = 0.0;
    int64_t step = 0;
};

/// Per-step reductions. Eigenvalues of the central Hessian are split between
/// nodes with all-uniform arms (core) and nodes with at least one cut arm.
struct Diagnostics {
    int64_t step = 0;
    double t = 0.0;
    double dt = 0.0;
    double min_ut_psi = 0.0;  // min over nodes of u_t + psi (the operator value)
    double max_ut_psi = 0.0;
    double min_lambda_core = 0.0;
    double max_lambda_core = 0.0;
    double min_lambda_cut = 0.0;
    double max_lambda_cut = 0.0;
    double min_ma = 0.0;
    double cfl_ratio = 0.0;  // dt / formula bound
};

struct Snapshot {
    double t = 0.0;
    GridFunction u;
};

struct SolutionTrace {
    std::shared_ptr<const Grid> grid;
    std::string problem;
    double T = 0.0;
    int stencil_width = 2;
    double safety = 0.5;
    std::vector<Snapshot> snaps;
    std::vector<Diagnostics> diag;
};

struct SolveOptions {
    std::vector<double> output_times;  // union-ed with {0, T}
    bool record_steps = false;         // snapshot after every step
    double safety = 0.5;
    int width = 2;
    bool central_det = false;  // substitute the non-monotone central operator
    /// Additive perturbation of the interior initial data; in lockstep_solve
    /// it applies to the first problem only.
    std::function<double(Vec2)> initial_delta;
};

/// Speed of the curvature flow: (ma+)^gamma * (1 + |Du|^2)^((1-4*gamma)/2).
/// The unit-gamma fast path skips the first pow; both share the second
/// factor bitwise.
double gcf_speed(double ma_plus, double grad_sq, double gamma);
double gcf_speed_unit(double ma_plus, double grad_sq);

/// Interior nodes sample phi(., 0) (plus the optional delta), boundary nodes
/// sample phi exactly; no arithmetic is applied, so the t = 0 snapshot equals
/// the data bit for bit.
SolverState make_initial_state(const ProblemSpec& spec, std::shared_ptr<const Grid> grid,
                               const std::function<double(Vec2)>& initial_delta = {});

/// Largest explicit step the frozen-coefficient heat bound allows:
/// safety * h^2 / (2 * (max a11 + max a22)), a_ii the positive parts of the
/// linearized diffusion coefficients, clamped to [1e-10 * max(1,T), T - t].
/// Throws StiffnessOverflow when the clamp floor wins.
double cfl_dt(const SolverState& state, const ProblemSpec& spec, double safety = 0.5);

/// One explicit Euler step of -u_t + MA_h[u] = psi (resp. the curvature
/// flow). Pure: returns the advanced state, boundary refreshed at t + dt.
SolverState step_pma(const SolverState& state, const ProblemSpec& spec, double dt);
SolverState step_gcf(const SolverState& state, const ProblemSpec& spec, double dt);

/// March to T with dt = min(cfl_dt, safety / max center sensitivity), the
/// second bound being the exact monotonicity limit of the scheme. Snapshots
/// at the requested times (linear interpolation between steps, boundary
/// sampled exactly), one Diagnostics row per step.
SolutionTrace solve(const ProblemSpec& spec, std::shared_ptr<const Grid> grid,
                    const SolveOptions& opts = {});

/// Advance two problems on one grid with the common (minimum) dt each step,
/// recording every step; the backbone of comparison testing.
std::pair<SolutionTrace, SolutionTrace> lockstep_solve(const ProblemSpec& spec_w,
                                                       const ProblemSpec& spec_v,
                                                       std::shared_ptr<const Grid> grid,
                                                       const SolveOptions& opts = {});

GridFunction sample_field(const ScalarField& f, std::shared_ptr<const Grid> grid, double t);

/// Max Euclidean norm of the central gradient over interior nodes.
double sup_gradient(const GridFunction& u);

}  // namespace pmaflow
