#pragma once

#include "pmaflow/legendre.hpp"

namespace pmaflow {

/// Discrete comparison principle on lockstep traces: data ordered as
/// psi_w >= psi_v (nodewise, every step time) and w <= v on the parabolic
/// boundary must give w <= v everywhere. `violations` counts nodes where
/// w - v exceeds the tolerance.
struct ComparisonReport {
    double tolerance = 1e-12;
    bool data_ordered = false;
    int64_t steps_checked = 0;
    int64_t nodes_checked = 0;
    int64_t violations = 0;
    double worst_gap = 0.0;  // max of w - v seen anywhere
    double worst_t = 0.0;
    bool pass = false;
};
ComparisonReport check_comparison(const SolutionTrace& tw, const ProblemSpec& sw,
                                  const SolutionTrace& tv, const ProblemSpec& sv,
                                  double tolerance = 1e-12);

/// Lower bound on the operator value u_t + psi along the flow:
/// min{c0, min MA_h[u0]} - kappa*h, asserted when the data conditions hold.
struct UtBoundReport {
    bool applicable = false;  // data conditions validated
    double bound = 0.0;
    double slack = 0.0;
    double observed_min = 0.0;
    double observed_max = 0.0;
    double margin = 0.0;
    bool pass = false;
};
UtBoundReport check_ut_bounds(const SolutionTrace& tr, const ProblemSpec& spec,
                              double kappa = 10.0);

/// Interior Hessian eigenvalue floor via the dual field: at each snapshot,
/// min eig D^2_h u >= 1 / (ring sup of D^2 U) - kappa*h. Applicable while
/// the monotone operator stayed positive (the flow kept discrete convexity).
struct EigenBoundRow {
    double t = 0.0;
    double min_lambda = 0.0;
    double ring_sup = 0.0;
    double bound = 0.0;
    bool pass = false;
};
struct EigenBoundReport {
    bool applicable = false;
    std::vector<EigenBoundRow> rows;
    double worst_margin = 0.0;
    bool pass = false;
};
EigenBoundReport check_eigen_bounds(const SolutionTrace& tr, const ProblemSpec& spec,
                                    double kappa = 10.0);

/// Dual maximum principle: the interior sup of ||D^2 U|| stays below the
/// boundary-ring sup plus kappa*h at every snapshot.
struct DualMaxRow {
    double t = 0.0;
    double interior_sup = 0.0;
    double ring_sup = 0.0;
    double bound = 0.0;
    bool pass = false;
};
struct DualMaxReport {
    std::vector<DualMaxRow> rows;
    double worst_margin = 0.0;
    bool pass = false;
};
DualMaxReport check_dual_max_principle(const SolutionTrace& tr, const ProblemSpec& spec,
                                       double kappa = 10.0);

/// Parabolic Holder quotient sup over sampled pairs:
/// |f(x,t) - f(y,s)| / (|x-y|^2 + |t-s|)^(alpha/2), f given by snapshots
/// (interior and boundary nodes). Low-discrepancy sampling seeded
/// deterministically; enlarging `pairs` never lowers the result.
struct HolderReport {
    double alpha = 1.0;
    int64_t pairs = 0;
    uint64_t seed = 0;
    double seminorm = 0.0;
    double mean_quotient = 0.0;
};
HolderReport holder_seminorm(const std::vector<Snapshot>& snaps, double alpha,
                             int64_t pairs = 100000, uint64_t seed = 1);

/// Difference quotients (u_{k+1} - u_k)/(t_{k+1} - t_k) between consecutive
/// snapshots, stamped at the midpoint times.
std::vector<Snapshot> ut_quotients(const SolutionTrace& tr);

/// Stability of sup |Du| under refinement: the coarse/fine sups (over all
/// snapshots) must agree within a factor 1 + kappa * h_coarse.
struct GcfGradientReport {
    double sup_coarse = 0.0;
    double sup_fine = 0.0;
    double ratio = 0.0;
    double bound = 0.0;
    bool pass = false;
};
GcfGradientReport check_gcf_gradient_bound(const SolutionTrace& coarse,
                                           const SolutionTrace& fine, double kappa = 10.0);

}  // namespace pmaflow
