#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "pmaflow/expr.hpp"
#include "pmaflow/geometry.hpp"

namespace pmaflow {

/// Closed-form scalar function of (x, y, t). For the 1-d and radial model
/// problems the first argument is the spatial coordinate (x or r) and y is
/// ignored. `desc` is the config-facing description (expression text or
/// "builtin:<name>/<field>").
struct ScalarField {
    std::function<double(double, double, double)> f;
    std::string desc;

    double operator()(double x, double y, double t) const { return f(x, y, t); }
    double operator()(Vec2 p, double t) const { return f(p.x, p.y, t); }
    bool empty() const { return !f; }

    static ScalarField from_expr(const std::string& text);
    static ScalarField native(std::string desc, std::function<double(double, double, double)> f);
    static ScalarField zero();
};

enum class EquationKind { pma, gcf, heat_1d, radial };

std::string kind_name(EquationKind k);

/// Bump perturbation parameters of the nonexistence construction:
/// w(x,t) = A t exp(-B / (x^2 (1-x)^2)).
struct BumpParams {
    double A = 1.0;
    double B = 1.0;
};

/// Complete problem data: equation kind, domain, horizon, boundary/initial
/// data phi, source psi, the boundary positivity constant c0, and (when
/// known) the exact solution for error measurement.
struct ProblemSpec {
    std::string name;
    EquationKind kind = EquationKind::pma;
    double gamma = 1.0;  // GCF exponent, in (0, 1]
    int dim = 2;         // radial problems: ambient dimension n
    std::optional<Domain> domain;
    double T = 1.0;
    double c0 = 1.0;
    ScalarField psi;  // empty means identically zero
    ScalarField phi;
    ScalarField exact;  // may be empty
    std::optional<BumpParams> bump;
};

/// Built-in library: mms_quadratic, stationary_quadratic, gcf_quadratic_start,
/// ce_1d, ce_radial. Throws UnknownProblem otherwise.
ProblemSpec builtin_problem(const std::string& name);

std::vector<std::string> builtin_problem_names();

/// Rebuilds a bump-carrying spec (ce_1d, ce_radial) at amplitude A. Throws
/// ConfigError for specs without a bump.
ProblemSpec with_amplitude(const ProblemSpec& spec, double A);

/// Central time derivative of f at (x, t), step 1e-5.
double fd_t(const ScalarField& f, Vec2 x, double t);

/// Central spatial Hessian of f at (x, t), step 5e-4 per axis. The larger
/// step keeps second-difference rounding (~eps/step^2) near 1e-9 so margins
/// at the 1e-8 tolerance are trustworthy.
Sym2 fd_hessian(const ScalarField& f, Vec2 x, double t);

/// Central spatial gradient, step 1e-5.
Vec2 fd_gradient(const ScalarField& f, Vec2 x, double t);

/// Margins of the data conditions: (P1) phi_t + psi >= c0 on the lateral
/// boundary, (P2) D^2 phi(.,0) uniformly convex, (P3) psi concave in space.
/// For 1-d/radial kinds the analogous interval/radial quantities are used
/// (radial Hessian eigenvalues are f_rr and f_r/r).
struct ConditionReport {
    EquationKind kind = EquationKind::pma;
    double tolerance = 1e-8;
    int density = 0;
    double p1_margin = 0.0;    // min over boundary x time of phi_t + psi - c0
    double p2_min_eig = 0.0;   // min eigenvalue of D^2 phi(.,0)
    double p3_max_violation = 0.0;  // max eigenvalue of D_x^2 psi
    int64_t p1_samples = 0;
    int64_t p23_samples = 0;
    bool p1_pass = false;
    bool p2_pass = false;
    bool p3_pass = false;
    bool all_pass = false;
};

ConditionReport validate_conditions(const ProblemSpec& spec, int density = 32,
                                    double tolerance = 1e-8);

/// Order-1 compatibility at t = 0 on the spatial boundary:
/// |-phi_t + det D^2 phi - psi| <= tolerance. Applies to the parabolic kinds
/// (pma, heat_1d, radial); GCF reports not-applicable.
struct CompatReport {
    bool applicable = false;
    double max_residual = 0.0;
    double tolerance = 1e-6;
    int64_t samples = 0;
    bool pass = false;
};

CompatReport check_compatibility_order1(const ProblemSpec& spec, double tolerance = 1e-6);

}  // namespace pmaflow
