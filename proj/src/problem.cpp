#include "pmaflow/problem.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "pmaflow/counterexamples.hpp"
#include "pmaflow/ma_core.hpp"

namespace pmaflow {

ScalarField ScalarField::from_expr(const std::string& text) {
    auto compiled = std::make_shared<Expr>(Expr::parse(text));
    return {[compiled](double x, double y, double t) { return compiled->eval(x, y, t); }, text};
}

ScalarField ScalarField::native(std::string desc, std::function<double(double, double, double)> f) {
    return {std::move(f), std::move(desc)};
}

ScalarField ScalarField::zero() {
    return {[](double, double, double) { return 0.0; }, "0"};
}

std::string kind_name(EquationKind k) {
    switch (k) {
        case EquationKind::pma: return "pma";
        case EquationKind::gcf: return "gcf";
        case EquationKind::heat_1d: return "heat_1d";
        case EquationKind::radial: return "radial";
    }
    return "?";
}

namespace {

ProblemSpec make_mms_quadratic() {
    ProblemSpec s;
    s.name = "mms_quadratic";
    s.kind = EquationKind::pma;
    s.domain = make_disk({0.0, 0.0}, 1.0);
    s.T = 1.0;
    s.c0 = 1.0;
    s.psi = ScalarField::native("builtin:mms_quadratic/psi", [](double x, double y, double t) {
        return (1.0 + t) * (1.0 + t) - 0.5 * (x * x + y * y);
    });
    s.phi = ScalarField::native("builtin:mms_quadratic/phi", [](double x, double y, double t) {
        return (1.0 + t) * 0.5 * (x * x + y * y);
    });
    s.exact = s.phi;
    s.exact.desc = "builtin:mms_quadratic/exact";
    return s;
}

ProblemSpec make_stationary_quadratic() {
    ProblemSpec s;
    s.name = "stationary_quadratic";
    s.kind = EquationKind::pma;
    s.domain = make_disk({0.0, 0.0}, 1.0);
    s.T = 1.0;
    s.c0 = 1.0;
    s.psi = ScalarField::native("builtin:stationary_quadratic/psi",
                                [](double, double, double) { return 1.0; });
    s.phi = ScalarField::native("builtin:stationary_quadratic/phi", [](double x, double y, double) {
        return 0.5 * (x * x + y * y);
    });
    s.exact = s.phi;
    s.exact.desc = "builtin:stationary_quadratic/exact";
    return s;
}

ProblemSpec make_gcf_quadratic_start() {
    ProblemSpec s;
    s.name = "gcf_quadratic_start";
    s.kind = EquationKind::gcf;
    s.gamma = 1.0;
    s.domain = make_disk({0.0, 0.0}, 1.0);
    s.T = 0.5;
    s.c0 = 0.5;
    s.phi = ScalarField::native("builtin:gcf_quadratic_start/phi", [](double x, double y, double t) {
        return 0.5 * (x * x + y * y) + 0.5 * t;
    });
    return s;
}

ProblemSpec make_ce_1d(double A, double B) {
    ProblemSpec s;
    s.name = "ce_1d";
    s.kind = EquationKind::heat_1d;
    s.dim = 1;
    s.T = 1.0;
    s.c0 = 1.0;
    s.bump = BumpParams{A, B};
    // Base v = (1+t) x^2 / 2 solves u_t = u_xx - psi_base with
    // psi_base = (1+t) - x^2/2; the bump adds rho = -w_t + w_xx.
    s.psi = ScalarField::native("builtin:ce_1d/psi", [A, B](double x, double, double t) {
        return (1.0 + t) - 0.5 * x * x + bump_rho(x, t, A, B);
    });
    s.phi = ScalarField::native("builtin:ce_1d/phi", [A, B](double x, double, double t) {
        return (1.0 + t) * 0.5 * x * x + bump_w(x, t, A, B);
    });
    s.exact = s.phi;
    s.exact.desc = "builtin:ce_1d/exact";
    return s;
}

ProblemSpec make_ce_radial(double A, double B) {
    ProblemSpec s;
    s.name = "ce_radial";
    s.kind = EquationKind::radial;
    s.dim = 2;
    s.T = 1.0;
    s.c0 = 1.0;
    s.bump = BumpParams{A, B};
    int n = s.dim;
    s.psi = ScalarField::native("builtin:ce_radial/psi", [A, B, n](double r, double, double t) {
        return radial_psi_eff(r, t, n, A, B);
    });
    s.phi = ScalarField::native("builtin:ce_radial/phi", [A, B](double r, double, double t) {
        return (1.0 + t) * 0.5 * r * r + bump_w(r, t, A, B);
    });
    s.exact = s.phi;
    s.exact.desc = "builtin:ce_radial/exact";
    return s;
}

}  // namespace

ProblemSpec builtin_problem(const std::string& name) {
    if (name == "mms_quadratic") return make_mms_quadratic();
    if (name == "stationary_quadratic") return make_stationary_quadratic();
    if (name == "gcf_quadratic_start") return make_gcf_quadratic_start();
    if (name == "ce_1d") return make_ce_1d(1.0, 1.0);
    if (name == "ce_radial") return make_ce_radial(1.0, 1.0);
    throw UnknownProblem("no built-in problem named '" + name + "'");
}

std::vector<std::string> builtin_problem_names() {
    return {"mms_quadratic", "stationary_quadratic", "gcf_quadratic_start", "ce_1d", "ce_radial"};
}

ProblemSpec with_amplitude(const ProblemSpec& spec, double A) {
    if (!spec.bump)
        throw ConfigError("problem '" + spec.name + "' has no bump amplitude to vary");
    double B = spec.bump->B;
    ProblemSpec out = spec.name == "ce_radial" ? make_ce_radial(A, B) : make_ce_1d(A, B);
    out.T = spec.T;
    out.c0 = spec.c0;
    return out;
}

namespace {
constexpr double kStepT = 1e-5;
constexpr double kStepXX = 5e-4;
}  // namespace

double fd_t(const ScalarField& f, Vec2 x, double t) {
    return (f(x.x, x.y, t + kStepT) - f(x.x, x.y, t - kStepT)) / (2.0 * kStepT);
}

Vec2 fd_gradient(const ScalarField& f, Vec2 x, double t) {
    return {(f(x.x + kStepT, x.y, t) - f(x.x - kStepT, x.y, t)) / (2.0 * kStepT),
            (f(x.x, x.y + kStepT, t) - f(x.x, x.y - kStepT, t)) / (2.0 * kStepT)};
}

Sym2 fd_hessian(const ScalarField& f, Vec2 x, double t) {
    const double h = kStepXX;
    double c = f(x.x, x.y, t);
    double xx = (f(x.x + h, x.y, t) - 2.0 * c + f(x.x - h, x.y, t)) / (h * h);
    double yy = (f(x.x, x.y + h, t) - 2.0 * c + f(x.x, x.y - h, t)) / (h * h);
    double xy = (f(x.x + h, x.y + h, t) - f(x.x + h, x.y - h, t) - f(x.x - h, x.y + h, t) +
                 f(x.x - h, x.y - h, t)) /
                (4.0 * h * h);
    return {xx, xy, yy};
}

namespace {

double fd_xx_1d(const ScalarField& f, double x, double t) {
    const double h = kStepXX;
    return (f(x + h, 0.0, t) - 2.0 * f(x, 0.0, t) + f(x - h, 0.0, t)) / (h * h);
}

double fd_x_1d(const ScalarField& f, double x, double t) {
    return (f(x + kStepT, 0.0, t) - f(x - kStepT, 0.0, t)) / (2.0 * kStepT);
}

void require_finite(double v, const char* what, double a, double b) {
    if (!std::isfinite(v))
        throw EvaluationError(std::string(what) + " is non-finite at sample (" +
                              format_double(a) + ", " + format_double(b) + ")");
}

/// Radial Hessian eigenvalues of a profile f(r): {f_rr, f_r / r}, with the
/// r -> 0 limit f_r/r -> f_rr.
std::pair<double, double> radial_eigs(const ScalarField& f, double r, double t) {
    double frr = fd_xx_1d(f, r, t);
    double slope = r > 1e-8 ? fd_x_1d(f, r, t) / r : frr;
    return {frr, slope};
}

}  // namespace

ConditionReport validate_conditions(const ProblemSpec& spec, int density, double tolerance) {
    if (density < 2) throw ConfigError("sample density must be at least 2");
    ConditionReport rep;
    rep.kind = spec.kind;
    rep.tolerance = tolerance;
    rep.density = density;
    ScalarField psi = spec.psi.empty() ? ScalarField::zero() : spec.psi;

    double p1 = std::numeric_limits<double>::infinity();
    double p2 = std::numeric_limits<double>::infinity();
    double p3 = -std::numeric_limits<double>::infinity();

    const bool planar = spec.kind == EquationKind::pma || spec.kind == EquationKind::gcf;
    if (planar) {
        if (!spec.domain) throw ConfigError("2-d problem needs a domain");
        const Domain& dom = *spec.domain;
        for (int ib = 0; ib < density; ++ib) {
            Vec2 xb = dom.boundary_point(2.0 * 3.14159265358979323846 * double(ib) / density);
            for (int it = 0; it <= density; ++it) {
                double t = spec.T * double(it) / density;
                double v = fd_t(spec.phi, xb, t) + psi(xb, t);
                require_finite(v, "phi_t + psi", xb.x, t);
                p1 = std::min(p1, v - spec.c0);
                ++rep.p1_samples;
            }
        }
        auto box = domain_bbox(dom);
        double sx = (box[1].x - box[0].x) / density;
        double sy = (box[1].y - box[0].y) / density;
        for (int j = 0; j <= density; ++j) {
            for (int i = 0; i <= density; ++i) {
                Vec2 x{box[0].x + sx * i, box[0].y + sy * j};
                if (!dom.contains(x)) continue;
                double eig0 = eig_min_of(fd_hessian(spec.phi, x, 0.0));
                require_finite(eig0, "D^2 phi", x.x, x.y);
                p2 = std::min(p2, eig0);
                for (int it = 0; it <= density; ++it) {
                    double t = spec.T * double(it) / density;
                    double eig = eig_max_of(fd_hessian(psi, x, t));
                    require_finite(eig, "D^2 psi", x.x, t);
                    p3 = std::max(p3, eig);
                }
                ++rep.p23_samples;
            }
        }
    } else {
        const bool radial = spec.kind == EquationKind::radial;
        for (int end = 0; end < 2; ++end) {
            double xb = double(end);
            if (radial && end == 0) continue;  // r = 0 is the axis, not a boundary
            for (int it = 0; it <= density; ++it) {
                double t = spec.T * double(it) / density;
                double phit = (spec.phi(xb, 0.0, t + kStepT) - spec.phi(xb, 0.0, t - kStepT)) /
                              (2.0 * kStepT);
                double v = phit + psi(xb, 0.0, t);
                require_finite(v, "phi_t + psi", xb, t);
                p1 = std::min(p1, v - spec.c0);
                ++rep.p1_samples;
            }
        }
        for (int i = 1; i < density; ++i) {
            double x = double(i) / density;
            double eig0;
            if (radial) {
                auto [frr, slope] = radial_eigs(spec.phi, x, 0.0);
                eig0 = std::min(frr, slope);
            } else {
                eig0 = fd_xx_1d(spec.phi, x, 0.0);
            }
            require_finite(eig0, "phi second derivative", x, 0.0);
            p2 = std::min(p2, eig0);
            for (int it = 0; it <= density; ++it) {
                double t = spec.T * double(it) / density;
                double eig;
                if (radial) {
                    auto [frr, slope] = radial_eigs(psi, x, t);
                    eig = std::max(frr, slope);
                } else {
                    eig = fd_xx_1d(psi, x, t);
                }
                require_finite(eig, "psi second derivative", x, t);
                p3 = std::max(p3, eig);
            }
            ++rep.p23_samples;
        }
    }

    rep.p1_margin = p1;
    rep.p2_min_eig = p2;
    rep.p3_max_violation = p3;
    rep.p1_pass = p1 >= -tolerance;
    rep.p2_pass = p2 >= tolerance;  // uniform convexity needs a strictly positive eigenvalue
    rep.p3_pass = p3 <= tolerance;
    rep.all_pass = rep.p1_pass && rep.p2_pass && rep.p3_pass;
    return rep;
}

CompatReport check_compatibility_order1(const ProblemSpec& spec, double tolerance) {
    CompatReport rep;
    rep.tolerance = tolerance;
    if (spec.kind == EquationKind::gcf) return rep;
    rep.applicable = true;
    ScalarField psi = spec.psi.empty() ? ScalarField::zero() : spec.psi;
    double worst = 0.0;
    if (spec.kind == EquationKind::pma) {
        if (!spec.domain) throw ConfigError("2-d problem needs a domain");
        const int nb = 64;
        for (int ib = 0; ib < nb; ++ib) {
            Vec2 xb = spec.domain->boundary_point(2.0 * 3.14159265358979323846 * double(ib) / nb);
            double r = -fd_t(spec.phi, xb, 0.0) + fd_hessian(spec.phi, xb, 0.0).det() -
                       psi(xb, 0.0);
            require_finite(r, "compatibility residual", xb.x, xb.y);
            worst = std::max(worst, std::fabs(r));
            ++rep.samples;
        }
    } else {
        for (int end = 0; end < 2; ++end) {
            double xb = double(end);
            if (spec.kind == EquationKind::radial && end == 0) continue;
            double phit =
                (spec.phi(xb, 0.0, kStepT) - spec.phi(xb, 0.0, -kStepT)) / (2.0 * kStepT);
            double second;
            if (spec.kind == EquationKind::radial) {
                auto [frr, slope] = radial_eigs(spec.phi, xb, 0.0);
                double op = frr;
                for (int k = 1; k < spec.dim; ++k) op *= slope;
                second = op;
            } else {
                second = fd_xx_1d(spec.phi, xb, 0.0);
            }
            double r = -phit + second - psi(xb, 0.0, 0.0);
            require_finite(r, "compatibility residual", xb, 0.0);
            worst = std::max(worst, std::fabs(r));
            ++rep.samples;
        }
    }
    rep.max_residual = worst;
    rep.pass = worst <= tolerance;
    return rep;
}

}  // namespace pmaflow
