#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pmaflow/counterexamples.hpp"
#include "pmaflow/harness.hpp"
#include "pmaflow/runner.hpp"

namespace py = pybind11;

namespace {

py::dict condition_dict(const pmaflow::ConditionReport& r) {
    py::dict d;
    d["kind"] = pmaflow::kind_name(r.kind);
    d["tolerance"] = r.tolerance;
    d["density"] = r.density;
    d["p1_margin"] = r.p1_margin;
    d["p2_min_eig"] = r.p2_min_eig;
    d["p3_max_violation"] = r.p3_max_violation;
    d["p1_pass"] = r.p1_pass;
    d["p2_pass"] = r.p2_pass;
    d["p3_pass"] = r.p3_pass;
    d["all_pass"] = r.all_pass;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    using namespace pmaflow;

    m.doc() = "Explicit monotone solver and estimate checks for the parabolic "
              "Monge-Ampere flow; closed-form pieces of the convexity-loss "
              "construction are exposed for scripting.";

    m.def("version", [] { return std::string("0.1.0"); });

    m.def("builtin_problems", &builtin_problem_names,
          "Names accepted by grid_info, validate, and the run config.");

    m.def("p6", &p6, py::arg("x"), py::arg("B"),
          "Degree-six polynomial factor of the bump's second derivative.");
    m.def("bump_w", &bump_w, py::arg("x"), py::arg("t"), py::arg("A"), py::arg("B"));
    m.def("bump_w_t", &bump_w_t, py::arg("x"), py::arg("A"), py::arg("B"));
    m.def("bump_w_dx", &bump_w_dx, py::arg("k"), py::arg("x"), py::arg("t"),
          py::arg("A"), py::arg("B"),
          "k-th x-derivative of the bump, k = 0..4, in closed form.");
    m.def("bump_rho", &bump_rho, py::arg("x"), py::arg("t"), py::arg("A"), py::arg("B"),
          "Source perturbation -w_t + w_xx generated by the bump.");
    m.def("radial_psi_eff", &radial_psi_eff, py::arg("r"), py::arg("t"), py::arg("n"),
          py::arg("A"), py::arg("B"),
          "Radial source that makes v + w solve the n-dimensional problem.");

    m.def(
        "eig_2x2",
        [](double xx, double xy, double yy) { return eig_2x2(Sym2{xx, xy, yy}); },
        py::arg("xx"), py::arg("xy"), py::arg("yy"),
        "Ascending eigenvalues of the symmetric matrix [[xx, xy], [xy, yy]].");

    m.def(
        "conjugate_1d",
        [](const std::vector<double>& xs, const std::vector<double>& us,
           const std::vector<double>& ys) {
            const Conjugate1D c = conjugate_1d(xs, us, ys);
            return py::make_tuple(c.U, c.arg);
        },
        py::arg("xs"), py::arg("us"), py::arg("ys"),
        "Discrete convex conjugate over explicit nodes: (values, argmax indices).");

    m.def(
        "grid_info",
        [](const std::string& problem, double h) {
            const ProblemSpec spec = builtin_problem(problem);
            if (!spec.domain)
                throw ConfigError("problem '" + problem + "' has no planar domain");
            const auto grid = build_grid(*spec.domain, h);
            py::dict d;
            d["h"] = grid->h;
            d["n_interior"] = grid->n_interior();
            d["n_boundary"] = grid->n_boundary();
            return d;
        },
        py::arg("problem"), py::arg("h"));

    m.def(
        "validate",
        [](const std::string& problem) {
            return condition_dict(validate_conditions(builtin_problem(problem)));
        },
        py::arg("problem"), "Margins of the data conditions for a builtin problem.");

    m.def(
        "run",
        [](const std::string& config_json) {
            RunConfig cfg = parse_config(config_json);
            finalize_config(cfg);
            const int code = run_command(cfg);
            py::dict d;
            d["exit_code"] = code;
            d["config_hash"] = cfg.hash;
            d["out"] = cfg.out;
            return d;
        },
        py::arg("config_json"),
        "Executes a JSON config exactly like the command-line tool.");
}
