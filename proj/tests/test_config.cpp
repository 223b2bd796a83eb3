#include "doctest.h"
#include "pmaflow/config.hpp"

using namespace pmaflow;

namespace {

const char* kInline = R"({
  "command": "solve",
  "problem": {
    "name": "custom",
    "kind": "pma",
    "domain": {"kind": "disk", "center": [0, 0], "radius": 1},
    "T": 1,
    "c0": 1,
    "phi": "(1 + t) * (x^2 + y^2) / 2",
    "psi": "(1 + t)^2 - (x^2 + y^2) / 2",
    "exact": "(1 + t) * (x^2 + y^2) / 2"
  },
  "h": 0.25
})";

}  // namespace

TEST_CASE("defaults survive an empty config") {
    RunConfig cfg = parse_config("{}");
    CHECK(cfg.command.empty());
    CHECK(cfg.problem_name.empty());
    CHECK(!cfg.inline_problem);
    CHECK(cfg.h == 0.125);
    CHECK(!cfg.T_override);
    CHECK(!cfg.gamma_override);
    CHECK(cfg.out == "out");
    CHECK(cfg.seed == 1);
    CHECK(cfg.kappa == 10.0);
    CHECK(cfg.safety == 0.5);
    CHECK(cfg.stencil_width == 2);
    CHECK(cfg.density == 32);
    CHECK(cfg.tol.comparison == 1e-12);
    CHECK(cfg.tol.condition == 1e-8);
    CHECK(cfg.tol.compatibility == 1e-6);
    CHECK(cfg.holder.alpha == 1.0);
    CHECK(cfg.holder.pairs == 100000);
    CHECK(cfg.ce.A0 == 1.0);
    CHECK(cfg.ce.h == 1.0 / 200.0);
    CHECK(cfg.ce.max_doublings == 20);
    CHECK(cfg.ce.bisect_iters == 30);
    CHECK(cfg.ce.amplitudes.empty());
    CHECK(cfg.legendre.t_index == -1);
    CHECK(!cfg.legendre.box);
    CHECK(!cfg.legendre.spacing);
    CHECK(cfg.h_list.empty());
}

TEST_CASE("unknown keys are named in the complaint") {
    CHECK_THROWS_AS(parse_config(R"({"comand": "solve"})"), UnknownKey);
    CHECK_THROWS_AS(parse_config(R"({"tolerances": {"compare": 1e-9}})"), UnknownKey);
    CHECK_THROWS_AS(parse_config(R"({"holder": {"alpha": 1, "count": 5}})"), UnknownKey);
    CHECK_THROWS_AS(parse_config(R"({"counterexample": {"A_0": 1}})"), UnknownKey);
    CHECK_THROWS_AS(parse_config(R"({"legendre": {"index": 0}})"), UnknownKey);
    CHECK_THROWS_AS(
        parse_config(
            R"({"problem": {"kind": "pma", "title": "x",
                "domain": {"kind": "disk"}, "phi": "x"}})"),
        UnknownKey);
    CHECK_THROWS_AS(
        parse_config(
            R"({"problem": {"kind": "pma",
                "domain": {"kind": "disk", "extra": 1}, "phi": "x"}})"),
        UnknownKey);
    CHECK_THROWS_AS(
        parse_config(
            R"({"problem": {"kind": "pma",
                "domain": {"kind": "disk", "Q": [1, 0, 1]}, "phi": "x"}})"),
        UnknownKey);

    try {
        parse_config(R"({"comand": "solve"})");
    } catch (const UnknownKey& e) {
        CHECK(std::string(e.what()).find("comand") != std::string::npos);
    }
}

TEST_CASE("malformed documents raise parse errors") {
    CHECK_THROWS_AS(parse_config("{"), ParseError);
    CHECK_THROWS_AS(parse_config("[1, 2]"), ParseError);
    CHECK_THROWS_AS(parse_config(R"({"h": "small"})"), ParseError);
    CHECK_THROWS_AS(parse_config(R"({"seed": 1.5})"), ParseError);
    CHECK_THROWS_AS(parse_config(R"({"output_times": [0.1, "x"]})"), ParseError);
    CHECK_THROWS_AS(parse_config(R"({"output_times": 0.5})"), ParseError);
    CHECK_THROWS_AS(parse_config(R"({"tolerances": 7})"), ParseError);
    CHECK_THROWS_AS(parse_config(R"({"problem": 12})"), ParseError);
    CHECK_THROWS_AS(
        parse_config(R"({"problem": {"kind": "pma", "domain": {"kind": "disk"}}})"),
        ParseError);
    CHECK_THROWS_AS(
        parse_config(
            R"({"problem": {"kind": "pma", "domain": {"kind": "disk",
                "center": [1]}, "phi": "x"}})"),
        ParseError);
    CHECK_THROWS_AS(
        parse_config(
            R"({"problem": {"kind": "pma", "domain": {"kind": "ellipse",
                "Q": [1, 0]}, "phi": "x"}})"),
        ParseError);
    CHECK_THROWS_AS(parse_config(R"({"legendre": {"box": [0, 0, 1]}})"), ParseError);
}

TEST_CASE("out-of-range values raise range errors") {
    CHECK_THROWS_AS(parse_config(R"({"command": "run"})"), RangeError);
    CHECK_THROWS_AS(parse_config(R"({"problem": "mms_qudratic"})"), RangeError);
    CHECK_THROWS_AS(parse_config(R"({"h": 0.7})"), RangeError);
    CHECK_THROWS_AS(parse_config(R"({"h": 0})"), RangeError);
    CHECK_THROWS_AS(parse_config(R"({"T": -1})"), RangeError);
    CHECK_THROWS_AS(parse_config(R"({"gamma": 2})"), RangeError);
    CHECK_THROWS_AS(parse_config(R"({"gamma": 0})"), RangeError);
    CHECK_THROWS_AS(parse_config(R"({"safety": 0})"), RangeError);
    CHECK_THROWS_AS(parse_config(R"({"safety": 1.5})"), RangeError);
    CHECK_THROWS_AS(parse_config(R"({"seed": -1})"), RangeError);
    CHECK_THROWS_AS(parse_config(R"({"kappa": 0})"), RangeError);
    CHECK_THROWS_AS(parse_config(R"({"stencil_width": 3})"), RangeError);
    CHECK_THROWS_AS(parse_config(R"({"density": 2})"), RangeError);
    CHECK_THROWS_AS(parse_config(R"({"output_times": [-0.5]})"), RangeError);
    CHECK_THROWS_AS(parse_config(R"({"h_list": [0.9]})"), RangeError);
    CHECK_THROWS_AS(parse_config(R"({"tolerances": {"comparison": 0}})"), RangeError);
    CHECK_THROWS_AS(parse_config(R"({"holder": {"alpha": 3}})"), RangeError);
    CHECK_THROWS_AS(parse_config(R"({"holder": {"pairs": 0}})"), RangeError);
    CHECK_THROWS_AS(parse_config(R"({"counterexample": {"A0": 0}})"), RangeError);
    CHECK_THROWS_AS(parse_config(R"({"counterexample": {"max_doublings": 0}})"), RangeError);
    CHECK_THROWS_AS(parse_config(R"({"counterexample": {"bisect_iters": -1}})"), RangeError);
    CHECK_THROWS_AS(parse_config(R"({"legendre": {"t_index": -2}})"), RangeError);
    CHECK_THROWS_AS(parse_config(R"({"legendre": {"box": [0, 0, 1, 1]}})"), RangeError);
    CHECK_THROWS_AS(parse_config(R"({"legendre": {"spacing": 0.1}})"), RangeError);
    CHECK_THROWS_AS(parse_config(R"({"legendre": {"box": [0, 0, -1, 1],
                                                  "spacing": 0.1}})"),
                    RangeError);
    CHECK_THROWS_AS(
        parse_config(
            R"({"problem": {"kind": "heat", "domain": {"kind": "disk"}, "phi": "x"}})"),
        RangeError);
    CHECK_THROWS_AS(
        parse_config(
            R"({"problem": {"kind": "pma", "domain": {"kind": "square"}, "phi": "x"}})"),
        RangeError);
    CHECK_THROWS_AS(
        parse_config(
            R"({"problem": {"kind": "pma", "gamma": 1.5,
                "domain": {"kind": "disk"}, "phi": "x"}})"),
        RangeError);
    CHECK_THROWS_AS(
        parse_config(
            R"({"problem": {"kind": "pma", "domain": {"kind": "ellipse",
                "Q": [1, 3, 1]}, "phi": "x"}})"),
        RangeError);
}

TEST_CASE("inline problems materialize through the expression parser") {
    RunConfig cfg = parse_config(kInline);
    REQUIRE(cfg.inline_problem.has_value());
    ProblemSpec spec = materialize_problem(cfg);
    CHECK(spec.name == "custom");
    CHECK(spec.kind == EquationKind::pma);
    CHECK(spec.T == 1.0);
    CHECK(spec.c0 == 1.0);
    REQUIRE(spec.domain.has_value());
    CHECK(spec.phi(0.3, 0.4, 1.0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(spec.psi(0.0, 0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(!spec.exact.empty());
    CHECK(spec.exact(0.3, 0.4, 1.0) == doctest::Approx(0.25).epsilon(1e-15));

    CHECK_THROWS_AS(
        materialize_problem(parse_config(
            R"({"problem": {"kind": "pma", "domain": {"kind": "disk"},
                "phi": "x + * y"}})")),
        EvaluationError);
}

TEST_CASE("builtin problems accept overrides") {
    RunConfig cfg = parse_config(R"({"command": "solve", "problem": "mms_quadratic",
                                     "T": 0.5, "gamma": 0.5})");
    ProblemSpec spec = materialize_problem(cfg);
    CHECK(spec.name == "mms_quadratic");
    CHECK(spec.T == 0.5);
    CHECK(spec.gamma == 0.5);

    finalize_config(cfg);
    REQUIRE(cfg.output_times.size() == 5);
    CHECK(cfg.output_times[0] == 0.0);
    CHECK(cfg.output_times[2] == 0.25);
    CHECK(cfg.output_times[4] == 0.5);
    REQUIRE(cfg.h_list.size() == 3);
    CHECK(cfg.h_list[1] == 1.0 / 16.0);
    REQUIRE(cfg.ce.amplitudes.size() == 3);
    CHECK(cfg.ce.amplitudes[2] == 100.0);

    RunConfig bare = parse_config(R"({"problem": "mms_quadratic"})");
    CHECK_THROWS_AS(finalize_config(bare), ConfigError);
    RunConfig no_problem = parse_config(R"({"command": "solve"})");
    CHECK_THROWS_AS(finalize_config(no_problem), ConfigError);
}

TEST_CASE("the resolved echo and its hash are stable") {
    const std::string text = R"({"command": "verify", "problem": "stationary_quadratic",
                                 "h": 0.25, "seed": 7})";
    RunConfig a = parse_config(text);
    finalize_config(a);
    RunConfig b = parse_config(text);
    finalize_config(b);
    CHECK(a.hash == b.hash);
    CHECK(a.hash.size() == 16);
    CHECK(a.hash.find_first_not_of("0123456789abcdef") == std::string::npos);
    CHECK(a.resolved == b.resolved);

    RunConfig c = parse_config(R"({"command": "verify", "problem": "stationary_quadratic",
                                   "h": 0.25, "seed": 8})");
    finalize_config(c);
    CHECK(c.hash != a.hash);

    const auto& r = a.resolved;
    for (const char* key :
         {"command", "problem", "h", "T", "gamma", "output_times", "out", "seed", "kappa",
          "safety", "stencil_width", "density", "tolerances", "holder", "counterexample",
          "legendre", "h_list"})
        CHECK(r.contains(key));
    CHECK(r.at("problem") == "stationary_quadratic");
    CHECK(r.at("T") == 1.0);

    RunConfig inl = parse_config(kInline);
    finalize_config(inl);
    CHECK(inl.resolved.at("problem").is_object());
    CHECK(inl.resolved.at("problem").at("name") == "custom");
    CHECK(inl.resolved.at("problem").at("domain").at("radius") == 1.0);
}
