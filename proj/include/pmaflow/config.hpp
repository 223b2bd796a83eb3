#pragma once

#include <array>
#include <optional>

#include "json.hpp"
#include "pmaflow/problem.hpp"

namespace pmaflow {

using ordered_json = nlohmann::ordered_json;

struct CeConfig {
    double A0 = 1.0;
    double h = 1.0 / 200.0;
    int max_doublings = 20;
    int bisect_iters = 30;
    std::vector<double> amplitudes;  // empty = {1, 10, 100}
};

struct LegendreConfig {
    int t_index = -1;  // -1 = last snapshot
    std::optional<std::array<double, 4>> box;  // [ax, ay, bx, by]
    std::optional<double> spacing;
};

struct Tolerances {
    double comparison = 1e-12;
    double condition = 1e-8;
    double compatibility = 1e-6;
};

struct HolderConfig {
    double alpha = 1.0;
    int64_t pairs = 100000;
};

/// One fully resolved invocation. `resolved` is the canonical echo (defaults
/// filled, fixed key order); `hash` is the FNV-1a digest of its serialization
/// and is stamped into every output file.
struct RunConfig {
    std::string command;
    std::string problem_name;                   // builtin name, empty when inline
    std::optional<ordered_json> inline_problem; // raw inline object (validated)
    double h = 0.125;
    std::optional<double> T_override;
    std::optional<double> gamma_override;
    std::vector<double> output_times;  // empty = {0, T/4, T/2, 3T/4, T}
    std::string out = "out";
    uint64_t seed = 1;
    double kappa = 10.0;
    double safety = 0.5;
    int stencil_width = 2;
    int density = 32;
    Tolerances tol;
    HolderConfig holder;
    CeConfig ce;
    LegendreConfig legendre;
    std::vector<double> h_list;  // empty = {1/8, 1/16, 1/32}

    ordered_json resolved;
    std::string hash;
};

/// Strict parse: unknown keys raise UnknownKey, malformed JSON raises
/// ParseError, out-of-range values raise RangeError.
RunConfig parse_config(const std::string& json_text);

/// Builds the problem the config names (builtin or inline expressions) and
/// applies the T/gamma overrides.
ProblemSpec materialize_problem(const RunConfig& cfg);

/// Fills `resolved` and `hash`; call after all overrides are applied.
void finalize_config(RunConfig& cfg);

}  // namespace pmaflow
