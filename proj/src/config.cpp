#include "pmaflow/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "pmaflow/common.hpp"
#include "pmaflow/geometry.hpp"

namespace pmaflow {

namespace {

const std::set<std::string> kCommands = {"solve", "verify", "legendre",
                                         "counterexample", "convergence"};

void require_keys(const ordered_json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key()))
            throw UnknownKey("unknown key '" + it.key() + "' in " + where);
    }
}

double number_at(const ordered_json& obj, const std::string& key, double fallback,
                 const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number())
        throw ParseError(where + "." + key + " must be a number");
    return v.get<double>();
}

int64_t integer_at(const ordered_json& obj, const std::string& key, int64_t fallback,
                   const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer())
        throw ParseError(where + "." + key + " must be an integer");
    return v.get<int64_t>();
}

std::string string_at(const ordered_json& obj, const std::string& key,
                      const std::string& fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_string())
        throw ParseError(where + "." + key + " must be a string");
    return v.get<std::string>();
}

std::vector<double> number_list_at(const ordered_json& obj, const std::string& key,
                                   const std::string& where) {
    std::vector<double> out;
    if (!obj.contains(key)) return out;
    const auto& v = obj.at(key);
    if (!v.is_array())
        throw ParseError(where + "." + key + " must be an array of numbers");
    for (const auto& e : v) {
        if (!e.is_number())
            throw ParseError(where + "." + key + " must be an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

void check_positive(double v, const std::string& what) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw RangeError(what + " must be positive and finite");
}

void parse_problem_field(const ordered_json& v, RunConfig& cfg) {
    if (v.is_string()) {
        cfg.problem_name = v.get<std::string>();
        const auto names = builtin_problem_names();
        if (std::find(names.begin(), names.end(), cfg.problem_name) == names.end())
            throw RangeError("unknown builtin problem '" + cfg.problem_name + "'");
        return;
    }
    if (!v.is_object())
        throw ParseError("problem must be a builtin name or an object");

    require_keys(v, "problem",
                 {"name", "kind", "domain", "T", "c0", "gamma", "psi", "phi", "exact"});
    const std::string kind = string_at(v, "kind", "", "problem");
    if (kind != "pma" && kind != "gcf")
        throw RangeError("inline problems support kind 'pma' or 'gcf'; "
                         "interval problems are built in");
    if (!v.contains("phi") || !v.at("phi").is_string())
        throw ParseError("problem.phi must be an expression string");
    if (!v.contains("domain") || !v.at("domain").is_object())
        throw ParseError("problem.domain must be an object");

    const auto& dom = v.at("domain");
    require_keys(dom, "problem.domain", {"kind", "center", "radius", "Q"});
    const std::string dkind = string_at(dom, "kind", "", "problem.domain");
    auto center = number_list_at(dom, "center", "problem.domain");
    if (dom.contains("center") && center.size() != 2)
        throw ParseError("problem.domain.center must be [x, y]");
    if (dkind == "disk") {
        check_positive(number_at(dom, "radius", 1.0, "problem.domain"), "domain radius");
        if (dom.contains("Q"))
            throw UnknownKey("unknown key 'Q' in problem.domain of kind disk");
    } else if (dkind == "ellipse") {
        auto q = number_list_at(dom, "Q", "problem.domain");
        if (q.size() != 3)
            throw ParseError("problem.domain.Q must be [qxx, qxy, qyy]");
        Sym2 Q{q[0], q[1], q[2]};
        if (!(Q.det() > 0.0) || !(Q.xx > 0.0))
            throw RangeError("domain Q must be positive definite");
        if (dom.contains("radius"))
            throw UnknownKey("unknown key 'radius' in problem.domain of kind ellipse");
    } else {
        throw RangeError("domain kind must be 'disk' or 'ellipse'");
    }

    const double T = number_at(v, "T", 1.0, "problem");
    check_positive(T, "problem.T");
    const double c0 = number_at(v, "c0", 1.0, "problem");
    check_positive(c0, "problem.c0");
    const double g = number_at(v, "gamma", 1.0, "problem");
    if (!(g > 0.0) || g > 1.0)
        throw RangeError("problem.gamma must lie in (0, 1]");
    for (const char* key : {"psi", "exact", "name"}) {
        if (v.contains(key) && !v.at(key).is_string())
            throw ParseError(std::string("problem.") + key + " must be a string");
    }

    cfg.inline_problem = v;
}

ordered_json problem_echo(const RunConfig& cfg) {
    if (!cfg.inline_problem) return ordered_json(cfg.problem_name);
    const auto& p = *cfg.inline_problem;
    ordered_json e;
    e["name"] = string_at(p, "name", "inline", "problem");
    e["kind"] = p.at("kind");
    ordered_json d;
    const auto& dom = p.at("domain");
    d["kind"] = dom.at("kind");
    auto center = number_list_at(dom, "center", "problem.domain");
    if (center.empty()) center = {0.0, 0.0};
    d["center"] = center;
    if (dom.at("kind") == "disk")
        d["radius"] = number_at(dom, "radius", 1.0, "problem.domain");
    else
        d["Q"] = dom.at("Q");
    e["domain"] = d;
    e["T"] = number_at(p, "T", 1.0, "problem");
    e["c0"] = number_at(p, "c0", 1.0, "problem");
    e["gamma"] = number_at(p, "gamma", 1.0, "problem");
    e["phi"] = p.at("phi");
    e["psi"] = string_at(p, "psi", "", "problem");
    e["exact"] = string_at(p, "exact", "", "problem");
    return e;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("config must be a JSON object");

    require_keys(j, "config",
                 {"command", "problem", "h", "T", "gamma", "output_times", "out",
                  "seed", "kappa", "safety", "stencil_width", "density",
                  "tolerances", "holder", "counterexample", "legendre", "h_list"});

    RunConfig cfg;
    cfg.command = string_at(j, "command", "", "config");
    if (!cfg.command.empty() && !kCommands.count(cfg.command))
        throw RangeError("unknown command '" + cfg.command + "'");

    if (j.contains("problem")) parse_problem_field(j.at("problem"), cfg);

    cfg.h = number_at(j, "h", cfg.h, "config");
    if (!(cfg.h > 0.0) || cfg.h > 0.5)
        throw RangeError("h must lie in (0, 0.5]");
    if (j.contains("T")) {
        const double T = number_at(j, "T", 1.0, "config");
        check_positive(T, "T");
        cfg.T_override = T;
    }
    if (j.contains("gamma")) {
        const double g = number_at(j, "gamma", 1.0, "config");
        if (!(g > 0.0) || g > 1.0) throw RangeError("gamma must lie in (0, 1]");
        cfg.gamma_override = g;
    }
    cfg.output_times = number_list_at(j, "output_times", "config");
    for (double t : cfg.output_times)
        if (!std::isfinite(t) || t < 0.0)
            throw RangeError("output_times entries must be finite and nonnegative");
    cfg.out = string_at(j, "out", cfg.out, "config");
    const int64_t seed = integer_at(j, "seed", static_cast<int64_t>(cfg.seed), "config");
    if (seed < 0) throw RangeError("seed must be nonnegative");
    cfg.seed = static_cast<uint64_t>(seed);
    cfg.kappa = number_at(j, "kappa", cfg.kappa, "config");
    check_positive(cfg.kappa, "kappa");
    cfg.safety = number_at(j, "safety", cfg.safety, "config");
    if (!(cfg.safety > 0.0) || cfg.safety > 1.0)
        throw RangeError("safety must lie in (0, 1]");
    cfg.stencil_width = static_cast<int>(integer_at(j, "stencil_width", 2, "config"));
    if (cfg.stencil_width != 1 && cfg.stencil_width != 2)
        throw RangeError("stencil_width must be 1 or 2");
    cfg.density = static_cast<int>(integer_at(j, "density", 32, "config"));
    if (cfg.density < 4 || cfg.density > 4096)
        throw RangeError("density must lie in [4, 4096]");

    if (j.contains("tolerances")) {
        const auto& t = j.at("tolerances");
        if (!t.is_object()) throw ParseError("tolerances must be an object");
        require_keys(t, "tolerances", {"comparison", "condition", "compatibility"});
        cfg.tol.comparison = number_at(t, "comparison", cfg.tol.comparison, "tolerances");
        cfg.tol.condition = number_at(t, "condition", cfg.tol.condition, "tolerances");
        cfg.tol.compatibility =
            number_at(t, "compatibility", cfg.tol.compatibility, "tolerances");
        check_positive(cfg.tol.comparison, "tolerances.comparison");
        check_positive(cfg.tol.condition, "tolerances.condition");
        check_positive(cfg.tol.compatibility, "tolerances.compatibility");
    }

    if (j.contains("holder")) {
        const auto& hj = j.at("holder");
        if (!hj.is_object()) throw ParseError("holder must be an object");
        require_keys(hj, "holder", {"alpha", "pairs"});
        cfg.holder.alpha = number_at(hj, "alpha", cfg.holder.alpha, "holder");
        if (!(cfg.holder.alpha > 0.0) || cfg.holder.alpha > 2.0)
            throw RangeError("holder.alpha must lie in (0, 2]");
        cfg.holder.pairs = integer_at(hj, "pairs", cfg.holder.pairs, "holder");
        if (cfg.holder.pairs < 1 || cfg.holder.pairs > 10000000)
            throw RangeError("holder.pairs must lie in [1, 1e7]");
    }

    if (j.contains("counterexample")) {
        const auto& c = j.at("counterexample");
        if (!c.is_object()) throw ParseError("counterexample must be an object");
        require_keys(c, "counterexample",
                     {"A0", "h", "max_doublings", "bisect_iters", "amplitudes"});
        cfg.ce.A0 = number_at(c, "A0", cfg.ce.A0, "counterexample");
        check_positive(cfg.ce.A0, "counterexample.A0");
        cfg.ce.h = number_at(c, "h", cfg.ce.h, "counterexample");
        if (!(cfg.ce.h > 0.0) || cfg.ce.h > 0.5)
            throw RangeError("counterexample.h must lie in (0, 0.5]");
        cfg.ce.max_doublings = static_cast<int>(
            integer_at(c, "max_doublings", cfg.ce.max_doublings, "counterexample"));
        if (cfg.ce.max_doublings < 1 || cfg.ce.max_doublings > 60)
            throw RangeError("counterexample.max_doublings must lie in [1, 60]");
        cfg.ce.bisect_iters = static_cast<int>(
            integer_at(c, "bisect_iters", cfg.ce.bisect_iters, "counterexample"));
        if (cfg.ce.bisect_iters < 0 || cfg.ce.bisect_iters > 200)
            throw RangeError("counterexample.bisect_iters must lie in [0, 200]");
        cfg.ce.amplitudes = number_list_at(c, "amplitudes", "counterexample");
        for (double a : cfg.ce.amplitudes) check_positive(a, "counterexample amplitude");
    }

    if (j.contains("legendre")) {
        const auto& l = j.at("legendre");
        if (!l.is_object()) throw ParseError("legendre must be an object");
        require_keys(l, "legendre", {"t_index", "box", "spacing"});
        cfg.legendre.t_index =
            static_cast<int>(integer_at(l, "t_index", -1, "legendre"));
        if (cfg.legendre.t_index < -1)
            throw RangeError("legendre.t_index must be -1 or a snapshot index");
        if (l.contains("box")) {
            auto b = number_list_at(l, "box", "legendre");
            if (b.size() != 4)
                throw ParseError("legendre.box must be [ax, ay, bx, by]");
            if (!(b[2] > b[0]) || !(b[3] > b[1]))
                throw RangeError("legendre.box must have positive extent");
            cfg.legendre.box = std::array<double, 4>{b[0], b[1], b[2], b[3]};
        }
        if (l.contains("spacing")) {
            const double s = number_at(l, "spacing", 0.0, "legendre");
            check_positive(s, "legendre.spacing");
            cfg.legendre.spacing = s;
        }
        if (cfg.legendre.box.has_value() != cfg.legendre.spacing.has_value())
            throw RangeError("legendre.box and legendre.spacing go together");
    }

    cfg.h_list = number_list_at(j, "h_list", "config");
    for (double hv : cfg.h_list)
        if (!(hv > 0.0) || hv > 0.5)
            throw RangeError("h_list entries must lie in (0, 0.5]");

    return cfg;
}

ProblemSpec materialize_problem(const RunConfig& cfg) {
    ProblemSpec spec;
    if (cfg.inline_problem) {
        const auto& p = *cfg.inline_problem;
        spec.name = string_at(p, "name", "inline", "problem");
        spec.kind = p.at("kind") == "gcf" ? EquationKind::gcf : EquationKind::pma;
        spec.gamma = number_at(p, "gamma", 1.0, "problem");
        const auto& dom = p.at("domain");
        auto cl = number_list_at(dom, "center", "problem.domain");
        Vec2 center = cl.empty() ? Vec2{0.0, 0.0} : Vec2{cl[0], cl[1]};
        if (dom.at("kind") == "disk") {
            spec.domain = make_disk(center, number_at(dom, "radius", 1.0, "problem.domain"));
        } else {
            auto q = number_list_at(dom, "Q", "problem.domain");
            spec.domain = make_ellipse(center, Sym2{q[0], q[1], q[2]});
        }
        spec.T = number_at(p, "T", 1.0, "problem");
        spec.c0 = number_at(p, "c0", 1.0, "problem");
        spec.phi = ScalarField::from_expr(p.at("phi").get<std::string>());
        const std::string psi = string_at(p, "psi", "", "problem");
        spec.psi = psi.empty() ? ScalarField::zero() : ScalarField::from_expr(psi);
        const std::string exact = string_at(p, "exact", "", "problem");
        if (!exact.empty()) spec.exact = ScalarField::from_expr(exact);
    } else {
        if (cfg.problem_name.empty())
            throw ConfigError("a problem is required (builtin name or inline object)");
        spec = builtin_problem(cfg.problem_name);
    }
    if (cfg.T_override) spec.T = *cfg.T_override;
    if (cfg.gamma_override) spec.gamma = *cfg.gamma_override;
    return spec;
}

void finalize_config(RunConfig& cfg) {
    if (cfg.command.empty()) throw ConfigError("a command is required");
    const ProblemSpec spec = materialize_problem(cfg);
    if (cfg.output_times.empty()) {
        for (int k = 0; k <= 4; ++k)
            cfg.output_times.push_back(spec.T * static_cast<double>(k) / 4.0);
    }
    if (cfg.h_list.empty()) cfg.h_list = {1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0};
    if (cfg.ce.amplitudes.empty()) cfg.ce.amplitudes = {1.0, 10.0, 100.0};

    ordered_json r;
    r["command"] = cfg.command;
    r["problem"] = problem_echo(cfg);
    r["h"] = cfg.h;
    r["T"] = spec.T;
    r["gamma"] = spec.gamma;
    r["output_times"] = cfg.output_times;
    r["out"] = cfg.out;
    r["seed"] = cfg.seed;
    r["kappa"] = cfg.kappa;
    r["safety"] = cfg.safety;
    r["stencil_width"] = cfg.stencil_width;
    r["density"] = cfg.density;
    r["tolerances"] = {{"comparison", cfg.tol.comparison},
                       {"condition", cfg.tol.condition},
                       {"compatibility", cfg.tol.compatibility}};
    r["holder"] = {{"alpha", cfg.holder.alpha}, {"pairs", cfg.holder.pairs}};
    {
        ordered_json c;
        c["A0"] = cfg.ce.A0;
        c["h"] = cfg.ce.h;
        c["max_doublings"] = cfg.ce.max_doublings;
        c["bisect_iters"] = cfg.ce.bisect_iters;
        c["amplitudes"] = cfg.ce.amplitudes;
        r["counterexample"] = c;
    }
    {
        ordered_json l;
        l["t_index"] = cfg.legendre.t_index;
        if (cfg.legendre.box) {
            l["box"] = std::vector<double>(cfg.legendre.box->begin(),
                                           cfg.legendre.box->end());
            l["spacing"] = *cfg.legendre.spacing;
        }
        r["legendre"] = l;
    }
    r["h_list"] = cfg.h_list;

    cfg.resolved = r;
    cfg.hash = hash_hex(r.dump());
}

}  // namespace pmaflow
