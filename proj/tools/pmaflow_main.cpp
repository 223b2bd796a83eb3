#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "CLI11.hpp"
#include "pmaflow/runner.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw pmaflow::ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    using namespace pmaflow;

    CLI::App app{"explicit monotone solver and estimate checks for the parabolic "
                 "Monge-Ampere flow and the Gauss curvature flow"};
    app.set_help_flag("--help", "print help and exit");
    app.require_subcommand(1);

    std::string config_path;
    std::string problem;
    std::string out;
    double h = 0.0;
    double T = 0.0;
    double gamma = 0.0;
    uint64_t seed = 0;

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"solve", "march a problem to its horizon and write snapshots"},
        {"verify", "solve, then check the data conditions and a priori estimates"},
        {"legendre", "conjugate a snapshot and report dual Hessian statistics"},
        {"counterexample", "search for the amplitude where spatial convexity fails"},
        {"convergence", "errors against the exact solution over a mesh sequence"},
    };
    for (const auto& [name, desc] : commands) {
        auto* sub = app.add_subcommand(name, desc);
        sub->set_help_flag("--help", "print help and exit");
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--out", out, "output directory (default: out)");
        sub->add_option("--h", h, "grid spacing");
        sub->add_option("--T", T, "time horizon override");
        sub->add_option("--seed", seed, "sampling seed");
        sub->add_option("--problem", problem, "builtin problem name");
        sub->add_option("--gamma", gamma, "curvature flow exponent");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    CLI::App* sub = app.get_subcommands().front();

    RunConfig cfg;
    std::string out_dir = sub->count("--out") ? out : cfg.out;
    try {
        if (sub->count("--config")) cfg = parse_config(read_file(config_path));
        if (!cfg.command.empty() && cfg.command != sub->get_name())
            throw ConfigError("config names command '" + cfg.command +
                              "' but the subcommand is '" + sub->get_name() + "'");
        cfg.command = sub->get_name();
        if (sub->count("--problem")) {
            const auto names = builtin_problem_names();
            if (std::find(names.begin(), names.end(), problem) == names.end())
                throw RangeError("unknown builtin problem '" + problem + "'");
            cfg.problem_name = problem;
            cfg.inline_problem.reset();
        }
        if (sub->count("--out")) cfg.out = out;
        if (sub->count("--h")) {
            if (!(h > 0.0) || h > 0.5) throw RangeError("h must lie in (0, 0.5]");
            cfg.h = h;
        }
        if (sub->count("--T")) {
            if (!(T > 0.0)) throw RangeError("T must be positive");
            cfg.T_override = T;
        }
        if (sub->count("--gamma")) {
            if (!(gamma > 0.0) || gamma > 1.0)
                throw RangeError("gamma must lie in (0, 1]");
            cfg.gamma_override = gamma;
        }
        if (sub->count("--seed")) cfg.seed = seed;
        out_dir = cfg.out;
        finalize_config(cfg);
        return run_command(cfg);
    } catch (const ConfigError& e) {
        std::cerr << error_name(e) << ": " << e.what() << "\n";
        write_failure_report(out_dir, cfg.hash, e);
        return 2;
    } catch (const Error& e) {
        std::cerr << error_name(e) << ": " << e.what() << "\n";
        write_failure_report(out_dir, cfg.hash, e);
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
