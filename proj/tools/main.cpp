#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "patrol/commands.hpp"
#include "patrol/oracle.hpp"
#include "patrol/policies.hpp"

namespace {

struct Flags {
    std::string config;
    std::optional<int> h;
    std::optional<std::string> policy;
    std::optional<int> runs;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
};

void add_flags(CLI::App* cmd, Flags& f) {
    cmd->set_help_flag("--help", "print this help message and exit");
    cmd->add_option("--config", f.config, "JSON config file (defaults apply when omitted)");
    cmd->add_option("--h", f.h, "scaling parameter h");
    cmd->add_option("--policy", f.policy, "index, mai, greedy or random");
    cmd->add_option("--runs", f.runs, "Monte Carlo runs");
    cmd->add_option("--seed", f.seed, "instance seed");
    cmd->add_option("--out", f.out, "output directory");
}

patrol::ExperimentConfig resolve(const Flags& f) {
    patrol::ExperimentConfig cfg = f.config.empty() ? patrol::parse_config(nlohmann::json::object())
                                                    : patrol::load_config(f.config);
    if (f.seed) cfg.seed = *f.seed;
    if (f.out) cfg.out_dir = *f.out;
    if (f.runs) {
        if (*f.runs < 2) throw patrol::ConfigError("--runs must be at least 2");
        cfg.runs = *f.runs;
    }
    if (f.h) {
        if (*f.h < 1) throw patrol::ConfigError("--h must be positive");
        cfg.h_list = {*f.h};
    }
    if (f.policy) {
        try {
            cfg.policies = {patrol::parse_policy(*f.policy)};
        } catch (const std::invalid_argument& e) {
            throw patrol::ConfigError(e.what());
        }
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Patrol index policies: relaxation bound, indices and scaled-system simulation"};
    app.require_subcommand(1);
    Flags flags;
    CLI::App* solve = app.add_subcommand("solve", "maximize the dual and write dual.json and indices.json");
    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo runs of one policy at one h");
    CLI::App* sweep = app.add_subcommand("sweep", "deviation dataset over instance draws, h values and policies");
    CLI::App* oracle = app.add_subcommand("oracle", "lower bound / exact optimum / MAI sandwich on tiny instances");
    for (CLI::App* cmd : {solve, simulate, sweep, oracle}) add_flags(cmd, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const patrol::ExperimentConfig cfg = resolve(flags);
        if (solve->parsed()) return patrol::cmd_solve(cfg, std::cout);
        if (simulate->parsed())
            return patrol::cmd_simulate(cfg, cfg.h_list.front(), cfg.policies.front(), cfg.runs, std::cout);
        if (sweep->parsed()) return patrol::cmd_sweep(cfg, std::cout);
        if (oracle->parsed()) return patrol::cmd_oracle(cfg, std::cout);
    } catch (const patrol::InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 2;
    } catch (const patrol::NoVacancyReachable& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
