#pragma once

// solve / simulate / sweep / oracle. Each command is a pure function of the config
// and seed; outputs go to cfg.out_dir.

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "patrol/crime.hpp"
#include "patrol/index.hpp"
#include "patrol/io.hpp"
#include "patrol/relaxed.hpp"
#include "patrol/simulator.hpp"

namespace patrol {

/// A run broke a property that must always hold (exit status 2).
class InvariantViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SolvedCase {
    CrimeCase crime;
    DualSolution dual;
    IndexTable indices;
};

SolvedCase solve_configured_case(const ExperimentConfig& cfg, std::uint64_t seed);

/// Master seed of the Monte Carlo episodes for one (instance seed, h) point. Shared by
/// all policies so they see the same initial worlds.
std::uint64_t simulation_seed(std::uint64_t instance_seed, int h);

/// Writes dual.json and indices.json.
int cmd_solve(const ExperimentConfig& cfg, std::ostream& log);

/// Reads dual.json from cfg.out_dir and writes runs_<policy>_h<h>.csv and summary_<policy>_h<h>.csv.
int cmd_simulate(const ExperimentConfig& cfg, int h, PolicyKind policy, int runs, std::ostream& log);

struct SweepRow {
    int draw = 0;
    int h = 0;
    PolicyKind policy = PolicyKind::mai;
    MonteCarloSummary summary;
};

/// Draw d uses instance seed derive_seed(cfg.seed, d) and its own lower bound.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, std::ostream* progress = nullptr);
std::string sweep_csv(const std::vector<SweepRow>& rows);
int cmd_sweep(const ExperimentConfig& cfg, std::ostream& log);

/// Reduced crime instance for the oracle: 2 or 3 areas, one agent type, three alpha levels,
/// no agent in area 0 at the start.
MabMlInstance oracle_case(std::uint64_t seed, int index, int horizon);

struct OracleRow {
    int index = 0;
    int areas = 0;
    double lower_bound = 0.0;
    double opt = 0.0;
    MonteCarloSummary mai;
    bool bound_ok = false;   ///< lower_bound <= opt + 1e-6
    bool policy_ok = false;  ///< opt <= mai mean + 3 ci
};

std::vector<OracleRow> run_oracle(const ExperimentConfig& cfg, std::ostream* progress = nullptr);
int cmd_oracle(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace patrol
