#include "patrol/commands.hpp"

#include <filesystem>
#include <ostream>

#include "patrol/oracle.hpp"
#include "patrol/rng.hpp"

namespace patrol {

using nlohmann::json;

SolvedCase solve_configured_case(const ExperimentConfig& cfg, std::uint64_t seed) {
    SolvedCase out;
    out.crime = build_configured_case(cfg, seed);
    out.dual = maximize_dual(out.crime.instance, cfg.solver);
    out.indices = compute_indices(out.crime.instance, out.dual);
    return out;
}

std::uint64_t simulation_seed(std::uint64_t instance_seed, int h) {
    return derive_seed(derive_seed(instance_seed, 0x51a1ULL), static_cast<std::uint64_t>(h));
}

namespace {

std::string path_in(const ExperimentConfig& cfg, const std::string& name) {
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

}  // namespace

int cmd_solve(const ExperimentConfig& cfg, std::ostream& log) {
    const SolvedCase sc = solve_configured_case(cfg, cfg.seed);
    write_text(path_in(cfg, "dual.json"), dual_to_json(sc.dual).dump() + "\n");
    write_text(path_in(cfg, "indices.json"), indices_to_json(sc.indices).dump() + "\n");
    log << "lower bound " << format_number(sc.dual.lower_bound) << "\n"
        << "iterations " << sc.dual.iterations << "\n"
        << "residual " << format_number(sc.dual.residual) << "\n";
    return 0;
}

int cmd_simulate(const ExperimentConfig& cfg, int h, PolicyKind policy, int runs, std::ostream& log) {
    if (h < 1) throw ConfigError("h must be positive");
    if (runs < 2) throw ConfigError("runs must be at least 2");
    const std::string dual_path = path_in(cfg, "dual.json");
    if (!std::filesystem::exists(dual_path))
        throw ConfigError("missing solve artifacts: '" + dual_path + "' (run solve first)");
    json doc;
    try {
        doc = json::parse(read_text(dual_path));
    } catch (const json::parse_error& e) {
        throw ConfigError("'" + dual_path + "' is not valid JSON: " + e.what());
    }
    const DualSolution dual = dual_from_json(doc);
    const CrimeCase crime = build_configured_case(cfg, cfg.seed);
    if (dual.fingerprint != crime.instance.fingerprint())
        throw ConfigError("'" + dual_path + "' was solved for a different instance; rerun solve with this config");
    const IndexTable indices = compute_indices(crime.instance, dual);

    SolvedArtifacts artifacts{&indices};
    const MonteCarloResult mc = monte_carlo(crime.instance, h, policy, artifacts, runs,
                                            simulation_seed(cfg.seed, h), dual.lower_bound);
    const std::string tag = to_string(policy) + "_h" + std::to_string(h);
    write_text(path_in(cfg, "runs_" + tag + ".csv"), runs_csv(h, policy, mc.episodes));
    write_text(path_in(cfg, "summary_" + tag + ".csv"), summary_csv_header() + summary_csv_row(h, policy, mc.summary));
    log << to_string(policy) << " h=" << h << " mean " << format_number(mc.summary.mean) << " +- "
        << format_number(mc.summary.ci_halfwidth) << " deviation " << format_number(mc.summary.deviation) << "\n";
    if (mc.summary.under_sampled) log << "warning: confidence half-width above 3% of the mean\n";
    if (policy != PolicyKind::index && mc.summary.infeasible_slots > 0)
        throw InvariantViolation(to_string(policy) + " produced " + std::to_string(mc.summary.infeasible_slots) +
                                 " infeasible slots");
    return 0;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, std::ostream* progress) {
    std::vector<SweepRow> rows;
    for (int d = 0; d < cfg.draws; ++d) {
        const std::uint64_t seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(d));
        const SolvedCase sc = solve_configured_case(cfg, seed);
        SolvedArtifacts artifacts{&sc.indices};
        for (int h : cfg.h_list)
            for (PolicyKind policy : cfg.policies) {
                const MonteCarloResult mc = monte_carlo(sc.crime.instance, h, policy, artifacts, cfg.runs,
                                                        simulation_seed(seed, h), sc.dual.lower_bound);
                rows.push_back({d, h, policy, mc.summary});
            }
        if (progress)
            *progress << "draw " << d + 1 << "/" << cfg.draws << " lower bound " << format_number(sc.dual.lower_bound)
                      << std::endl;
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "draw,h,policy,deviation,mean,ci_halfwidth,lower_bound,adapted_fraction,infeasible_slots\n";
    for (const auto& r : rows)
        out += std::to_string(r.draw) + "," + std::to_string(r.h) + "," + to_string(r.policy) + "," +
               format_number(r.summary.deviation) + "," + format_number(r.summary.mean) + "," +
               format_number(r.summary.ci_halfwidth) + "," + format_number(r.summary.lower_bound) + "," +
               format_number(r.summary.adapted_fraction) + "," + std::to_string(r.summary.infeasible_slots) + "\n";
    return out;
}

int cmd_sweep(const ExperimentConfig& cfg, std::ostream& log) {
    const std::vector<SweepRow> rows = run_sweep(cfg, &log);
    write_text(path_in(cfg, "sweep.csv"), sweep_csv(rows));
    int infeasible = 0;
    for (const auto& r : rows)
        if (r.policy != PolicyKind::index) infeasible += r.summary.infeasible_slots;
    log << rows.size() << " rows written\n";
    if (infeasible > 0) throw InvariantViolation("sweep produced " + std::to_string(infeasible) + " infeasible slots");
    return 0;
}

MabMlInstance oracle_case(std::uint64_t seed, int index, int horizon) {
    Rng rng(derive_seed(seed, 0x0a1cULL + static_cast<std::uint64_t>(index)));
    const int areas = 2 + index % 2;
    std::vector<std::pair<int, int>> edges{{0, 1}};
    if (areas == 3) {
        edges.push_back({1, 2});
        if (index % 4 == 3) edges.push_back({0, 2});
    }
    ReducedCrimeSpec spec;
    spec.levels = {2 + static_cast<int>(rng.below(15)), 18 + static_cast<int>(rng.below(15)),
                   34 + static_cast<int>(rng.below(15))};
    spec.delta1_alpha = 2 + static_cast<int>(rng.below(5));
    spec.delta2_alpha = 5 + static_cast<int>(rng.below(5));
    spec.delta_beta = 1 + static_cast<int>(rng.below(5));
    std::vector<int> alpha0(static_cast<std::size_t>(areas));
    std::vector<double> init(static_cast<std::size_t>(areas), 0.0);
    for (int i = 0; i < areas; ++i) {
        alpha0[static_cast<std::size_t>(i)] = spec.levels[rng.below(3)];
        if (i > 0) init[static_cast<std::size_t>(i)] = static_cast<double>(1 + rng.below(3)) / 4.0;
    }
    return build_reduced_instance(Topology::patrol(areas, 1, edges), spec, alpha0, init, horizon);
}

std::vector<OracleRow> run_oracle(const ExperimentConfig& cfg, std::ostream* progress) {
    std::vector<OracleRow> rows;
    for (int n = 0; n < cfg.oracle.instances; ++n) {
        const MabMlInstance inst = oracle_case(cfg.seed, n, cfg.oracle.horizon);
        const DualSolution dual = maximize_dual(inst, cfg.solver);
        const IndexTable indices = compute_indices(inst, dual);
        const OracleResult exact = exact_optimum(inst);
        SolvedArtifacts artifacts{&indices};
        const MonteCarloResult mc = monte_carlo(inst, 1, PolicyKind::mai, artifacts, cfg.oracle.runs,
                                                derive_seed(cfg.seed, 0x0a1cf00dULL + static_cast<std::uint64_t>(n)),
                                                dual.lower_bound);
        OracleRow row;
        row.index = n;
        row.areas = inst.areas();
        row.lower_bound = dual.lower_bound;
        row.opt = exact.opt;
        row.mai = mc.summary;
        row.bound_ok = dual.lower_bound <= exact.opt + 1e-6;
        row.policy_ok = exact.opt <= mc.summary.mean + 3.0 * mc.summary.ci_halfwidth;
        rows.push_back(row);
        if (progress)
            *progress << "instance " << n << ": lower bound " << format_number(row.lower_bound) << ", optimum "
                      << format_number(row.opt) << ", mai " << format_number(row.mai.mean) << " +- "
                      << format_number(row.mai.ci_halfwidth) << "\n";
    }
    return rows;
}

int cmd_oracle(const ExperimentConfig& cfg, std::ostream& log) {
    const std::vector<OracleRow> rows = run_oracle(cfg, &log);
    json report = json::array();
    bool ok = true;
    for (const auto& r : rows) {
        report.push_back({{"index", r.index},
                          {"areas", r.areas},
                          {"lower_bound", r.lower_bound},
                          {"opt", r.opt},
                          {"gap", r.opt - r.lower_bound},
                          {"mai_mean", r.mai.mean},
                          {"ci_halfwidth", r.mai.ci_halfwidth},
                          {"runs", r.mai.runs},
                          {"bound_ok", r.bound_ok},
                          {"policy_ok", r.policy_ok}});
        ok = ok && r.bound_ok && r.policy_ok;
    }
    write_text(path_in(cfg, "oracle.json"), json{{"instances", report}, {"all_ok", ok}}.dump(2) + "\n");
    if (!ok) throw InvariantViolation("oracle sandwich violated (see oracle.json)");
    return 0;
}

}  // namespace patrol
