#include "patrol/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

#include "patrol/policies.hpp"

namespace patrol {

std::string to_string(PolicyKind policy) {
    switch (policy) {
        case PolicyKind::index: return "index";
        case PolicyKind::mai: return "mai";
        case PolicyKind::greedy: return "greedy";
        case PolicyKind::random: return "random";
    }
    return "?";
}

PolicyKind parse_policy(const std::string& name) {
    if (name == "index") return PolicyKind::index;
    if (name == "mai") return PolicyKind::mai;
    if (name == "greedy") return PolicyKind::greedy;
    if (name == "random") return PolicyKind::random;
    throw std::invalid_argument("unknown policy '" + name + "' (expected index, mai, greedy or random)");
}

ScaledWorldState init_world(const MabMlInstance& inst, int h, Rng& rng) {
    if (h < 1) throw std::invalid_argument("init_world: h must be positive");
    ScaledWorldState world(inst.areas(), inst.types, h);
    for (int j = 0; j < inst.types; ++j)
        for (int i = 0; i < inst.areas(); ++i) {
            const auto& pi0 = inst.spec(i, j).initial;
            for (int k = 0; k < h; ++k) {
                const double u = rng.uniform();
                double acc = 0.0;
                int pick = -1;
                for (std::size_t s = 0; s < pi0.size(); ++s) {
                    if (pi0[s] <= 0.0) continue;
                    pick = static_cast<int>(s);
                    acc += pi0[s];
                    if (u < acc) break;
                }
                world.at(i, j, k) = pick;
            }
        }
    return world;
}

ScaledWorldState init_world(const MabMlInstance& inst, int h, std::uint64_t episode_seed) {
    Rng rng(episode_seed);
    return init_world(inst, h, rng);
}

std::vector<char> activations(const MabMlInstance& inst, int h, const AssignmentVector& assignment) {
    const int J = inst.types;
    std::vector<char> active(static_cast<std::size_t>(inst.areas() * J * h), 0);
    for (int j = 0; j < J; ++j)
        for (const auto& m : assignment.moves[static_cast<std::size_t>(j)])
            active[static_cast<std::size_t>((m.dest * J + j) * h + m.sub)] = 1;
    return active;
}

StepResult step(const MabMlInstance& inst, const ScaledWorldState& world, const std::vector<char>& active, Rng& rng) {
    const int J = inst.types;
    const int h = world.h;
    const int t = world.t;
    if (active.size() != world.states.size()) throw std::invalid_argument("step: activation vector has the wrong size");
    StepResult out;
    out.next = world;
    out.next.t = t + 1;
    double cost = 0.0;
    for (int j = 0; j < J; ++j)
        for (int i = 0; i < inst.areas(); ++i) {
            const auto& sp = inst.spec(i, j);
            for (int k = 0; k < h; ++k) {
                const auto f = static_cast<std::size_t>((i * J + j) * h + k);
                const int s = world.states[f];
                const int e = active[f] ? 1 : 0;
                cost += sp.cost_at(s, e, t);
                const auto& row = sp.row(s, e, t);
                const double u = rng.uniform();
                double acc = 0.0;
                int next = row.back().next;
                for (const auto& tr : row) {
                    acc += tr.prob;
                    if (u < acc) {
                        next = tr.next;
                        break;
                    }
                }
                out.next.states[f] = next;
            }
        }
    out.cost = cost / h;
    return out;
}

StepResult step(const MabMlInstance& inst, const ScaledWorldState& world, const AssignmentVector& assignment, Rng& rng) {
    return step(inst, world, activations(inst, world.h, assignment), rng);
}

bool EpisodeResult::all_feasible() const {
    return std::all_of(feasible.begin(), feasible.end(), [](char f) { return f != 0; });
}

EpisodeResult run_episode(const MabMlInstance& inst, int h, PolicyKind policy, const SolvedArtifacts& artifacts,
                          std::uint64_t episode_seed) {
    const bool needs_index = policy == PolicyKind::index || policy == PolicyKind::mai;
    if (needs_index && (artifacts.indices == nullptr || artifacts.indices->fingerprint != inst.fingerprint()))
        throw std::invalid_argument("run_episode: index table missing or built for another instance");
    const int I = inst.areas();
    const int J = inst.types;
    const int T = inst.horizon;
    Rng rng(episode_seed);
    ScaledWorldState world = init_world(inst, h, rng);
    EpisodeResult res;
    res.feasible.assign(static_cast<std::size_t>(T), 1);
    for (int t = 0; t < T; ++t) {
        world.t = t;
        AssignmentVector assignment;
        switch (policy) {
            case PolicyKind::index:
                assignment = index_assign(inst, h, world, rank_movements(inst, h, world, Ordering::index, artifacts.indices));
                break;
            case PolicyKind::mai: {
                PolicyOutput out = mai_assign(inst, h, world, rank_movements(inst, h, world, Ordering::index, artifacts.indices));
                res.adapted += out.adapted;
                assignment = std::move(out.assignment);
                break;
            }
            case PolicyKind::greedy: {
                PolicyOutput out = greedy_assign(inst, h, world);
                res.adapted += out.adapted;
                assignment = std::move(out.assignment);
                break;
            }
            case PolicyKind::random: {
                PolicyOutput out = random_feasible_assign(inst, h, world, rng());
                res.adapted += out.adapted;
                assignment = std::move(out.assignment);
                break;
            }
        }
        const bool ok = check_feasibility(inst, h, world, assignment);
        res.feasible[static_cast<std::size_t>(t)] = ok ? 1 : 0;
        std::vector<char> active = activations(inst, h, assignment);
        if (policy == PolicyKind::index && !ok) {
            for (int j = 0; j < J; ++j) {
                const AdaptionState st = adaption_state(inst, h, world, assignment, j);
                for (int i = 0; i < I; ++i) {
                    int left = st.leftover[static_cast<std::size_t>(i)];
                    res.stranded += std::max(left, 0);
                    for (int k = 0; k < h && left > 0; ++k) {
                        const auto f = static_cast<std::size_t>((i * J + j) * h + k);
                        if (inst.spec(i, j).coupling_value[static_cast<std::size_t>(world.states[f])] <= 0.0) continue;
                        --left;
                        if (active[f])
                            ++res.collisions;
                        else
                            active[f] = 1;
                    }
                }
            }
        }
        StepResult next = step(inst, world, active, rng);
        res.normalized_total_cost += next.cost;
        world = std::move(next.next);
    }
    res.adapted_fraction = static_cast<double>(res.adapted) / (static_cast<double>(h) * T);
    return res;
}

MonteCarloSummary summarize(const std::vector<EpisodeResult>& episodes, double lower_bound) {
    const int n = static_cast<int>(episodes.size());
    if (n < 2) throw std::invalid_argument("summarize: at least two runs are required");
    MonteCarloSummary s;
    s.runs = n;
    s.lower_bound = lower_bound;
    double sum = 0.0;
    double adapted = 0.0;
    for (const auto& e : episodes) {
        sum += e.normalized_total_cost;
        adapted += e.adapted_fraction;
        for (char f : e.feasible) s.infeasible_slots += f ? 0 : 1;
    }
    s.mean = sum / n;
    s.adapted_fraction = adapted / n;
    double ss = 0.0;
    for (const auto& e : episodes) ss += (e.normalized_total_cost - s.mean) * (e.normalized_total_cost - s.mean);
    s.stddev = std::sqrt(ss / (n - 1));
    const boost::math::students_t dist(n - 1);
    const double q = boost::math::quantile(boost::math::complement(dist, 0.025));
    s.ci_halfwidth = q * s.stddev / std::sqrt(static_cast<double>(n));
    s.deviation = lower_bound != 0.0 ? (s.mean - lower_bound) / lower_bound : 0.0;
    s.under_sampled = s.mean != 0.0 && s.ci_halfwidth / std::abs(s.mean) > 0.03;
    return s;
}

namespace {

MonteCarloResult run_many(const MabMlInstance& inst, int h, PolicyKind policy, const SolvedArtifacts& artifacts,
                          int runs, std::uint64_t master_seed, double lower_bound, bool parallel) {
    if (runs < 2) throw std::invalid_argument("monte_carlo: runs must be at least 2");
    MonteCarloResult out;
    out.episodes.resize(static_cast<std::size_t>(runs));
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int e = 0; e < runs; ++e) {
        try {
            out.episodes[static_cast<std::size_t>(e)] =
                run_episode(inst, h, policy, artifacts, derive_seed(master_seed, static_cast<std::uint64_t>(e)));
        } catch (...) {
#pragma omp critical(patrol_mc_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    out.summary = summarize(out.episodes, lower_bound);
    return out;
}

}  // namespace

MonteCarloResult monte_carlo(const MabMlInstance& inst, int h, PolicyKind policy, const SolvedArtifacts& artifacts,
                             int runs, std::uint64_t master_seed, double lower_bound) {
    return run_many(inst, h, policy, artifacts, runs, master_seed, lower_bound, true);
}

MonteCarloResult monte_carlo_serial(const MabMlInstance& inst, int h, PolicyKind policy,
                                    const SolvedArtifacts& artifacts, int runs, std::uint64_t master_seed,
                                    double lower_bound) {
    return run_many(inst, h, policy, artifacts, runs, master_seed, lower_bound, false);
}

}  // namespace patrol
