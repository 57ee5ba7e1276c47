#include "patrol/oracle.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace patrol {

JointSpace::JointSpace(const MabMlInstance& inst) {
    for (const auto& sp : inst.specs) {
        radix.push_back(sp.size());
        size *= sp.size();
        if (size > kMaxJointStates)
            throw OracleGuardExceeded("oracle: joint state space exceeds " + std::to_string(kMaxJointStates) + " states");
    }
}

std::vector<int> JointSpace::decode(std::int64_t index) const {
    std::vector<int> out(radix.size());
    for (std::size_t p = radix.size(); p-- > 0;) {
        out[p] = static_cast<int>(index % radix[p]);
        index /= radix[p];
    }
    return out;
}

std::int64_t JointSpace::encode(const std::vector<int>& states) const {
    std::int64_t index = 0;
    for (std::size_t p = 0; p < radix.size(); ++p) index = index * radix[p] + states[p];
    return index;
}

ScaledWorldState joint_world(const MabMlInstance& inst, const std::vector<int>& states, int t) {
    ScaledWorldState world(inst.areas(), inst.types, 1);
    world.states = states;
    world.t = t;
    return world;
}

namespace {

void check_guard(const MabMlInstance& inst) {
    if (inst.areas() > kMaxOracleAreas)
        throw OracleGuardExceeded("oracle: more than " + std::to_string(kMaxOracleAreas) + " areas");
}

}  // namespace

std::vector<AssignmentVector> enumerate_feasible_assignments(const MabMlInstance& inst, const std::vector<int>& states) {
    check_guard(inst);
    const int I = inst.areas();
    const int J = inst.types;
    if (states.size() != static_cast<std::size_t>(I * J))
        throw std::invalid_argument("enumerate_feasible_assignments: one state per pair is required");
    const ScaledWorldState world = joint_world(inst, states);

    // per type: all choices of (origin or none) per destination meeting the supply constraints
    std::vector<std::vector<std::vector<Move>>> per_type(static_cast<std::size_t>(J));
    for (int j = 0; j < J; ++j) {
        std::vector<double> supply(static_cast<std::size_t>(I));
        double agents = 0.0;
        for (int i = 0; i < I; ++i) {
            supply[static_cast<std::size_t>(i)] = area_supply(inst, world, i, j);
            agents += supply[static_cast<std::size_t>(i)];
        }
        if (agents > kMaxOracleAgents + 1e-9)
            throw OracleGuardExceeded("oracle: more than " + std::to_string(kMaxOracleAgents) + " agents of one type");
        const auto& nb = inst.topology.neighbors[static_cast<std::size_t>(j)];
        const auto& weight = inst.topology.weight[static_cast<std::size_t>(j)];
        std::vector<double> out_weight(static_cast<std::size_t>(I), 0.0);
        std::vector<Move> chosen;
        auto recurse = [&](auto&& self, int dest) -> void {
            if (dest == I) {
                for (int i = 0; i < I; ++i)
                    if (std::abs(out_weight[static_cast<std::size_t>(i)] - supply[static_cast<std::size_t>(i)]) > 1e-9)
                        return;
                per_type[static_cast<std::size_t>(j)].push_back(chosen);
                return;
            }
            self(self, dest + 1);
            for (int o : nb[static_cast<std::size_t>(dest)]) {
                const bool coupled = inst.topology.is_coupled(j, o, dest);
                const double w = coupled ? weight[static_cast<std::size_t>(dest)][static_cast<std::size_t>(o)] : 0.0;
                if (out_weight[static_cast<std::size_t>(o)] + w > supply[static_cast<std::size_t>(o)] + 1e-9) continue;
                out_weight[static_cast<std::size_t>(o)] += w;
                chosen.push_back({dest, 0, o});
                self(self, dest + 1);
                chosen.pop_back();
                out_weight[static_cast<std::size_t>(o)] -= w;
            }
        };
        recurse(recurse, 0);
    }

    std::vector<AssignmentVector> out;
    std::vector<std::size_t> pick(static_cast<std::size_t>(J), 0);
    for (const auto& options : per_type)
        if (options.empty()) return out;
    for (;;) {
        AssignmentVector a(J);
        for (int j = 0; j < J; ++j) a.moves[static_cast<std::size_t>(j)] = per_type[static_cast<std::size_t>(j)][pick[static_cast<std::size_t>(j)]];
        out.push_back(std::move(a));
        int j = J - 1;
        for (; j >= 0; --j) {
            auto& p = pick[static_cast<std::size_t>(j)];
            if (++p < per_type[static_cast<std::size_t>(j)].size()) break;
            p = 0;
        }
        if (j < 0) break;
    }
    return out;
}

OracleResult exact_optimum(const MabMlInstance& inst) {
    if (auto violations = validate_instance(inst); !violations.empty())
        throw std::invalid_argument("exact_optimum: invalid instance (" + violations.front().invariant + ")");
    check_guard(inst);
    const JointSpace space(inst);
    const int T = inst.horizon;
    const int P = static_cast<int>(inst.specs.size());
    const std::int64_t N = space.size;
    if (N * T > 4 * kMaxJointStates) throw OracleGuardExceeded("oracle: joint states times horizon too large");

    OracleResult res;
    res.joint_states = N;
    res.policy.assign(static_cast<std::size_t>(N * T), -1);
    std::vector<double> next(static_cast<std::size_t>(N), 0.0);
    std::vector<double> cur(static_cast<std::size_t>(N));

    std::vector<int> succ(static_cast<std::size_t>(P));
    for (int t = T - 1; t >= 0; --t) {
        for (std::int64_t x = 0; x < N; ++x) {
            const std::vector<int> states = space.decode(x);
            const std::vector<AssignmentVector> acts = enumerate_feasible_assignments(inst, states);
            double best = std::numeric_limits<double>::infinity();
            int best_a = -1;
            for (std::size_t a = 0; a < acts.size(); ++a) {
                std::vector<int> e(static_cast<std::size_t>(P), 0);
                for (int j = 0; j < inst.types; ++j)
                    for (const auto& m : acts[a].moves[static_cast<std::size_t>(j)])
                        e[static_cast<std::size_t>(m.dest * inst.types + j)] = 1;
                double cost = 0.0;
                std::vector<const KernelRow*> rows(static_cast<std::size_t>(P));
                for (int p = 0; p < P; ++p) {
                    const auto& sp = inst.specs[static_cast<std::size_t>(p)];
                    cost += sp.cost_at(states[static_cast<std::size_t>(p)], e[static_cast<std::size_t>(p)], t);
                    rows[static_cast<std::size_t>(p)] = &sp.row(states[static_cast<std::size_t>(p)], e[static_cast<std::size_t>(p)], t);
                }
                // expectation over the product of independent pair transitions
                double expect = 0.0;
                std::vector<std::size_t> pos(static_cast<std::size_t>(P), 0);
                for (;;) {
                    double prob = 1.0;
                    for (int p = 0; p < P; ++p) {
                        const auto& tr = (*rows[static_cast<std::size_t>(p)])[pos[static_cast<std::size_t>(p)]];
                        prob *= tr.prob;
                        succ[static_cast<std::size_t>(p)] = tr.next;
                    }
                    expect += prob * next[static_cast<std::size_t>(space.encode(succ))];
                    int p = P - 1;
                    for (; p >= 0; --p) {
                        auto& q = pos[static_cast<std::size_t>(p)];
                        if (++q < rows[static_cast<std::size_t>(p)]->size()) break;
                        q = 0;
                    }
                    if (p < 0) break;
                }
                const double value = cost + expect;
                if (value < best) {
                    best = value;
                    best_a = static_cast<int>(a);
                }
            }
            if (best_a < 0) throw std::logic_error("exact_optimum: joint state without a feasible assignment");
            cur[static_cast<std::size_t>(x)] = best;
            res.policy[static_cast<std::size_t>(t * N + x)] = best_a;
        }
        std::swap(cur, next);
    }
    for (std::int64_t x = 0; x < N; ++x) {
        const std::vector<int> states = space.decode(x);
        double prob = 1.0;
        for (int p = 0; p < P && prob > 0.0; ++p) prob *= inst.specs[static_cast<std::size_t>(p)].initial[static_cast<std::size_t>(states[static_cast<std::size_t>(p)])];
        res.opt += prob * next[static_cast<std::size_t>(x)];
    }
    return res;
}

}  // namespace patrol
