#include "patrol/policies.hpp"

#include <algorithm>
#include <cmath>

namespace patrol {

NoVacancyReachable::NoVacancyReachable(int type_, int slot_, int area_)
    : std::runtime_error("no free sub-area reachable: type " + std::to_string(type_) + ", slot " +
                         std::to_string(slot_) + ", area " + std::to_string(area_)),
      type(type_), slot(slot_), area(area_) {}

AssignmentVector index_assign(const MabMlInstance& inst, int h, const ScaledWorldState& world,
                              const RankedMovements& ranked) {
    const int I = inst.areas();
    const int J = inst.types;
    if (world.h != h || world.areas != I || world.types != J || ranked.by_type.size() != static_cast<std::size_t>(J))
        throw std::invalid_argument("index_assign: dimensions differ from the instance");
    AssignmentVector out(J);
    std::vector<char> claimed(static_cast<std::size_t>(I * h));
    std::vector<double> supply(static_cast<std::size_t>(I));
    for (int j = 0; j < J; ++j) {
        std::fill(claimed.begin(), claimed.end(), 0);
        for (int i = 0; i < I; ++i) supply[static_cast<std::size_t>(i)] = area_supply(inst, world, i, j);
        const auto& weight = inst.topology.weight[static_cast<std::size_t>(j)];
        for (const auto& m : ranked.by_type[static_cast<std::size_t>(j)]) {
            const auto dest = static_cast<std::size_t>(m.dest * h + m.sub);
            const double w = weight[static_cast<std::size_t>(m.dest)][static_cast<std::size_t>(m.origin)];
            double& p = supply[static_cast<std::size_t>(m.origin)];
            if (claimed[dest] || p < w - 1e-12) continue;
            claimed[dest] = 1;
            if (inst.topology.is_coupled(j, m.origin, m.dest)) p -= w;
            out.moves[static_cast<std::size_t>(j)].push_back({m.dest, m.sub, m.origin});
        }
    }
    return out;
}

namespace {

void require_patrol(const MabMlInstance& inst, const char* who) {
    if (!inst.is_patrol()) throw std::invalid_argument(std::string(who) + ": movement adaption needs a patrol instance");
}

std::vector<int> agent_counts(const MabMlInstance& inst, const ScaledWorldState& world, int j) {
    std::vector<int> out(static_cast<std::size_t>(inst.areas()));
    for (int i = 0; i < inst.areas(); ++i)
        out[static_cast<std::size_t>(i)] = static_cast<int>(std::lround(area_supply(inst, world, i, j)));
    return out;
}

}  // namespace

std::vector<int> adaption_distances(const MabMlInstance& inst, int j, int h, const std::vector<int>& origin,
                                    const std::vector<int>& supply) {
    const int I = inst.areas();
    const auto& nb = inst.topology.neighbors[static_cast<std::size_t>(j)];
    std::vector<int> d(static_cast<std::size_t>(I), kNoDistance);
    std::vector<std::vector<int>> into(static_cast<std::size_t>(I));  // into[o]: areas with an edge to o
    std::vector<int> queue;
    for (int i = 0; i < I; ++i) {
        if (supply[static_cast<std::size_t>(i)] <= 0) continue;
        bool vacancy = false;
        for (int dest : nb[static_cast<std::size_t>(i)])
            for (int k = 0; k < h; ++k) {
                const int o = origin[static_cast<std::size_t>(dest * h + k)];
                if (o == kFree)
                    vacancy = true;
                else if (o != i)
                    into[static_cast<std::size_t>(o)].push_back(i);
            }
        if (vacancy) {
            d[static_cast<std::size_t>(i)] = 0;
            queue.push_back(i);
        }
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const int o = queue[head];
        for (int i : into[static_cast<std::size_t>(o)]) {
            if (d[static_cast<std::size_t>(i)] != kNoDistance) continue;
            d[static_cast<std::size_t>(i)] = d[static_cast<std::size_t>(o)] + 1;
            queue.push_back(i);
        }
    }
    return d;
}

AdaptionState adaption_state(const MabMlInstance& inst, int h, const ScaledWorldState& world,
                             const AssignmentVector& assignment, int j) {
    require_patrol(inst, "adaption_state");
    AdaptionState st;
    st.areas = inst.areas();
    st.h = h;
    st.origin = assignment.origin_map(j, st.areas, h);
    st.leftover = agent_counts(inst, world, j);
    for (const auto& m : assignment.moves[static_cast<std::size_t>(j)]) --st.leftover[static_cast<std::size_t>(m.origin)];
    st.distance = adaption_distances(inst, j, h, st.origin, agent_counts(inst, world, j));
    return st;
}

namespace {

// Places one agent of `start`: takes a free neighbor sub-area, or replaces the incoming
// move of the neighbor sub-area whose origin is closest to a vacancy and continues from
// that origin. Returns the number of replacements.
int walk(const MabMlInstance& inst, int j, int t, int h, int start, const std::vector<int>& d, std::vector<int>& origin) {
    const auto& nb = inst.topology.neighbors[static_cast<std::size_t>(j)];
    int cur = start;
    for (int steps = 0; steps <= inst.areas(); ++steps) {
        for (int dest : nb[static_cast<std::size_t>(cur)])
            for (int k = 0; k < h; ++k)
                if (origin[static_cast<std::size_t>(dest * h + k)] == kFree) {
                    origin[static_cast<std::size_t>(dest * h + k)] = cur;
                    return steps;
                }
        int best = -1;
        int best_d = kNoDistance;
        for (int dest : nb[static_cast<std::size_t>(cur)])
            for (int k = 0; k < h; ++k) {
                const int o = origin[static_cast<std::size_t>(dest * h + k)];
                if (o == cur || d[static_cast<std::size_t>(o)] >= best_d) continue;
                best_d = d[static_cast<std::size_t>(o)];
                best = dest * h + k;
            }
        if (best < 0) throw NoVacancyReachable(j, t, cur);
        const int displaced = origin[static_cast<std::size_t>(best)];
        origin[static_cast<std::size_t>(best)] = cur;
        cur = displaced;
    }
    throw std::logic_error("adaption walk exceeded the number of areas");
}

PolicyOutput adapt(const MabMlInstance& inst, int h, const ScaledWorldState& world, const RankedMovements& ranked) {
    require_patrol(inst, "mai_assign");
    const int I = inst.areas();
    const int J = inst.types;
    const AssignmentVector base = index_assign(inst, h, world, ranked);
    PolicyOutput out;
    out.assignment = AssignmentVector(J);
    for (int j = 0; j < J; ++j) {
        AdaptionState st = adaption_state(inst, h, world, base, j);
        const std::vector<int> supply = agent_counts(inst, world, j);
        const std::vector<int> initial = st.origin;
        for (int i = 0; i < I; ++i) {
            for (int& left = st.leftover[static_cast<std::size_t>(i)]; left > 0; --left) {
                const int steps = walk(inst, j, world.t, h, i, st.distance, st.origin);
                out.walk_steps += steps;
                out.longest_walk = std::max(out.longest_walk, steps);
                st.distance = adaption_distances(inst, j, h, st.origin, supply);
            }
        }
        auto& moves = out.assignment.moves[static_cast<std::size_t>(j)];
        for (int dest = 0; dest < I; ++dest)
            for (int k = 0; k < h; ++k) {
                const auto f = static_cast<std::size_t>(dest * h + k);
                if (st.origin[f] != initial[f]) ++out.adapted;
                if (st.origin[f] != kFree) moves.push_back({dest, k, st.origin[f]});
            }
    }
    return out;
}

}  // namespace

PolicyOutput mai_assign(const MabMlInstance& inst, int h, const ScaledWorldState& world, const RankedMovements& ranked) {
    return adapt(inst, h, world, ranked);
}

PolicyOutput greedy_assign(const MabMlInstance& inst, int h, const ScaledWorldState& world) {
    return adapt(inst, h, world, rank_movements(inst, h, world, Ordering::greedy));
}

PolicyOutput random_feasible_assign(const MabMlInstance& inst, int h, const ScaledWorldState& world,
                                    std::uint64_t seed) {
    return adapt(inst, h, world, rank_movements(inst, h, world, Ordering::random, nullptr, seed));
}

}  // namespace patrol
