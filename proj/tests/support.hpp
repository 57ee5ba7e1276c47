#pragma once

// Small hand-built instances and independent reference computations shared by the unit tests.

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "patrol/crime.hpp"
#include "patrol/model.hpp"
#include "patrol/relaxed.hpp"

namespace fixtures {

using namespace patrol;

/// Two knowledge levels (0 calm, 1 hot) times the indicator bit, state index = knowledge * 2 + indicator.
/// `hot[e][k]`: probability of moving to knowledge 1 under action e from knowledge k.
/// `cost[e][k]`: cost of knowledge k under action e.
struct ToyPair {
    std::array<std::array<double, 2>, 2> hot{{{0.3, 0.8}, {0.1, 0.4}}};
    std::array<std::array<double, 2>, 2> cost{{{1.0, 5.0}, {1.5, 4.0}}};
    std::array<double, 4> initial{0.4, 0.1, 0.3, 0.2};
};

inline PairProcessSpec toy_spec(const ToyPair& toy) {
    PairProcessSpec sp;
    for (int k = 0; k < 2; ++k)
        for (int ind = 0; ind < 2; ++ind) sp.states.push_back({k, ind});
    sp.kernel.assign(1, std::vector<std::array<KernelRow, 2>>(4));
    sp.cost.assign(1, std::vector<std::array<double, 2>>(4));
    for (int s = 0; s < 4; ++s) {
        const int k = s / 2;
        for (int e = 0; e < 2; ++e) {
            const double p = toy.hot[static_cast<std::size_t>(e)][static_cast<std::size_t>(k)];
            auto& row = sp.kernel[0][static_cast<std::size_t>(s)][static_cast<std::size_t>(e)];
            if (p < 1.0) row.push_back({0 * 2 + e, 1.0 - p});
            if (p > 0.0) row.push_back({1 * 2 + e, p});
            sp.cost[0][static_cast<std::size_t>(s)][static_cast<std::size_t>(e)] =
                toy.cost[static_cast<std::size_t>(e)][static_cast<std::size_t>(k)];
        }
        sp.coupling_value.push_back(s % 2);
    }
    sp.initial.assign(toy.initial.begin(), toy.initial.end());
    return sp;
}

/// Patrol instance over `areas` areas (path graph unless edges are given), one type, toy pairs.
inline MabMlInstance toy_instance(int areas, int horizon, const std::vector<std::pair<int, int>>& edges = {},
                                  const ToyPair& toy = {}) {
    std::vector<std::pair<int, int>> e = edges;
    if (e.empty())
        for (int i = 0; i + 1 < areas; ++i) e.push_back({i, i + 1});
    MabMlInstance inst;
    inst.topology = Topology::patrol(areas, 1, e);
    inst.types = 1;
    inst.horizon = horizon;
    inst.base_counts = {1};
    for (int i = 0; i < areas; ++i) inst.specs.push_back(toy_spec(toy));
    return inst;
}

/// Crime instance over a patrol topology with global deltas.
inline MabMlInstance crime_instance(int areas, int types, const std::vector<std::pair<int, int>>& edges,
                                    const std::vector<int>& alpha0, const std::vector<double>& init, int horizon,
                                    int d1 = 4, int d2 = 7, int db = 3) {
    CrimeParams p;
    p.areas = areas;
    p.types = types;
    p.horizon = horizon;
    const auto n = static_cast<std::size_t>(areas * types);
    p.delta1_alpha.assign(n, d1);
    p.delta2_alpha.assign(n, d2);
    p.delta_beta.assign(n, db);
    p.alpha0 = alpha0;
    p.indicator_init = init;
    p.base_counts.assign(static_cast<std::size_t>(types), 1);
    return build_crime_instance(Topology::patrol(areas, types, edges), p);
}

inline double dot_row(const KernelRow& row, const std::vector<double>& v) {
    double acc = 0.0;
    for (const auto& tr : row) acc += tr.prob * v[static_cast<std::size_t>(tr.next)];
    return acc;
}

/// Minimum expected relaxed cost from each start state over every deterministic Markov
/// policy of a single-area pair (B = {self}), found by trying all 2^(S*T) policies.
inline std::vector<double> brute_force_pair_values(const MabMlInstance& inst, const Multipliers& gamma) {
    const auto& sp = inst.spec(0, 0);
    const int S = sp.size();
    const int T = inst.horizon;
    const long long policies = 1LL << (S * T);
    std::vector<double> best(static_cast<std::size_t>(S), std::numeric_limits<double>::infinity());
    for (long long pol = 0; pol < policies; ++pol) {
        for (int s0 = 0; s0 < S; ++s0) {
            std::vector<double> mu(static_cast<std::size_t>(S), 0.0);
            mu[static_cast<std::size_t>(s0)] = 1.0;
            double total = 0.0;
            for (int t = 0; t < T; ++t) {
                std::vector<double> next(static_cast<std::size_t>(S), 0.0);
                for (int s = 0; s < S; ++s) {
                    const double m = mu[static_cast<std::size_t>(s)];
                    if (m == 0.0) continue;
                    const int e = static_cast<int>((pol >> (t * S + s)) & 1);
                    std::vector<double> a(1, static_cast<double>(e));
                    total += m * relaxed_cost(inst, 0, 0, s, a, t, gamma);
                    for (const auto& tr : sp.row(s, e, t)) next[static_cast<std::size_t>(tr.next)] += m * tr.prob;
                }
                mu = std::move(next);
            }
            best[static_cast<std::size_t>(s0)] = std::min(best[static_cast<std::size_t>(s0)], total);
        }
    }
    return best;
}

/// Expected cumulative cost of one pair under a fixed activation, by forward recursion.
inline double chain_expectation(const MabMlInstance& inst, int i, int j, int e) {
    const auto& sp = inst.spec(i, j);
    std::vector<double> mu = sp.initial;
    double total = 0.0;
    for (int t = 0; t < inst.horizon; ++t) {
        std::vector<double> next(mu.size(), 0.0);
        for (int s = 0; s < sp.size(); ++s) {
            total += mu[static_cast<std::size_t>(s)] * sp.cost_at(s, e, t);
            for (const auto& tr : sp.row(s, e, t))
                next[static_cast<std::size_t>(tr.next)] += mu[static_cast<std::size_t>(s)] * tr.prob;
        }
        mu = std::move(next);
    }
    return total;
}

}  // namespace fixtures
