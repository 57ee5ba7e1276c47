#include "patrol/index.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "patrol/rng.hpp"

namespace patrol {

double IndexTable::vartheta_at(int i, int j, int s, int t) const {
    const auto p = static_cast<std::size_t>(i * types + j);
    return vartheta[p][static_cast<std::size_t>(t * states[p] + s)];
}

double IndexTable::eta(int i, int o, int j, int s, int t) const {
    const std::size_t f = flat(i, o, j, t);
    if (!allowed[f]) return kInfinity;
    return vartheta_at(i, j, s, t) - theta[f];
}

IndexTable compute_indices(const MabMlInstance& inst, const DualSolution& dual) {
    const int I = inst.areas();
    const int J = inst.types;
    const int T = inst.horizon;
    if (dual.fingerprint != inst.fingerprint())
        throw std::invalid_argument("compute_indices: dual solution belongs to a different instance");
    if (dual.gamma.areas != I || dual.gamma.types != J || dual.gamma.horizon != T ||
        dual.values.size() != static_cast<std::size_t>(I * J))
        throw std::invalid_argument("compute_indices: dual solution dimensions differ from the instance");

    const MabMlInstance jittered = apply_jitter(inst, dual.jitter_scale);
    IndexTable out;
    out.areas = I;
    out.types = J;
    out.horizon = T;
    out.fingerprint = dual.fingerprint;
    out.states.resize(static_cast<std::size_t>(I * J));
    out.vartheta.resize(static_cast<std::size_t>(I * J));
    for (int i = 0; i < I; ++i) {
        for (int j = 0; j < J; ++j) {
            const auto p = static_cast<std::size_t>(i * J + j);
            const int S = inst.spec(i, j).size();
            const auto& sol = dual.values[p];
            if (sol.states != S || sol.horizon != T)
                throw std::invalid_argument("compute_indices: value table dimensions differ from the instance");
            out.states[p] = S;
            auto& vt = out.vartheta[p];
            vt.resize(static_cast<std::size_t>(T * S));
            for (int t = 0; t < T; ++t) {
                const auto first = sol.value.begin() + static_cast<std::ptrdiff_t>((t + 1) * S);
                const std::vector<double> next(first, first + S);
                for (int s = 0; s < S; ++s) vt[static_cast<std::size_t>(t * S + s)] = vartheta(jittered, i, j, s, t, next);
            }
        }
    }
    out.theta.assign(static_cast<std::size_t>(I * I * J * T), 0.0);
    out.allowed.assign(out.theta.size(), 0);
    for (int i = 0; i < I; ++i)
        for (int j = 0; j < J; ++j)
            for (int o : inst.topology.neighbors[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)])
                for (int t = 0; t < T; ++t) {
                    const std::size_t f = out.flat(i, o, j, t);
                    out.allowed[f] = 1;
                    out.theta[f] = theta(inst, dual.gamma, i, o, j, t);
                }
    return out;
}

RankedMovements rank_movements(const MabMlInstance& inst, int h, const ScaledWorldState& world, Ordering ordering,
                               const IndexTable* indices, std::uint64_t seed) {
    const int I = inst.areas();
    const int J = inst.types;
    const int t = world.t;
    if (world.h != h || world.areas != I || world.types != J)
        throw std::invalid_argument("rank_movements: world dimensions differ from the instance");
    if (t < 0 || t >= inst.horizon) throw std::invalid_argument("rank_movements: slot outside the horizon");
    if (ordering == Ordering::index && (indices == nullptr || indices->fingerprint != inst.fingerprint()))
        throw std::invalid_argument("rank_movements: index ordering needs the instance's index table");

    Rng rng(seed);
    RankedMovements out;
    out.t = t;
    out.by_type.resize(static_cast<std::size_t>(J));
    std::vector<char> has_agent(static_cast<std::size_t>(I));
    for (int j = 0; j < J; ++j) {
        for (int o = 0; o < I; ++o) has_agent[static_cast<std::size_t>(o)] = area_supply(inst, world, o, j) > 0.0;
        auto& list = out.by_type[static_cast<std::size_t>(j)];
        for (int i = 0; i < I; ++i) {
            const auto& sp = inst.spec(i, j);
            for (int o : inst.topology.neighbors[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]) {
                if (!has_agent[static_cast<std::size_t>(o)]) continue;
                for (int k = 0; k < h; ++k) {
                    const int s = world.at(i, j, k);
                    double key = 0.0;
                    switch (ordering) {
                        case Ordering::index: key = indices->eta(i, o, j, s, t); break;
                        case Ordering::greedy: key = -sp.cost_at(s, 1, t); break;
                        case Ordering::random: key = rng.uniform(); break;
                    }
                    list.push_back({i, k, o, s, key});
                }
            }
        }
        std::sort(list.begin(), list.end(), [](const RankedEntry& a, const RankedEntry& b) {
            if (a.key != b.key) return a.key < b.key;
            if (a.dest != b.dest) return a.dest < b.dest;
            if (a.origin != b.origin) return a.origin < b.origin;
            if (a.state != b.state) return a.state < b.state;
            return a.sub < b.sub;
        });
    }
    return out;
}

}  // namespace patrol
