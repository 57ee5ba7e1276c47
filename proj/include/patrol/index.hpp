#pragma once

// Movement indices eta = vartheta - theta and the per-slot movement ranking.

#include <cstdint>
#include <limits>
#include <vector>

#include "patrol/model.hpp"
#include "patrol/relaxed.hpp"

namespace patrol {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct IndexTable {
    int areas = 0;
    int types = 0;
    int horizon = 0;
    std::vector<int> states;                   ///< |S| per pair [i * types + j]
    std::vector<std::vector<double>> vartheta;  ///< per pair, [t * S + s]
    std::vector<double> theta;                 ///< [((i * areas + o) * types + j) * horizon + t]
    std::vector<char> allowed;                 ///< o in B[i][j], same layout as theta
    std::uint64_t fingerprint = 0;

    double vartheta_at(int i, int j, int s, int t) const;
    double theta_at(int i, int o, int j, int t) const { return theta[flat(i, o, j, t)]; }
    /// eta(i <- o, j, s, t); +inf when o is outside B[i][j].
    double eta(int i, int o, int j, int s, int t) const;

    std::size_t flat(int i, int o, int j, int t) const {
        return static_cast<std::size_t>(((i * areas + o) * types + j) * horizon + t);
    }
};

/// Indices from a dual solution of the same instance. vartheta uses the jittered costs
/// the dual was solved with.
IndexTable compute_indices(const MabMlInstance& inst, const DualSolution& dual);

enum class Ordering {
    index,   ///< ascending eta of the destination sub-area
    greedy,  ///< descending active cost (crime rate) of the destination sub-area
    random,  ///< uniformly random permutation
};

struct RankedEntry {
    int dest = 0;
    int sub = 0;
    int origin = 0;
    int state = 0;     ///< destination sub-area state
    double key = 0.0;  ///< sort key (eta for index ordering)
};

struct RankedMovements {
    int t = 0;
    std::vector<std::vector<RankedEntry>> by_type;  ///< [j], in admission order
};

/// Candidate movements (i, k) <- o with o in B[i][j] holding at least one agent, sorted by
/// (key, dest, origin, state, sub). `indices` is required for index ordering and `seed`
/// drives the random ordering.
RankedMovements rank_movements(const MabMlInstance& inst, int h, const ScaledWorldState& world, Ordering ordering,
                               const IndexTable* indices = nullptr, std::uint64_t seed = 0);

}  // namespace patrol
