#pragma once

// Per-slot assignment policies: single-pass index admission, movement adaption (MAI),
// and the greedy and random-ranking baselines built on the same pipeline.

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "patrol/index.hpp"
#include "patrol/model.hpp"

namespace patrol {

/// Adaption found no free sub-area reachable from a stranded agent.
class NoVacancyReachable : public std::runtime_error {
public:
    NoVacancyReachable(int type, int slot, int area);
    int type;
    int slot;
    int area;
};

inline constexpr int kNoDistance = std::numeric_limits<int>::max();

/// Destination origin map and leftover supply after an assignment pass.
struct AdaptionState {
    int areas = 0;
    int h = 0;
    std::vector<int> origin;    ///< [i * h + k], kFree when no move targets (i, k)
    std::vector<int> leftover;  ///< agents per area without an outgoing move
    std::vector<int> distance;  ///< d[i]; kNoDistance when area i holds no agent or no walk exists
};

/// Single pass over the ranking: (i, k) <- o is taken iff (i, k) is unclaimed and o
/// still has unassigned supply. May leave agents stranded.
AssignmentVector index_assign(const MabMlInstance& inst, int h, const ScaledWorldState& world,
                              const RankedMovements& ranked);

/// Origin map, leftover agents and walk distances of type j under `assignment` (patrol instances).
AdaptionState adaption_state(const MabMlInstance& inst, int h, const ScaledWorldState& world,
                             const AssignmentVector& assignment, int j);

/// Walk distances: 0 for areas with an agent next to a free sub-area, +1 per replacement
/// hop through the origins of neighbor sub-areas, kNoDistance for areas without agents.
std::vector<int> adaption_distances(const MabMlInstance& inst, int j, int h, const std::vector<int>& origin,
                                    const std::vector<int>& supply);

struct PolicyOutput {
    AssignmentVector assignment;
    int adapted = 0;     ///< destination sub-areas whose origin differs from the index pass
    int walk_steps = 0;  ///< replacement hops over all walks
    int longest_walk = 0;
};

/// Index pass followed by replacement walks until every agent has a move.
PolicyOutput mai_assign(const MabMlInstance& inst, int h, const ScaledWorldState& world,
                        const RankedMovements& ranked);

/// MAI pipeline on the descending-crime-rate ranking.
PolicyOutput greedy_assign(const MabMlInstance& inst, int h, const ScaledWorldState& world);

/// MAI pipeline on a uniformly random ranking.
PolicyOutput random_feasible_assign(const MabMlInstance& inst, int h, const ScaledWorldState& world,
                                    std::uint64_t seed);

}  // namespace patrol
