#pragma once

// Exact joint optimum of tiny instances at h = 1 by backward induction over joint
// states and every feasible assignment.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "patrol/model.hpp"

namespace patrol {

inline constexpr std::int64_t kMaxJointStates = 2'000'000;
inline constexpr int kMaxOracleAreas = 4;
inline constexpr int kMaxOracleAgents = 4;

class OracleGuardExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mixed-radix codec over the per-pair state spaces (pair order [i * types + j]).
struct JointSpace {
    std::vector<int> radix;
    std::int64_t size = 1;

    explicit JointSpace(const MabMlInstance& inst);  ///< throws OracleGuardExceeded above kMaxJointStates
    std::vector<int> decode(std::int64_t index) const;
    std::int64_t encode(const std::vector<int>& states) const;
};

/// h = 1 world holding the given per-pair states.
ScaledWorldState joint_world(const MabMlInstance& inst, const std::vector<int>& states, int t = 0);

/// Every assignment meeting destination exclusivity and the supply constraints, in a fixed
/// order: per type, per destination area the origin choice (none, then B[i][j] ascending).
std::vector<AssignmentVector> enumerate_feasible_assignments(const MabMlInstance& inst, const std::vector<int>& states);

struct OracleResult {
    double opt = 0.0;
    std::int64_t joint_states = 0;
    /// Index into enumerate_feasible_assignments per [t * joint_states + joint].
    std::vector<int> policy;
};

OracleResult exact_optimum(const MabMlInstance& inst);

}  // namespace patrol
