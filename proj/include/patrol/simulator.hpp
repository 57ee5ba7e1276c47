#pragma once

// Scaled patrol system: h sub-areas per area, slot-by-slot dynamics under a policy and
// Monte Carlo aggregation of the 1/h-normalized cost.

#include <cstdint>
#include <string>
#include <vector>

#include "patrol/index.hpp"
#include "patrol/model.hpp"
#include "patrol/rng.hpp"

namespace patrol {

enum class PolicyKind { index, mai, greedy, random };

std::string to_string(PolicyKind policy);
/// Throws std::invalid_argument for unknown names.
PolicyKind parse_policy(const std::string& name);

/// Every sub-process draws its initial state from pi0, in (j, i, k) order.
ScaledWorldState init_world(const MabMlInstance& inst, int h, Rng& rng);
ScaledWorldState init_world(const MabMlInstance& inst, int h, std::uint64_t episode_seed);

/// e per sub-area [(i * types + j) * h + k]: 1 when some move targets it.
std::vector<char> activations(const MabMlInstance& inst, int h, const AssignmentVector& assignment);

struct StepResult {
    ScaledWorldState next;
    double cost = 0.0;  ///< (1/h) sum of c(s, e, t)
};

/// Charges c(s, e, t) at the current states, then samples successors in (j, i, k) order.
StepResult step(const MabMlInstance& inst, const ScaledWorldState& world, const std::vector<char>& active, Rng& rng);
StepResult step(const MabMlInstance& inst, const ScaledWorldState& world, const AssignmentVector& assignment, Rng& rng);

struct EpisodeResult {
    double normalized_total_cost = 0.0;
    std::vector<char> feasible;  ///< per slot
    int adapted = 0;             ///< assignments changed by adaption, summed over slots
    int stranded = 0;            ///< index policy: agents left without a move, summed over slots
    int collisions = 0;          ///< index policy: stranded agents whose own sub-area was already claimed
    double adapted_fraction = 0.0;  ///< adapted / (h * T)

    bool all_feasible() const;
};

/// Index table (index and mai policies) for the instance being simulated.
struct SolvedArtifacts {
    const IndexTable* indices = nullptr;
};

/// One episode of T slots. The raw index policy leaves stranded agents in place: active
/// on their own sub-area when it is unclaimed, otherwise passive and counted as a collision.
EpisodeResult run_episode(const MabMlInstance& inst, int h, PolicyKind policy, const SolvedArtifacts& artifacts,
                          std::uint64_t episode_seed);

struct MonteCarloSummary {
    int runs = 0;
    double mean = 0.0;
    double stddev = 0.0;
    double ci_halfwidth = 0.0;  ///< 95% Student-t
    double lower_bound = 0.0;
    double deviation = 0.0;     ///< (mean - lower_bound) / lower_bound
    double adapted_fraction = 0.0;  ///< mean over runs
    int infeasible_slots = 0;
    bool under_sampled = false;     ///< ci_halfwidth / mean > 0.03
};

struct MonteCarloResult {
    std::vector<EpisodeResult> episodes;
    MonteCarloSummary summary;
};

MonteCarloSummary summarize(const std::vector<EpisodeResult>& episodes, double lower_bound);

/// Episode e uses seed derive_seed(master_seed, e); results do not depend on thread count.
MonteCarloResult monte_carlo(const MabMlInstance& inst, int h, PolicyKind policy, const SolvedArtifacts& artifacts,
                             int runs, std::uint64_t master_seed, double lower_bound);
MonteCarloResult monte_carlo_serial(const MabMlInstance& inst, int h, PolicyKind policy,
                                    const SolvedArtifacts& artifacts, int runs, std::uint64_t master_seed,
                                    double lower_bound);

}  // namespace patrol
