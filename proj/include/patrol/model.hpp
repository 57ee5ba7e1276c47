#pragma once

// Generic multi-action bandit model with linear coupling constraints
// (MAB-ML): instance description, per-slot assignments and feasibility.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace patrol {

/// Marker for a destination sub-area with no incoming assignment.
inline constexpr int kFree = -1;

/// Area adjacency per agent type. All indices are 0-based.
struct Topology {
    int areas = 0;
    /// neighbors[j][i]: areas a type-j agent in area i may move to (sorted, includes i).
    std::vector<std::vector<std::vector<int>>> neighbors;
    /// coupling[j][i]: destinations whose movements count against the supply of area i.
    std::vector<std::vector<std::vector<int>>> coupling;
    /// weight[j][dest][origin]: coefficient of a (dest <- origin) movement in the
    /// supply constraint of `origin`.
    std::vector<std::vector<std::vector<double>>> weight;

    int types() const { return static_cast<int>(neighbors.size()); }
    bool is_neighbor(int j, int i, int other) const;
    bool is_coupled(int j, int origin, int dest) const;

    /// Patrol specialization: coupling = neighbors, all weights 1, self-loops added.
    /// `edges` are undirected 0-based pairs shared by every agent type.
    static Topology patrol(int areas, int types, const std::vector<std::pair<int, int>>& edges);
};

struct SubState {
    int knowledge = 0;  ///< opaque knowledge code (alpha for the crime model)
    int indicator = 0;  ///< 1 when the sub-area hosts an agent at the start of the slot

    friend bool operator==(const SubState&, const SubState&) = default;
};

struct Transition {
    int next = 0;
    double prob = 0.0;
};

using KernelRow = std::vector<Transition>;

/// One (area, agent type) process: states, per-action kernel rows and costs.
///
/// Kernels and costs are either time-homogeneous (one layer) or carry one
/// layer per slot. Fractional activations mix the e=0 and e=1 rows linearly.
struct PairProcessSpec {
    std::vector<SubState> states;
    /// kernel[layer][s][e]
    std::vector<std::vector<std::array<KernelRow, 2>>> kernel;
    /// cost[layer][s][e]
    std::vector<std::vector<std::array<double, 2>>> cost;
    std::vector<double> coupling_value;  ///< g(s)
    std::vector<double> initial;         ///< pi0(s)

    int size() const { return static_cast<int>(states.size()); }
    const KernelRow& row(int s, int e, int t) const;
    double cost_at(int s, int e, int t) const;
    /// c(s, e, t) for e in [0, 1].
    double mixed_cost(int s, double e, int t) const;
    /// Dense P_t(s, e, .) for e in [0, 1].
    std::vector<double> mixed_row(int s, double e, int t) const;
    int index_of(const SubState& state) const;  ///< -1 when absent
};

struct MabMlInstance {
    Topology topology;
    int types = 0;
    int horizon = 0;
    std::vector<PairProcessSpec> specs;  ///< flattened [i * types + j]
    std::vector<int> base_counts;        ///< M0[j]

    int areas() const { return topology.areas; }
    const PairProcessSpec& spec(int i, int j) const { return specs[static_cast<std::size_t>(i * types + j)]; }
    PairProcessSpec& spec(int i, int j) { return specs[static_cast<std::size_t>(i * types + j)]; }
    bool is_patrol() const;
    /// Hash over topology, kernels, costs and pi0; shared between solver output and simulator input.
    std::uint64_t fingerprint() const;
};

struct Violation {
    std::string invariant;
    int i = -1;
    int j = -1;
    int t = -1;
    int s = -1;
    std::string detail;
};

std::vector<Violation> validate_instance(const MabMlInstance& inst);

/// Joint state of all I*J*h sub-processes at one slot (state indices into each pair's space).
struct ScaledWorldState {
    int areas = 0;
    int types = 0;
    int h = 1;
    int t = 0;  ///< 0-based slot
    std::vector<int> states;  ///< [(i * types + j) * h + k]

    ScaledWorldState() = default;
    ScaledWorldState(int areas_, int types_, int h_);
    int& at(int i, int j, int k) { return states[static_cast<std::size_t>((i * types + j) * h + k)]; }
    int at(int i, int j, int k) const { return states[static_cast<std::size_t>((i * types + j) * h + k)]; }
};

struct Move {
    int dest = 0;    ///< destination area
    int sub = 0;     ///< destination sub-area index k
    int origin = 0;  ///< origin area

    friend bool operator==(const Move&, const Move&) = default;
};

/// Binary action variables a[dest][sub][origin][j] stored as per-type move lists.
struct AssignmentVector {
    std::vector<std::vector<Move>> moves;  ///< moves[j]

    AssignmentVector() = default;
    explicit AssignmentVector(int types) : moves(static_cast<std::size_t>(types)) {}
    /// origin per destination sub-area of type j (kFree when unclaimed); duplicates keep the last.
    std::vector<int> origin_map(int j, int areas, int h) const;
    std::size_t total_moves() const;
};

/// Agents of type j present in area i at the start of the slot.
double area_supply(const MabMlInstance& inst, const ScaledWorldState& world, int i, int j);

struct FeasibilityReport {
    int duplicate_destinations = 0;  ///< sub-areas receiving more than one type-j agent
    int out_of_neighborhood = 0;     ///< moves whose origin is not in B[dest][j]
    int supply_mismatches = 0;       ///< (i, j) whose outgoing weight differs from sum of g
    bool ok() const { return duplicate_destinations == 0 && out_of_neighborhood == 0 && supply_mismatches == 0; }
};

FeasibilityReport feasibility_report(const MabMlInstance& inst, int h, const ScaledWorldState& world,
                                     const AssignmentVector& assignment);

bool check_feasibility(const MabMlInstance& inst, int h, const ScaledWorldState& world,
                       const AssignmentVector& assignment);

}  // namespace patrol
