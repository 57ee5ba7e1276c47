#pragma once

// Crime-detection specialization: beta-parameter knowledge with alpha + beta = 50,
// patrol-case topology and the randomized case generators.

#include <cstdint>
#include <string>
#include <vector>

#include "patrol/model.hpp"

namespace patrol {

inline constexpr int kCrimeTotal = 50;
inline constexpr int kCrimeStates = 2 * (kCrimeTotal + 1);

/// floor(50 * alpha / (alpha + beta)).
int normalize(int alpha, int beta);

/// Dense state index of (alpha, indicator) in a full crime pair.
constexpr int crime_state(int alpha, int indicator) { return alpha * 2 + indicator; }

struct CrimeParams {
    int areas = 0;
    int types = 2;
    int horizon = 10;
    double cost_scale = 100.0;
    /// Per (i * types + j).
    std::vector<int> delta1_alpha;
    std::vector<int> delta2_alpha;
    std::vector<int> delta_beta;
    std::vector<int> alpha0;
    std::vector<double> indicator_init;
    std::vector<int> base_counts;  ///< M0[j]

    std::size_t pair(int i, int j) const { return static_cast<std::size_t>(i * types + j); }
    int beta0(int i, int j) const { return kCrimeTotal - alpha0[pair(i, j)]; }
};

/// Kernel, costs, g and pi0 for pair (i, j). Knowledge code is alpha.
PairProcessSpec crime_kernel(const CrimeParams& params, int i, int j);

MabMlInstance build_crime_instance(const Topology& topology, const CrimeParams& params);

struct CrimeCase {
    MabMlInstance instance;
    CrimeParams params;
};

/// Undirected 1-based edge list ("i j" per line, '#' comments).
std::vector<std::pair<int, int>> read_edge_file(const std::string& path, int areas);

/// Directory holding case6.txt, case10.txt, case14.txt.
std::string default_topology_dir();

/// Case I/II/III (case_id 6, 10 or 14) with deltas, M0 and initial indicators drawn from `seed`.
CrimeCase build_case(int case_id, std::uint64_t seed, const std::string& topology_dir = default_topology_dir());

/// Tabulated (alpha0, beta0) rows; alpha0 for areas 1..14 of both agent types.
int table_alpha0(int i, int j);

/// Place 20*M0[j] virtual agents uniformly over areas (at most 20 per area).
/// Returns indicator_init flattened as [i * types + j].
std::vector<double> sample_initial_indicators(const std::vector<int>& base_counts, int areas, std::uint64_t seed);

/// Fixed initial probabilities P(indicator = 1) for the three cases, flattened [i * 2 + j].
std::vector<double> fixed_indicator_probabilities(int case_id);

/// Reduced crime pair for the brute-force oracle: crime rules, then successor alpha
/// snapped to the nearest entry of `levels` (ties to the lower level).
struct ReducedCrimeSpec {
    std::vector<int> levels;  ///< sorted alpha values
    int delta1_alpha = 4;
    int delta2_alpha = 7;
    int delta_beta = 3;
    double cost_scale = 100.0;
};

int snap_level(const std::vector<int>& levels, int alpha);

/// J = 1 patrol instance over `topology` with per-area alpha0 (must be levels) and indicator probabilities.
MabMlInstance build_reduced_instance(const Topology& topology, const ReducedCrimeSpec& spec,
                                     const std::vector<int>& alpha0, const std::vector<double>& indicator_init,
                                     int horizon);

}  // namespace patrol
