#pragma once

// Lagrangian relaxation: per-pair backward induction, the dual function and its
// maximization by subgradient ascent with tail averaging of the iterates.

#include <cstdint>
#include <vector>

#include "patrol/model.hpp"

namespace patrol {

/// gamma[i][j][t] flattened as [(i * types + j) * horizon + t].
struct Multipliers {
    int areas = 0;
    int types = 0;
    int horizon = 0;
    std::vector<double> values;

    Multipliers() = default;
    Multipliers(int areas_, int types_, int horizon_, double fill = 0.0)
        : areas(areas_), types(types_), horizon(horizon_),
          values(static_cast<std::size_t>(areas_ * types_ * horizon_), fill) {}
    double& at(int i, int j, int t) { return values[static_cast<std::size_t>((i * types + j) * horizon + t)]; }
    double at(int i, int j, int t) const { return values[static_cast<std::size_t>((i * types + j) * horizon + t)]; }
};

/// Optimal sub-policy and value table of one (i, j) pair.
struct PairSolution {
    int states = 0;
    int horizon = 0;
    std::vector<double> value;  ///< V[t * states + s], t in [0, horizon]; V(., horizon) = 0
    std::vector<int> origin;    ///< chosen origin i* per [t * states + s], or kFree when passive

    double V(int s, int t) const { return value[static_cast<std::size_t>(t * states + s)]; }
    int action(int s, int t) const { return origin[static_cast<std::size_t>(t * states + s)]; }
};

/// Movement price theta(i, i', j, t): gamma[i'][j][t] * w when (i <- i') is coupled to i', else 0.
double theta(const MabMlInstance& inst, const Multipliers& gamma, int i, int origin, int j, int t);

/// Relaxed one-slot cost for action vector a over origins (a[o] for every area o; zero outside B).
double relaxed_cost(const MabMlInstance& inst, int i, int j, int s, const std::vector<double>& a, int t,
                    const Multipliers& gamma);

/// Backward induction with the passive / best-active reduction. Ties go to the active candidate.
PairSolution solve_subproblem(const MabMlInstance& inst, int i, int j, const Multipliers& gamma);

/// c(s,1,t) - c(s,0,t) + sum_s' (P(s,1,s') - P(s,0,s')) V_next(s').
double vartheta(const MabMlInstance& inst, int i, int j, int s, int t, const std::vector<double>& v_next);

struct DualEvaluation {
    double value = 0.0;                 ///< L(gamma)
    std::vector<PairSolution> pairs;    ///< [i * types + j]
    std::vector<std::vector<double>> marginals;  ///< per pair, mu[t * states + s] for t in [0, horizon)
    Multipliers subgradient;            ///< dL/dgamma
};

/// Solves every pair sub-problem (OpenMP over pairs) and forward-propagates marginals.
DualEvaluation dual_value(const MabMlInstance& inst, const Multipliers& gamma);
/// Single-threaded reference of dual_value; results are bitwise identical.
DualEvaluation dual_value_serial(const MabMlInstance& inst, const Multipliers& gamma);

/// Deterministic per-(i, j, s, e, t) cost perturbation in (0, scale). Returns a copy with
/// one cost layer per slot.
MabMlInstance apply_jitter(const MabMlInstance& inst, double scale);
double jitter_value(int i, int j, int s, int e, int t, double scale);
double max_cost(const MabMlInstance& inst);
double mean_abs_cost(const MabMlInstance& inst);

struct SolverOptions {
    int max_iters = 20000;
    double tol = 1e-4;           ///< subgradient: max-norm stop threshold
    int window = 5;              ///< consecutive small-subgradient iterations required to stop
    double step_scale = -1.0;    ///< c0 numerator; negative selects horizon * mean |cost| / 2
    double jitter = 1e-6;        ///< relative to the largest cost; 0 disables
    bool parallel = true;
};

struct DualSolution {
    Multipliers gamma;
    std::vector<PairSolution> values;  ///< V* of the jittered instance at gamma
    double lower_bound = 0.0;          ///< un-jittered L(gamma)
    double jittered_value = 0.0;       ///< sum pi0 V* (jittered costs)
    int iterations = 0;
    std::vector<double> best_dual_trace;
    double residual = 0.0;             ///< max |subgradient| at gamma
    double jitter_scale = 0.0;         ///< absolute jitter bound used
    std::uint64_t fingerprint = 0;
};

DualSolution maximize_dual(const MabMlInstance& inst, const SolverOptions& options = {});

/// Largest |V(s,t) - min(passive, active)| over all pairs, states and slots.
double bellman_residual(const MabMlInstance& inst, const Multipliers& gamma, const std::vector<PairSolution>& values);

}  // namespace patrol
