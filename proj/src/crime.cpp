#include "patrol/crime.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "patrol/rng.hpp"

#ifndef PATROL_DATA_DIR
#define PATROL_DATA_DIR "data"
#endif

namespace patrol {

int normalize(int alpha, int beta) {
    if (alpha < 0 || beta < 0) throw std::invalid_argument("normalize: negative parameter");
    if (alpha + beta == 0) throw std::invalid_argument("normalize: alpha + beta must be positive");
    return static_cast<int>((static_cast<long long>(kCrimeTotal) * alpha) / (alpha + beta));
}

namespace {

void add_transition(KernelRow& row, int next, double prob) {
    if (prob == 0.0) return;
    for (auto& tr : row)
        if (tr.next == next) {
            tr.prob += prob;
            return;
        }
    row.push_back({next, prob});
}

// Successor alphas of the four crime rules: {patrolled & crime, patrolled & none,
// unpatrolled & crime, unpatrolled & none}.
struct Successors {
    int active_hit, active_miss, passive_hit, passive_miss;
};

Successors crime_successors(int alpha, int d1, int d2, int db) {
    const int beta = kCrimeTotal - alpha;
    return {normalize(alpha, beta + db), normalize(alpha + d1, beta), normalize(alpha + d2, beta), alpha};
}

// Probabilities as exact ratios over 50, so each row adds to exactly one.
std::array<double, 2> hit_probs(int alpha) {
    return {static_cast<double>(alpha) / kCrimeTotal, static_cast<double>(kCrimeTotal - alpha) / kCrimeTotal};
}

}  // namespace

PairProcessSpec crime_kernel(const CrimeParams& params, int i, int j) {
    const std::size_t p = params.pair(i, j);
    const int d1 = params.delta1_alpha[p];
    const int d2 = params.delta2_alpha[p];
    const int db = params.delta_beta[p];
    const int a0 = params.alpha0[p];
    const double init = params.indicator_init[p];
    if (a0 < 0 || a0 > kCrimeTotal) throw std::invalid_argument("crime_kernel: alpha0 outside [0, 50]");
    if (init < 0.0 || init > 1.0) throw std::invalid_argument("crime_kernel: indicator_init outside [0, 1]");

    PairProcessSpec spec;
    spec.states.reserve(kCrimeStates);
    for (int a = 0; a <= kCrimeTotal; ++a)
        for (int ind = 0; ind < 2; ++ind) spec.states.push_back({a, ind});
    spec.kernel.assign(1, std::vector<std::array<KernelRow, 2>>(kCrimeStates));
    spec.cost.assign(1, std::vector<std::array<double, 2>>(kCrimeStates));
    spec.coupling_value.resize(kCrimeStates);
    spec.initial.assign(kCrimeStates, 0.0);

    for (int a = 0; a <= kCrimeTotal; ++a) {
        const Successors nx = crime_successors(a, d1, d2, db);
        const auto [q, nq] = hit_probs(a);
        const double c = params.cost_scale * a / kCrimeTotal;
        for (int ind = 0; ind < 2; ++ind) {
            const int s = crime_state(a, ind);
            auto& rows = spec.kernel[0][static_cast<std::size_t>(s)];
            add_transition(rows[1], crime_state(nx.active_hit, 1), q);
            add_transition(rows[1], crime_state(nx.active_miss, 1), nq);
            add_transition(rows[0], crime_state(nx.passive_hit, 0), q);
            add_transition(rows[0], crime_state(nx.passive_miss, 0), nq);
            spec.cost[0][static_cast<std::size_t>(s)] = {c, c};
            spec.coupling_value[static_cast<std::size_t>(s)] = ind;
        }
    }
    spec.initial[static_cast<std::size_t>(crime_state(a0, 1))] = init;
    spec.initial[static_cast<std::size_t>(crime_state(a0, 0))] = 1.0 - init;
    return spec;
}

MabMlInstance build_crime_instance(const Topology& topology, const CrimeParams& params) {
    const std::size_t n = static_cast<std::size_t>(params.areas * params.types);
    if (topology.areas != params.areas || topology.types() != params.types || params.delta1_alpha.size() != n ||
        params.delta2_alpha.size() != n || params.delta_beta.size() != n || params.alpha0.size() != n ||
        params.indicator_init.size() != n || params.base_counts.size() != static_cast<std::size_t>(params.types))
        throw std::invalid_argument("crime parameters do not match the topology dimensions");
    MabMlInstance inst;
    inst.topology = topology;
    inst.types = params.types;
    inst.horizon = params.horizon;
    inst.base_counts = params.base_counts;
    inst.specs.reserve(n);
    for (int i = 0; i < params.areas; ++i)
        for (int j = 0; j < params.types; ++j) inst.specs.push_back(crime_kernel(params, i, j));
    return inst;
}

std::vector<std::pair<int, int>> read_edge_file(const std::string& path, int areas) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open topology file: " + path);
    std::vector<std::pair<int, int>> edges;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        int a = 0;
        int b = 0;
        if (!(ls >> a)) continue;
        if (!(ls >> b) || a < 1 || b < 1 || a > areas || b > areas)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed edge");
        edges.emplace_back(a - 1, b - 1);
    }
    return edges;
}

std::string default_topology_dir() { return std::string(PATROL_DATA_DIR) + "/topology"; }

namespace {

// alpha0 per area for agent types 1 and 2; beta0 = 50 - alpha0. Row 13 type 2 is
// tabulated as (22, 46) and stored normalized.
constexpr int kAlpha0[14][2] = {{2, 4},  {2, 4},  {4, 32}, {3, 33}, {4, 50}, {3, 34}, {4, 26},
                                {3, 11}, {3, 9},  {5, 10}, {4, 22}, {2, 22}, {2, 16}, {4, 25}};

constexpr double kFixedCase6[2][6] = {{.1, .25, .1, .15, .2, .2}, {.5, .5, .65, .2, .45, .7}};
constexpr double kFixedCase10[2][10] = {{.05, .1, .45, .15, .1, .2, .15, .4, .3, .1},
                                        {.3, .6, .3, .55, .45, .75, .65, .6, .35, .45}};
constexpr double kFixedCase14[2][14] = {{.25, 0, .15, .05, .15, .2, .15, .1, .1, .15, .25, .2, .1, .15},
                                        {.35, .35, .25, .25, .35, .3, .45, .2, .35, .3, .35, .45, .45, .6}};

}  // namespace

int table_alpha0(int i, int j) {
    if (i < 0 || i >= 14 || j < 0 || j >= 2) throw std::out_of_range("table_alpha0 index");
    return kAlpha0[i][j];
}

std::vector<double> sample_initial_indicators(const std::vector<int>& base_counts, int areas, std::uint64_t seed) {
    const int types = static_cast<int>(base_counts.size());
    std::vector<double> out(static_cast<std::size_t>(areas * types), 0.0);
    Rng rng(seed);
    for (int j = 0; j < types; ++j) {
        const int m0 = base_counts[static_cast<std::size_t>(j)];
        if (m0 < 1) throw std::invalid_argument("sample_initial_indicators: M0 must be positive");
        if (m0 > areas) throw std::invalid_argument("sample_initial_indicators: more virtual agents than capacity");
        std::vector<int> open(static_cast<std::size_t>(areas));
        for (int i = 0; i < areas; ++i) open[static_cast<std::size_t>(i)] = i;
        std::vector<int> count(static_cast<std::size_t>(areas), 0);
        for (int v = 0; v < 20 * m0; ++v) {
            const auto pos = static_cast<std::size_t>(rng.below(open.size()));
            const int area = open[pos];
            if (++count[static_cast<std::size_t>(area)] == 20) open.erase(open.begin() + static_cast<std::ptrdiff_t>(pos));
        }
        for (int i = 0; i < areas; ++i)
            out[static_cast<std::size_t>(i * types + j)] = count[static_cast<std::size_t>(i)] / 20.0;
    }
    return out;
}

std::vector<double> fixed_indicator_probabilities(int case_id) {
    const double* rows[2];
    int areas = 0;
    switch (case_id) {
        case 6: rows[0] = kFixedCase6[0]; rows[1] = kFixedCase6[1]; areas = 6; break;
        case 10: rows[0] = kFixedCase10[0]; rows[1] = kFixedCase10[1]; areas = 10; break;
        case 14: rows[0] = kFixedCase14[0]; rows[1] = kFixedCase14[1]; areas = 14; break;
        default: throw std::invalid_argument("unknown case id " + std::to_string(case_id));
    }
    std::vector<double> out(static_cast<std::size_t>(areas * 2));
    for (int i = 0; i < areas; ++i)
        for (int j = 0; j < 2; ++j) out[static_cast<std::size_t>(i * 2 + j)] = rows[j][i];
    return out;
}

CrimeCase build_case(int case_id, std::uint64_t seed, const std::string& topology_dir) {
    if (case_id != 6 && case_id != 10 && case_id != 14)
        throw std::invalid_argument("unknown case id " + std::to_string(case_id) + " (expected 6, 10 or 14)");
    const int areas = case_id;
    const int types = 2;
    const auto edges = read_edge_file(topology_dir + "/case" + std::to_string(case_id) + ".txt", areas);

    CrimeParams params;
    params.areas = areas;
    params.types = types;
    params.horizon = 10;
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(case_id)));
    const int d1 = 2 + static_cast<int>(rng.below(5));
    const int d2 = 5 + static_cast<int>(rng.below(5));
    const int db = 1 + static_cast<int>(rng.below(5));
    const std::size_t n = static_cast<std::size_t>(areas * types);
    params.delta1_alpha.assign(n, d1);
    params.delta2_alpha.assign(n, d2);
    params.delta_beta.assign(n, db);
    params.base_counts.resize(types);
    for (auto& m : params.base_counts) m = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(areas / 2)));
    params.alpha0.resize(n);
    for (int i = 0; i < areas; ++i)
        for (int j = 0; j < types; ++j) params.alpha0[params.pair(i, j)] = table_alpha0(i, j);
    params.indicator_init = sample_initial_indicators(params.base_counts, areas, rng());

    CrimeCase out;
    out.instance = build_crime_instance(Topology::patrol(areas, types, edges), params);
    out.params = std::move(params);
    return out;
}

int snap_level(const std::vector<int>& levels, int alpha) {
    int best = levels.front();
    for (int l : levels)
        if (std::abs(l - alpha) < std::abs(best - alpha)) best = l;
    return best;
}

MabMlInstance build_reduced_instance(const Topology& topology, const ReducedCrimeSpec& spec,
                                     const std::vector<int>& alpha0, const std::vector<double>& indicator_init,
                                     int horizon) {
    const int areas = topology.areas;
    if (spec.levels.empty() || !std::is_sorted(spec.levels.begin(), spec.levels.end()))
        throw std::invalid_argument("reduced levels must be nonempty and sorted");
    if (alpha0.size() != static_cast<std::size_t>(areas) || indicator_init.size() != static_cast<std::size_t>(areas))
        throw std::invalid_argument("reduced instance: per-area vectors must have one entry per area");
    const int L = static_cast<int>(spec.levels.size());
    auto level_index = [&](int alpha) {
        return static_cast<int>(std::find(spec.levels.begin(), spec.levels.end(), alpha) - spec.levels.begin());
    };

    PairProcessSpec base;
    base.kernel.assign(1, std::vector<std::array<KernelRow, 2>>(static_cast<std::size_t>(2 * L)));
    base.cost.assign(1, std::vector<std::array<double, 2>>(static_cast<std::size_t>(2 * L)));
    for (int l = 0; l < L; ++l) {
        const int a = spec.levels[static_cast<std::size_t>(l)];
        const Successors nx = crime_successors(a, spec.delta1_alpha, spec.delta2_alpha, spec.delta_beta);
        const auto [q, nq] = hit_probs(a);
        const double c = spec.cost_scale * a / kCrimeTotal;
        for (int ind = 0; ind < 2; ++ind) {
            base.states.push_back({a, ind});
            const auto s = static_cast<std::size_t>(l * 2 + ind);
            auto& rows = base.kernel[0][s];
            add_transition(rows[1], level_index(snap_level(spec.levels, nx.active_hit)) * 2 + 1, q);
            add_transition(rows[1], level_index(snap_level(spec.levels, nx.active_miss)) * 2 + 1, nq);
            add_transition(rows[0], level_index(snap_level(spec.levels, nx.passive_hit)) * 2, q);
            add_transition(rows[0], level_index(snap_level(spec.levels, nx.passive_miss)) * 2, nq);
            base.cost[0][s] = {c, c};
            base.coupling_value.push_back(ind);
        }
    }

    MabMlInstance inst;
    inst.topology = topology;
    inst.types = 1;
    inst.horizon = horizon;
    int agents = 0;
    for (double p : indicator_init) agents += p > 0.0 ? 1 : 0;
    inst.base_counts = {std::max(1, agents)};
    for (int i = 0; i < areas; ++i) {
        PairProcessSpec sp = base;
        const int l = level_index(alpha0[static_cast<std::size_t>(i)]);
        if (l == L) throw std::invalid_argument("reduced instance: alpha0 is not a configured level");
        sp.initial.assign(static_cast<std::size_t>(2 * L), 0.0);
        sp.initial[static_cast<std::size_t>(l * 2 + 1)] = indicator_init[static_cast<std::size_t>(i)];
        sp.initial[static_cast<std::size_t>(l * 2)] = 1.0 - indicator_init[static_cast<std::size_t>(i)];
        inst.specs.push_back(std::move(sp));
    }
    return inst;
}

}  // namespace patrol
