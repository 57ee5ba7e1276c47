#include "patrol/relaxed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "patrol/rng.hpp"

namespace patrol {

double theta(const MabMlInstance& inst, const Multipliers& gamma, int i, int origin, int j, int t) {
    if (!inst.topology.is_coupled(j, origin, i)) return 0.0;
    return gamma.at(origin, j, t) *
           inst.topology.weight[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)][static_cast<std::size_t>(origin)];
}

double relaxed_cost(const MabMlInstance& inst, int i, int j, int s, const std::vector<double>& a, int t,
                    const Multipliers& gamma) {
    if (a.size() != static_cast<std::size_t>(inst.areas()))
        throw std::invalid_argument("relaxed_cost: action vector must have one entry per area");
    double total = 0.0;
    double idle = 1.0;
    double price = 0.0;
    for (int o = 0; o < inst.areas(); ++o) {
        const double v = a[static_cast<std::size_t>(o)];
        if (v < 0.0 || v > 1.0) throw std::invalid_argument("relaxed_cost: action entries must lie in [0, 1]");
        if (v == 0.0) continue;
        if (!inst.topology.is_neighbor(j, i, o))
            throw std::invalid_argument("relaxed_cost: movement from outside the neighborhood");
        total += v;
        idle *= 1.0 - v;
        price += theta(inst, gamma, i, o, j, t) * v;
    }
    if (total > 1.0 + 1e-12) throw std::invalid_argument("relaxed_cost: actions sum above one");
    const auto& sp = inst.spec(i, j);
    return sp.mixed_cost(s, 1.0 - idle, t) + gamma.at(i, j, t) * sp.coupling_value[static_cast<std::size_t>(s)] - price;
}

namespace {

double expect(const KernelRow& row, const double* v) {
    double sum = 0.0;
    for (const auto& tr : row) sum += tr.prob * v[tr.next];
    return sum;
}

struct BestMove {
    int origin = kFree;
    double price = -std::numeric_limits<double>::infinity();
};

// Smallest argmax of theta over the (sorted) neighborhood.
BestMove best_move(const MabMlInstance& inst, const Multipliers& gamma, int i, int j, int t) {
    BestMove best;
    for (int o : inst.topology.neighbors[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]) {
        const double th = theta(inst, gamma, i, o, j, t);
        if (th > best.price) best = {o, th};
    }
    return best;
}

}  // namespace

PairSolution solve_subproblem(const MabMlInstance& inst, int i, int j, const Multipliers& gamma) {
    const auto& sp = inst.spec(i, j);
    const int S = sp.size();
    const int T = inst.horizon;
    PairSolution sol;
    sol.states = S;
    sol.horizon = T;
    sol.value.assign(static_cast<std::size_t>((T + 1) * S), 0.0);
    sol.origin.assign(static_cast<std::size_t>(T * S), kFree);
    for (int t = T - 1; t >= 0; --t) {
        const BestMove move = best_move(inst, gamma, i, j, t);
        const double g_price = gamma.at(i, j, t);
        const double* next = sol.value.data() + static_cast<std::ptrdiff_t>((t + 1) * S);
        for (int s = 0; s < S; ++s) {
            const double base = g_price * sp.coupling_value[static_cast<std::size_t>(s)];
            const double passive = sp.cost_at(s, 0, t) + base + expect(sp.row(s, 0, t), next);
            const double active = sp.cost_at(s, 1, t) + base - move.price + expect(sp.row(s, 1, t), next);
            const auto idx = static_cast<std::size_t>(t * S + s);
            if (active <= passive) {
                sol.value[idx] = active;
                sol.origin[idx] = move.origin;
            } else {
                sol.value[idx] = passive;
            }
        }
    }
    return sol;
}

double vartheta(const MabMlInstance& inst, int i, int j, int s, int t, const std::vector<double>& v_next) {
    const auto& sp = inst.spec(i, j);
    if (v_next.size() != static_cast<std::size_t>(sp.size()))
        throw std::invalid_argument("vartheta: V_next has the wrong length");
    return sp.cost_at(s, 1, t) - sp.cost_at(s, 0, t) + expect(sp.row(s, 1, t), v_next.data()) -
           expect(sp.row(s, 0, t), v_next.data());
}

namespace {

DualEvaluation evaluate(const MabMlInstance& inst, const Multipliers& gamma, bool parallel) {
    const int I = inst.areas();
    const int J = inst.types;
    const int T = inst.horizon;
    const int pairs = I * J;
    DualEvaluation ev;
    ev.pairs.resize(static_cast<std::size_t>(pairs));
    ev.marginals.resize(static_cast<std::size_t>(pairs));
    std::vector<double> pair_value(static_cast<std::size_t>(pairs));

#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int p = 0; p < pairs; ++p) {
        const int i = p / J;
        const int j = p % J;
        const auto& sp = inst.spec(i, j);
        const int S = sp.size();
        PairSolution sol = solve_subproblem(inst, i, j, gamma);
        double v = 0.0;
        for (int s = 0; s < S; ++s) v += sp.initial[static_cast<std::size_t>(s)] * sol.V(s, 0);
        pair_value[static_cast<std::size_t>(p)] = v;

        std::vector<double> mu(static_cast<std::size_t>(T * S), 0.0);
        std::copy(sp.initial.begin(), sp.initial.end(), mu.begin());
        for (int t = 0; t + 1 < T; ++t) {
            const double* cur = mu.data() + static_cast<std::ptrdiff_t>(t * S);
            double* nxt = mu.data() + static_cast<std::ptrdiff_t>((t + 1) * S);
            for (int s = 0; s < S; ++s) {
                if (cur[s] == 0.0) continue;
                const int e = sol.action(s, t) == kFree ? 0 : 1;
                for (const auto& tr : sp.row(s, e, t)) nxt[tr.next] += cur[s] * tr.prob;
            }
        }
        ev.pairs[static_cast<std::size_t>(p)] = std::move(sol);
        ev.marginals[static_cast<std::size_t>(p)] = std::move(mu);
    }

    for (double v : pair_value) ev.value += v;

    ev.subgradient = Multipliers(I, J, T);
    for (int i = 0; i < I; ++i) {
        for (int j = 0; j < J; ++j) {
            const auto p = static_cast<std::size_t>(i * J + j);
            const auto& sp = inst.spec(i, j);
            const int S = sp.size();
            const auto& mu = ev.marginals[p];
            const auto& sol = ev.pairs[p];
            const auto& wrow = inst.topology.weight[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
            for (int t = 0; t < T; ++t) {
                double supply = 0.0;
                for (int s = 0; s < S; ++s)
                    supply += mu[static_cast<std::size_t>(t * S + s)] * sp.coupling_value[static_cast<std::size_t>(s)];
                ev.subgradient.at(i, j, t) += supply;
                // movements into i are charged to their origin's constraint
                for (int s = 0; s < S; ++s) {
                    const int o = sol.action(s, t);
                    const double m = mu[static_cast<std::size_t>(t * S + s)];
                    if (o == kFree || m == 0.0 || !inst.topology.is_coupled(j, o, i)) continue;
                    ev.subgradient.at(o, j, t) -= wrow[static_cast<std::size_t>(o)] * m;
                }
            }
        }
    }
    return ev;
}

}  // namespace

DualEvaluation dual_value(const MabMlInstance& inst, const Multipliers& gamma) { return evaluate(inst, gamma, true); }

DualEvaluation dual_value_serial(const MabMlInstance& inst, const Multipliers& gamma) {
    return evaluate(inst, gamma, false);
}

double jitter_value(int i, int j, int s, int e, int t, double scale) {
    std::uint64_t h = mix64(0x6a09e667f3bcc909ULL ^ static_cast<std::uint64_t>(i));
    h = mix64(h ^ static_cast<std::uint64_t>(j));
    h = mix64(h ^ static_cast<std::uint64_t>(s));
    h = mix64(h ^ static_cast<std::uint64_t>(e));
    h = mix64(h ^ static_cast<std::uint64_t>(t));
    const double u = (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
    return scale * u;
}

MabMlInstance apply_jitter(const MabMlInstance& inst, double scale) {
    MabMlInstance out = inst;
    if (scale == 0.0) return out;
    for (int i = 0; i < inst.areas(); ++i) {
        for (int j = 0; j < inst.types; ++j) {
            const auto& src = inst.spec(i, j);
            auto& dst = out.spec(i, j);
            const int S = src.size();
            dst.cost.assign(static_cast<std::size_t>(inst.horizon), std::vector<std::array<double, 2>>(static_cast<std::size_t>(S)));
            for (int t = 0; t < inst.horizon; ++t)
                for (int s = 0; s < S; ++s)
                    for (int e = 0; e < 2; ++e)
                        dst.cost[static_cast<std::size_t>(t)][static_cast<std::size_t>(s)][static_cast<std::size_t>(e)] =
                            src.cost_at(s, e, t) + jitter_value(i, j, s, e, t, scale);
        }
    }
    return out;
}

double max_cost(const MabMlInstance& inst) {
    double m = 0.0;
    for (const auto& sp : inst.specs)
        for (const auto& layer : sp.cost)
            for (const auto& c : layer) m = std::max({m, std::abs(c[0]), std::abs(c[1])});
    return m;
}

double mean_abs_cost(const MabMlInstance& inst) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& sp : inst.specs)
        for (const auto& layer : sp.cost)
            for (const auto& c : layer) {
                sum += std::abs(c[0]) + std::abs(c[1]);
                n += 2;
            }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

namespace {

double norm_inf(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

namespace {

using Evaluator = DualEvaluation (*)(const MabMlInstance&, const Multipliers&);

struct AscentResult {
    Multipliers gamma;
    DualEvaluation best;
    int iterations = 0;
    std::vector<double> trace;
};

AscentResult subgradient_ascent(const MabMlInstance& inst, const SolverOptions& options, double step_scale,
                                Evaluator eval) {
    AscentResult out;
    Multipliers gamma(inst.areas(), inst.types, inst.horizon);
    DualEvaluation current = eval(inst, gamma);
    if (!std::isfinite(current.value)) throw std::runtime_error("maximize_dual: non-finite dual value");
    const double c0 = step_scale / (1.0 + norm2(current.subgradient.values));
    out.gamma = gamma;
    out.best = current;
    // step-weighted average of the iterates over the second half of the run
    Multipliers average(inst.areas(), inst.types, inst.horizon);
    double weight = 0.0;
    int quiet = 0;
    int k = 1;
    for (;; ++k) {
        out.trace.push_back(out.best.value);
        quiet = norm_inf(current.subgradient.values) < options.tol ? quiet + 1 : 0;
        if (quiet >= options.window || k >= options.max_iters) break;
        const double step = c0 / std::sqrt(static_cast<double>(k));
        for (std::size_t n = 0; n < gamma.values.size(); ++n) gamma.values[n] += step * current.subgradient.values[n];
        current = eval(inst, gamma);
        if (!std::isfinite(current.value)) throw std::runtime_error("maximize_dual: non-finite dual value");
        if (current.value > out.best.value) {
            out.best = current;
            out.gamma = gamma;
        }
        if (2 * k > options.max_iters) {
            weight += step;
            for (std::size_t n = 0; n < gamma.values.size(); ++n) average.values[n] += step * gamma.values[n];
        }
    }
    if (weight > 0.0) {
        for (double& x : average.values) x /= weight;
        DualEvaluation averaged = eval(inst, average);
        if (std::isfinite(averaged.value) && averaged.value > out.best.value) {
            out.best = std::move(averaged);
            out.gamma = average;
            out.trace.push_back(out.best.value);
        }
    }
    out.iterations = k;
    return out;
}

}  // namespace

DualSolution maximize_dual(const MabMlInstance& inst, const SolverOptions& options) {
    if (auto violations = validate_instance(inst); !violations.empty())
        throw std::invalid_argument("maximize_dual: invalid instance (" + violations.front().invariant + ": " +
                                    violations.front().detail + ")");
    if (options.max_iters < 1) throw std::invalid_argument("maximize_dual: max_iters must be positive");

    const Evaluator eval = options.parallel ? &dual_value : &dual_value_serial;
    DualSolution out;
    out.fingerprint = inst.fingerprint();
    out.jitter_scale = options.jitter * max_cost(inst);
    const MabMlInstance jittered = apply_jitter(inst, out.jitter_scale);
    double step_scale =
        options.step_scale >= 0.0 ? options.step_scale : 0.5 * inst.horizon * mean_abs_cost(inst);
    if (step_scale <= 0.0) step_scale = 1.0;

    AscentResult res = subgradient_ascent(jittered, options, step_scale, eval);
    out.iterations = res.iterations;
    out.gamma = res.gamma;
    out.jittered_value = res.best.value;
    out.residual = norm_inf(res.best.subgradient.values);
    out.best_dual_trace = std::move(res.trace);
    out.values = std::move(res.best.pairs);
    out.lower_bound = eval(inst, out.gamma).value;
    return out;
}

double bellman_residual(const MabMlInstance& inst, const Multipliers& gamma, const std::vector<PairSolution>& values) {
    double worst = 0.0;
    for (int i = 0; i < inst.areas(); ++i) {
        for (int j = 0; j < inst.types; ++j) {
            const auto& sp = inst.spec(i, j);
            const auto& sol = values[static_cast<std::size_t>(i * inst.types + j)];
            const int S = sp.size();
            for (int s = 0; s < S; ++s)
                worst = std::max(worst, std::abs(sol.V(s, inst.horizon)));
            for (int t = 0; t < inst.horizon; ++t) {
                // independent of the solver: enumerate every single-origin action
                const double* next = sol.value.data() + static_cast<std::ptrdiff_t>((t + 1) * S);
                for (int s = 0; s < S; ++s) {
                    const double base = gamma.at(i, j, t) * sp.coupling_value[static_cast<std::size_t>(s)];
                    double best = sp.cost_at(s, 0, t) + base + expect(sp.row(s, 0, t), next);
                    const double active = sp.cost_at(s, 1, t) + base + expect(sp.row(s, 1, t), next);
                    for (int o : inst.topology.neighbors[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)])
                        best = std::min(best, active - theta(inst, gamma, i, o, j, t));
                    worst = std::max(worst, std::abs(sol.V(s, t) - best));
                }
            }
        }
    }
    return worst;
}

}  // namespace patrol
