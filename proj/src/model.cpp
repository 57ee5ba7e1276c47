#include "patrol/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "patrol/rng.hpp"

namespace patrol {

bool Topology::is_neighbor(int j, int i, int other) const {
    const auto& nb = neighbors[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    return std::binary_search(nb.begin(), nb.end(), other);
}

bool Topology::is_coupled(int j, int origin, int dest) const {
    const auto& cp = coupling[static_cast<std::size_t>(j)][static_cast<std::size_t>(origin)];
    return std::find(cp.begin(), cp.end(), dest) != cp.end();
}

Topology Topology::patrol(int areas, int types, const std::vector<std::pair<int, int>>& edges) {
    Topology topo;
    topo.areas = areas;
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(areas));
    for (int i = 0; i < areas; ++i) adj[static_cast<std::size_t>(i)].push_back(i);
    for (auto [a, b] : edges) {
        if (a < 0 || b < 0 || a >= areas || b >= areas)
            throw std::invalid_argument("edge endpoint out of range");
        adj[static_cast<std::size_t>(a)].push_back(b);
        adj[static_cast<std::size_t>(b)].push_back(a);
    }
    for (auto& nb : adj) {
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }
    std::vector<std::vector<double>> unit(static_cast<std::size_t>(areas),
                                          std::vector<double>(static_cast<std::size_t>(areas), 1.0));
    topo.neighbors.assign(static_cast<std::size_t>(types), adj);
    topo.coupling.assign(static_cast<std::size_t>(types), adj);
    topo.weight.assign(static_cast<std::size_t>(types), unit);
    return topo;
}

const KernelRow& PairProcessSpec::row(int s, int e, int t) const {
    const auto& layer = kernel.size() == 1 ? kernel.front() : kernel[static_cast<std::size_t>(t)];
    return layer[static_cast<std::size_t>(s)][static_cast<std::size_t>(e)];
}

double PairProcessSpec::cost_at(int s, int e, int t) const {
    const auto& layer = cost.size() == 1 ? cost.front() : cost[static_cast<std::size_t>(t)];
    return layer[static_cast<std::size_t>(s)][static_cast<std::size_t>(e)];
}

double PairProcessSpec::mixed_cost(int s, double e, int t) const {
    return e * cost_at(s, 1, t) + (1.0 - e) * cost_at(s, 0, t);
}

std::vector<double> PairProcessSpec::mixed_row(int s, double e, int t) const {
    std::vector<double> dense(states.size(), 0.0);
    for (const auto& tr : row(s, 1, t)) dense[static_cast<std::size_t>(tr.next)] += e * tr.prob;
    for (const auto& tr : row(s, 0, t)) dense[static_cast<std::size_t>(tr.next)] += (1.0 - e) * tr.prob;
    return dense;
}

int PairProcessSpec::index_of(const SubState& state) const {
    for (std::size_t s = 0; s < states.size(); ++s)
        if (states[s] == state) return static_cast<int>(s);
    return -1;
}

bool MabMlInstance::is_patrol() const {
    for (int j = 0; j < types; ++j) {
        for (int i = 0; i < areas(); ++i) {
            auto cp = topology.coupling[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
            std::sort(cp.begin(), cp.end());
            if (cp != topology.neighbors[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]) return false;
            for (int o : cp)
                if (topology.weight[static_cast<std::size_t>(j)][static_cast<std::size_t>(o)][static_cast<std::size_t>(i)] != 1.0)
                    return false;
            const auto& sp = spec(i, j);
            for (int s = 0; s < sp.size(); ++s)
                if (sp.coupling_value[static_cast<std::size_t>(s)] != sp.states[static_cast<std::size_t>(s)].indicator)
                    return false;
        }
    }
    return true;
}

namespace {

struct Hasher {
    std::uint64_t h = 0x243f6a8885a308d3ULL;
    void add(std::uint64_t v) { h = mix64(h ^ v); }
    void add(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        add(bits);
    }
    void add(int v) { add(static_cast<std::uint64_t>(static_cast<std::int64_t>(v))); }
};

}  // namespace

std::uint64_t MabMlInstance::fingerprint() const {
    Hasher hs;
    hs.add(areas());
    hs.add(types);
    hs.add(horizon);
    for (int j = 0; j < types; ++j)
        for (int i = 0; i < areas(); ++i)
            for (int o : topology.neighbors[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]) hs.add(o);
    for (const auto& sp : specs) {
        for (const auto& st : sp.states) {
            hs.add(st.knowledge);
            hs.add(st.indicator);
        }
        for (const auto& layer : sp.kernel)
            for (const auto& rows : layer)
                for (const auto& r : rows)
                    for (const auto& tr : r) {
                        hs.add(tr.next);
                        hs.add(tr.prob);
                    }
        for (const auto& layer : sp.cost)
            for (const auto& c : layer) {
                hs.add(c[0]);
                hs.add(c[1]);
            }
        for (double g : sp.coupling_value) hs.add(g);
        for (double p : sp.initial) hs.add(p);
    }
    for (int m : base_counts) hs.add(m);
    return hs.h;
}

std::vector<Violation> validate_instance(const MabMlInstance& inst) {
    std::vector<Violation> out;
    const int I = inst.areas();
    const int J = inst.types;
    auto report = [&](std::string inv, int i, int j, int t, int s, std::string detail) {
        out.push_back({std::move(inv), i, j, t, s, std::move(detail)});
    };

    if (I <= 0 || J <= 0 || inst.horizon <= 0) {
        report("dimensions", -1, -1, -1, -1, "areas, types and horizon must be positive");
        return out;
    }
    const auto& topo = inst.topology;
    if (topo.types() != J || topo.coupling.size() != static_cast<std::size_t>(J) ||
        topo.weight.size() != static_cast<std::size_t>(J) || inst.specs.size() != static_cast<std::size_t>(I * J) ||
        inst.base_counts.size() != static_cast<std::size_t>(J)) {
        report("dimensions", -1, -1, -1, -1, "topology, specs or base counts do not match I x J");
        return out;
    }

    for (int j = 0; j < J; ++j) {
        if (inst.base_counts[static_cast<std::size_t>(j)] < 1 || inst.base_counts[static_cast<std::size_t>(j)] > I)
            report("agent-count", -1, j, -1, -1, "M0[j] must lie in [1, I]");
        const auto& nb = topo.neighbors[static_cast<std::size_t>(j)];
        for (int i = 0; i < I; ++i) {
            const auto& list = nb[static_cast<std::size_t>(i)];
            if (!std::is_sorted(list.begin(), list.end()))
                report("neighbor-order", i, j, -1, -1, "neighbor lists must be sorted");
            if (!std::binary_search(list.begin(), list.end(), i))
                report("self-loop", i, j, -1, -1, "area must belong to its own neighborhood");
            for (int o : list) {
                if (o < 0 || o >= I) {
                    report("index-range", i, j, -1, -1, "neighbor out of range");
                    continue;
                }
                if (!topo.is_neighbor(j, o, i))
                    report("symmetry", i, j, -1, -1, "area " + std::to_string(o) + " lists no reverse edge");
            }
            for (double w : topo.weight[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)])
                if (!(w >= 0.0)) report("weight", i, j, -1, -1, "negative coupling weight");
        }
        // connectivity of B per type
        std::vector<char> seen(static_cast<std::size_t>(I), 0);
        std::queue<int> q;
        q.push(0);
        seen[0] = 1;
        int reached = 1;
        while (!q.empty()) {
            int a = q.front();
            q.pop();
            for (int b : nb[static_cast<std::size_t>(a)])
                if (b >= 0 && b < I && !seen[static_cast<std::size_t>(b)]) {
                    seen[static_cast<std::size_t>(b)] = 1;
                    ++reached;
                    q.push(b);
                }
        }
        if (reached != I) report("connectivity", -1, j, -1, -1, "neighborhood graph is disconnected");
    }

    constexpr double kTol = 1e-12;
    for (int i = 0; i < I; ++i) {
        for (int j = 0; j < J; ++j) {
            const auto& sp = inst.spec(i, j);
            const int S = sp.size();
            const std::size_t layers_ok = static_cast<std::size_t>(inst.horizon);
            if (S == 0 || (sp.kernel.size() != 1 && sp.kernel.size() != layers_ok) ||
                (sp.cost.size() != 1 && sp.cost.size() != layers_ok) ||
                sp.coupling_value.size() != static_cast<std::size_t>(S) || sp.initial.size() != static_cast<std::size_t>(S)) {
                report("dimensions", i, j, -1, -1, "pair spec tables inconsistent with state count or horizon");
                continue;
            }
            bool shape_ok = true;
            for (const auto& layer : sp.kernel) shape_ok = shape_ok && layer.size() == static_cast<std::size_t>(S);
            for (const auto& layer : sp.cost) shape_ok = shape_ok && layer.size() == static_cast<std::size_t>(S);
            if (!shape_ok) {
                report("dimensions", i, j, -1, -1, "kernel or cost layer has wrong state count");
                continue;
            }
            for (int s = 0; s < S; ++s) {
                const int ind = sp.states[static_cast<std::size_t>(s)].indicator;
                if (ind != 0 && ind != 1) report("indicator-domain", i, j, -1, s, "indicator must be 0 or 1");
                if (!(sp.coupling_value[static_cast<std::size_t>(s)] >= 0.0))
                    report("coupling-value", i, j, -1, s, "g(s) must be nonnegative");
            }
            for (std::size_t a = 0; a < sp.states.size(); ++a)
                for (std::size_t b = a + 1; b < sp.states.size(); ++b)
                    if (sp.states[a] == sp.states[b])
                        report("state-unique", i, j, -1, static_cast<int>(b), "duplicate state");
            const int layers = static_cast<int>(sp.kernel.size());
            for (int t = 0; t < layers; ++t) {
                for (int s = 0; s < S; ++s) {
                    for (int e = 0; e < 2; ++e) {
                        double sum = 0.0;
                        for (const auto& tr : sp.kernel[static_cast<std::size_t>(t)][static_cast<std::size_t>(s)][static_cast<std::size_t>(e)]) {
                            if (tr.next < 0 || tr.next >= S) {
                                report("kernel-closure", i, j, t, s, "successor outside the state space");
                                continue;
                            }
                            if (!(tr.prob >= 0.0)) report("kernel-sign", i, j, t, s, "negative probability");
                            sum += tr.prob;
                            if (tr.prob > 0.0 && sp.states[static_cast<std::size_t>(tr.next)].indicator != e)
                                report("indicator-consistency", i, j, t, s,
                                       "successor indicator must equal the activation e=" + std::to_string(e));
                        }
                        if (std::abs(sum - 1.0) > kTol) {
                            std::ostringstream os;
                            os << "row e=" << e << " sums to " << sum;
                            report("row-stochastic", i, j, t, s, os.str());
                        }
                    }
                }
            }
            for (std::size_t t = 0; t < sp.cost.size(); ++t)
                for (int s = 0; s < S; ++s)
                    for (int e = 0; e < 2; ++e)
                        if (!(sp.cost[t][static_cast<std::size_t>(s)][static_cast<std::size_t>(e)] >= 0.0))
                            report("cost-sign", i, j, static_cast<int>(t), s, "cost must be nonnegative");
            double mass = 0.0;
            for (int s = 0; s < S; ++s) {
                if (!(sp.initial[static_cast<std::size_t>(s)] >= 0.0))
                    report("initial-sign", i, j, -1, s, "negative initial probability");
                mass += sp.initial[static_cast<std::size_t>(s)];
            }
            if (std::abs(mass - 1.0) > 1e-9) report("initial-mass", i, j, -1, -1, "pi0 does not sum to 1");
        }
    }
    return out;
}

ScaledWorldState::ScaledWorldState(int areas_, int types_, int h_)
    : areas(areas_), types(types_), h(h_), states(static_cast<std::size_t>(areas_ * types_ * h_), 0) {}

std::vector<int> AssignmentVector::origin_map(int j, int areas, int h) const {
    std::vector<int> map(static_cast<std::size_t>(areas * h), kFree);
    for (const auto& m : moves[static_cast<std::size_t>(j)]) map[static_cast<std::size_t>(m.dest * h + m.sub)] = m.origin;
    return map;
}

std::size_t AssignmentVector::total_moves() const {
    std::size_t n = 0;
    for (const auto& v : moves) n += v.size();
    return n;
}

double area_supply(const MabMlInstance& inst, const ScaledWorldState& world, int i, int j) {
    const auto& sp = inst.spec(i, j);
    double total = 0.0;
    for (int k = 0; k < world.h; ++k) total += sp.coupling_value[static_cast<std::size_t>(world.at(i, j, k))];
    return total;
}

FeasibilityReport feasibility_report(const MabMlInstance& inst, int h, const ScaledWorldState& world,
                                     const AssignmentVector& assignment) {
    const int I = inst.areas();
    const int J = inst.types;
    if (world.h != h || world.areas != I || world.types != J ||
        world.states.size() != static_cast<std::size_t>(I * J * h) ||
        assignment.moves.size() != static_cast<std::size_t>(J))
        throw std::invalid_argument("world, assignment and h dimensions disagree");

    FeasibilityReport rep;
    std::vector<int> incoming(static_cast<std::size_t>(I * h));
    std::vector<double> outgoing(static_cast<std::size_t>(I));
    for (int j = 0; j < J; ++j) {
        std::fill(incoming.begin(), incoming.end(), 0);
        std::fill(outgoing.begin(), outgoing.end(), 0.0);
        for (const auto& m : assignment.moves[static_cast<std::size_t>(j)]) {
            if (m.dest < 0 || m.dest >= I || m.origin < 0 || m.origin >= I || m.sub < 0 || m.sub >= h)
                throw std::invalid_argument("move index outside the scaled world");
            ++incoming[static_cast<std::size_t>(m.dest * h + m.sub)];
            if (!inst.topology.is_neighbor(j, m.dest, m.origin)) ++rep.out_of_neighborhood;
            if (inst.topology.is_coupled(j, m.origin, m.dest))
                outgoing[static_cast<std::size_t>(m.origin)] +=
                    inst.topology.weight[static_cast<std::size_t>(j)][static_cast<std::size_t>(m.dest)][static_cast<std::size_t>(m.origin)];
        }
        for (int c : incoming)
            if (c > 1) ++rep.duplicate_destinations;
        for (int i = 0; i < I; ++i)
            if (std::abs(outgoing[static_cast<std::size_t>(i)] - area_supply(inst, world, i, j)) > 1e-9)
                ++rep.supply_mismatches;
    }
    return rep;
}

bool check_feasibility(const MabMlInstance& inst, int h, const ScaledWorldState& world,
                       const AssignmentVector& assignment) {
    return feasibility_report(inst, h, world, assignment).ok();
}

}  // namespace patrol
