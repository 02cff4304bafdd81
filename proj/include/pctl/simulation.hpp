// Strong simulation on Markov-chain states.
//
// A pair survives when the successor distributions can be coupled by a
// weight function supported on the current relation; the coupling check
// is an exact rational max-flow, so "total flow equals one" is a real
// equality test. The coarsest simulation is the greatest fixpoint of
// pairwise deletion.

#pragma once

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pctl/formula.hpp"
#include "pctl/markov.hpp"
#include "pctl/modelcheck.hpp"
#include "pctl/normal_form.hpp"
#include "pctl/prng.hpp"
#include "pctl/rational.hpp"

namespace pctl {

using StateDist = std::map<int, Rational>;
using StatePair = std::pair<int, int>;
using SimulationRelation = std::set<StatePair>;

struct WeightFunction {
    std::map<StatePair, Rational> mass;
};

namespace detail {

// Dense-enough max flow on a tiny bipartite network, Edmonds-Karp with
// rational capacities.
struct FlowNetwork {
    explicit FlowNetwork(int nodes) : adj_(nodes) {}

    void add_edge(int from, int to, Rational capacity) {
        adj_[from].push_back({to, std::move(capacity), static_cast<int>(adj_[to].size())});
        adj_[to].push_back({from, Rational(0), static_cast<int>(adj_[from].size()) - 1});
    }

    Rational max_flow(int source, int sink) {
        Rational total(0);
        while (true) {
            // BFS for an augmenting path
            std::vector<int> prev_node(adj_.size(), -1), prev_edge(adj_.size(), -1);
            std::deque<int> queue = {source};
            prev_node[source] = source;
            while (!queue.empty() && prev_node[sink] == -1) {
                int u = queue.front();
                queue.pop_front();
                for (std::size_t i = 0; i < adj_[u].size(); ++i) {
                    const Edge& e = adj_[u][i];
                    if (prev_node[e.to] == -1 && e.capacity > Rational(0)) {
                        prev_node[e.to] = u;
                        prev_edge[e.to] = static_cast<int>(i);
                        queue.push_back(e.to);
                    }
                }
            }
            if (prev_node[sink] == -1) return total;
            // bottleneck
            Rational push = Rational(2); // above any capacity in use
            for (int v = sink; v != source; v = prev_node[v]) {
                const Edge& e = adj_[prev_node[v]][prev_edge[v]];
                if (e.capacity < push) push = e.capacity;
            }
            for (int v = sink; v != source; v = prev_node[v]) {
                Edge& e = adj_[prev_node[v]][prev_edge[v]];
                e.capacity -= push;
                adj_[e.to][e.reverse].capacity += push;
            }
            total += push;
        }
    }

    Rational used(int from, int edge_index) const {
        // flow on an edge equals the reverse edge's gained capacity
        const Edge& e = adj_[from][edge_index];
        return adj_[e.to][e.reverse].capacity;
    }

    struct Edge {
        int to;
        Rational capacity;
        int reverse;
    };
    std::vector<std::vector<Edge>> adj_;
};

} // namespace detail

// Decides whether mu1 can be coupled to mu2 through related pairs; the
// returned weight function has row marginals mu1 and column marginals
// mu2 exactly.
inline std::optional<WeightFunction> weight_function_for(const StateDist& mu1,
                                                         const StateDist& mu2,
                                                         const SimulationRelation& relation) {
    auto total = [](const StateDist& mu) {
        Rational sum(0);
        for (const auto& [s, p] : mu) {
            if (p <= Rational(0)) throw std::invalid_argument("weight function: non-positive mass");
            sum += p;
        }
        return sum;
    };
    if (!(total(mu1) == Rational(1)) || !(total(mu2) == Rational(1)))
        throw std::invalid_argument("weight function: arguments must be distributions");

    std::vector<int> left, right;
    for (const auto& [s, p] : mu1) left.push_back(s);
    for (const auto& [s, p] : mu2) right.push_back(s);
    int source = 0, sink = 1;
    auto left_node = [&](std::size_t i) { return 2 + static_cast<int>(i); };
    auto right_node = [&](std::size_t j) {
        return 2 + static_cast<int>(left.size()) + static_cast<int>(j);
    };
    detail::FlowNetwork net(2 + static_cast<int>(left.size() + right.size()));
    std::map<StatePair, std::pair<int, int>> arc_of; // (s1,s2) -> (node, edge index)
    for (std::size_t i = 0; i < left.size(); ++i) net.add_edge(source, left_node(i), mu1.at(left[i]));
    for (std::size_t j = 0; j < right.size(); ++j)
        net.add_edge(right_node(j), sink, mu2.at(right[j]));
    for (std::size_t i = 0; i < left.size(); ++i)
        for (std::size_t j = 0; j < right.size(); ++j)
            if (relation.count({left[i], right[j]})) {
                arc_of[{left[i], right[j]}] = {
                    left_node(i), static_cast<int>(net.adj_[left_node(i)].size())};
                net.add_edge(left_node(i), right_node(j), Rational(1));
            }
    if (!(net.max_flow(source, sink) == Rational(1))) return std::nullopt;
    WeightFunction delta;
    for (const auto& [pair, where] : arc_of) {
        Rational flow = net.used(where.first, where.second);
        if (!flow.is_zero()) delta.mass[pair] = flow;
    }
    return delta;
}

// Coarsest strong simulation on one chain: start from all label-equal
// pairs and delete pairs whose successor distributions cannot be coupled
// with respect to the current relation, until stable.
inline SimulationRelation strong_simulation(const MarkovChain& mc) {
    require_valid(mc);
    SimulationRelation relation;
    for (int s = 0; s < mc.state_count(); ++s)
        for (int t = 0; t < mc.state_count(); ++t)
            if (mc.labels[s] == mc.labels[t]) relation.insert({s, t});
    bool changed = true;
    while (changed) {
        changed = false;
        SimulationRelation next = relation;
        for (const auto& pair : relation) {
            if (!weight_function_for(mc.trans[pair.first], mc.trans[pair.second], relation)) {
                next.erase(pair);
                changed = true;
            }
        }
        relation = std::move(next);
    }
    return relation;
}

inline std::string render_relation(const SimulationRelation& relation) {
    std::ostringstream out;
    for (const auto& [s, t] : relation) out << s << " ≾ " << t << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Fragment formula sampler and the logical preorder spot check
// ---------------------------------------------------------------------------

enum class FragmentKind { Safe, LiveLt };

namespace detail {

inline Rational sample_threshold(SplitMix64& rng) {
    static const Rational grid[] = {Rational(0), Rational(1, 4), Rational(1, 2), Rational(3, 4),
                                    Rational(1)};
    return grid[rng.below(5)];
}

inline StateFormula sample_literal(SplitMix64& rng, const std::vector<std::string>& ap) {
    StateFormula base = atom(ap[rng.below(ap.size())]);
    if (rng.coin()) base = f_not(base);
    if (rng.below(3) == 0) {
        StateFormula other = atom(ap[rng.below(ap.size())]);
        if (rng.coin()) other = f_not(other);
        base = rng.coin() ? f_and(base, other) : f_or(base, other);
    }
    return base;
}

inline StateFormula sample_safe_formula(SplitMix64& rng, const std::vector<std::string>& ap,
                                        int depth) {
    if (depth <= 0) return sample_literal(rng, ap);
    switch (rng.below(6)) {
        case 0:
            return sample_literal(rng, ap);
        case 1:
            return prob(Comparison::Ge, sample_threshold(rng),
                        next(sample_safe_formula(rng, ap, depth - 1)));
        case 2:
            return f_and(sample_safe_formula(rng, ap, depth - 1),
                         sample_safe_formula(rng, ap, depth - 1));
        case 3:
            return f_or(sample_safe_formula(rng, ap, depth - 1),
                        sample_safe_formula(rng, ap, depth - 1));
        case 4:
            return prob(Comparison::Ge, sample_threshold(rng),
                        weak_until(sample_safe_formula(rng, ap, depth - 1),
                                   sample_safe_formula(rng, ap, depth - 1)));
        default:
            // upper-bounded until over literals: the negated arguments
            // stay literal, hence safe
            return prob(Comparison::Le, sample_threshold(rng),
                        until(sample_literal(rng, ap), sample_literal(rng, ap)));
    }
}

inline StateFormula sample_live_formula(SplitMix64& rng, const std::vector<std::string>& ap,
                                        int depth) {
    auto satisfiable_literal = [&]() {
        StateFormula lit = sample_literal(rng, ap);
        while (!literal_sat(lit)) lit = sample_literal(rng, ap);
        return lit;
    };
    auto eventually_literal = [&]() {
        return prob(Comparison::Ge, sample_threshold(rng), eventually(satisfiable_literal()));
    };
    if (depth <= 0) return rng.below(4) == 0 ? f_true() : eventually_literal();
    switch (rng.below(6)) {
        case 0:
            return eventually_literal();
        case 1:
            return f_and(sample_live_formula(rng, ap, depth - 1),
                         sample_live_formula(rng, ap, depth - 1));
        case 2: {
            StateFormula live = sample_live_formula(rng, ap, depth - 1);
            StateFormula other = sample_literal(rng, ap);
            return rng.coin() ? f_or(live, other) : f_or(other, live);
        }
        case 3:
            return prob(Comparison::Ge, sample_threshold(rng),
                        next(sample_live_formula(rng, ap, depth - 1)));
        case 4: {
            StateFormula live = sample_live_formula(rng, ap, depth - 1);
            StateFormula other = sample_literal(rng, ap);
            return prob(Comparison::Ge, sample_threshold(rng),
                        rng.coin() ? weak_until(live, other) : weak_until(other, live));
        }
        default:
            return prob(Comparison::Ge, sample_threshold(rng),
                        until(sample_literal(rng, ap), sample_live_formula(rng, ap, depth - 1)));
    }
}

} // namespace detail

inline StateFormula sample_fragment_formula(FragmentKind kind, SplitMix64& rng,
                                            const std::vector<std::string>& ap, int depth = 3) {
    if (ap.empty()) throw std::invalid_argument("formula sampler needs a nonempty alphabet");
    return kind == FragmentKind::Safe ? detail::sample_safe_formula(rng, ap, depth)
                                      : detail::sample_live_formula(rng, ap, depth);
}

struct PreorderViolation {
    StateFormula formula;
    int lhs_state;
    int rhs_state;
};

// Samples fragment formulas and checks the sound preservation direction
// on every related pair: safe formulas transfer from the simulating state
// down to the simulated one, live formulas the other way. Any hit is a
// bug witness.
inline std::vector<PreorderViolation> logical_preorder_spotcheck(const MarkovChain& mc,
                                                                 FragmentKind kind, int samples,
                                                                 std::uint64_t seed = 1) {
    SimulationRelation relation = strong_simulation(mc);
    SplitMix64 rng(seed);
    std::vector<PreorderViolation> violations;
    for (int i = 0; i < samples; ++i) {
        StateFormula phi = sample_fragment_formula(kind, rng, mc.ap);
        StateMask sat = sat_mask(mc, phi);
        for (const auto& [s1, s2] : relation) {
            bool bad = kind == FragmentKind::Safe ? (sat[s2] && !sat[s1]) : (sat[s1] && !sat[s2]);
            if (bad) violations.push_back({phi, s1, s2});
        }
    }
    return violations;
}

} // namespace pctl
