// Finite counterexamples for violated flat safety formulas.
//
// A violated upper-bounded until admits a finite set of pairwise
// non-prefixing finite paths whose cylinder mass already exceeds the
// bound. The search expands paths best-first by cylinder probability,
// pruning prefixes whose end state can no longer reach the target; that
// pruning is what makes the search terminate when probability-preserving
// cycles hang above the productive paths.

#pragma once

#include <algorithm>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "pctl/errors.hpp"
#include "pctl/formula.hpp"
#include "pctl/markov.hpp"
#include "pctl/modelcheck.hpp"
#include "pctl/normal_form.hpp"
#include "pctl/parser.hpp"

namespace pctl {

struct FiniteCounterexample {
    // the violated upper-bounded until, possibly derived by rewriting
    StateFormula formula;
    std::vector<std::vector<int>> paths;
    Rational mass;
};

inline constexpr int kDefaultCounterexampleDepth = 50;

namespace detail {

// Rewrites the supported safe shapes into an upper-bounded until over
// literals:
//   P<=q[l1 U l2]            as-is
//   P>=q[l1 W l2]            P<=1-q[(l1 & !l2) U (!l1 & !l2)]
//   literal l                P<=0[!l U !l]
//   f1 & f2                  the first conjunct violated on the chain
// Disjunctions and X-shapes have no single-until evidence and are
// rejected.
inline StateFormula to_upper_until(const MarkovChain& mc, const StateFormula& phi) {
    StateFormula f = to_pnf(phi);
    if (is_literal(f)) {
        StateFormula neg = negate(f);
        return prob(Comparison::Le, Rational(0), until(neg, neg));
    }
    switch (f.kind()) {
        case StateFormula::Kind::And: {
            if (!check(mc, f.lhs())) return to_upper_until(mc, f.lhs());
            return to_upper_until(mc, f.rhs());
        }
        case StateFormula::Kind::Prob: {
            const PathFormula& p = f.path();
            if (p.kind() == PathFormula::Kind::Until && f.cmp() == Comparison::Le &&
                is_literal(p.lhs()) && is_literal(p.rhs()))
                return f;
            if (p.kind() == PathFormula::Kind::WeakUntil && f.cmp() == Comparison::Ge &&
                is_literal(p.lhs()) && is_literal(p.rhs())) {
                StateFormula stay = to_pnf(f_and(p.lhs(), f_not(p.rhs())));
                StateFormula leave = to_pnf(f_and(f_not(p.lhs()), f_not(p.rhs())));
                return prob(Comparison::Le, Rational(1) - f.bound(), until(stay, leave));
            }
            break;
        }
        default:
            break;
    }
    throw UnsupportedShapeError(
        "counterexample extraction supports literals, conjunctions, upper-bounded until and "
        "lower-bounded weak until over literals");
}

struct SearchEntry {
    Rational probability;
    std::vector<int> path;
};

struct SearchOrder {
    // highest probability first; ties by lexicographically smaller path
    bool operator()(const SearchEntry& a, const SearchEntry& b) const {
        if (!(a.probability == b.probability)) return a.probability < b.probability;
        return a.path > b.path;
    }
};

} // namespace detail

// Extracts a finite counterexample when the chain violates the formula,
// or nothing when the formula holds. Paths are collected by descending
// cylinder probability until their mass exceeds the bound.
inline std::optional<FiniteCounterexample> find_counterexample(
    const MarkovChain& mc, const StateFormula& phi,
    int depth_budget = kDefaultCounterexampleDepth) {
    require_valid(mc);
    StateFormula normalized = detail::to_upper_until(mc, phi);
    if (check(mc, normalized)) return std::nullopt;

    const PathFormula& p = normalized.path();
    const Rational& bound = normalized.bound();
    StateMask allowed = sat_mask(mc, p.lhs());
    StateMask target = sat_mask(mc, p.rhs());
    // states that can still contribute mass
    StateMask productive = detail::backward_reachable(mc, allowed, target);

    FiniteCounterexample result;
    result.formula = normalized;
    result.mass = Rational(0);

    std::priority_queue<detail::SearchEntry, std::vector<detail::SearchEntry>,
                        detail::SearchOrder>
        frontier;
    if (productive[mc.init]) frontier.push({Rational(1), {mc.init}});
    while (!frontier.empty()) {
        detail::SearchEntry entry = frontier.top();
        frontier.pop();
        int at = entry.path.back();
        if (target[at]) {
            result.paths.push_back(entry.path);
            result.mass += entry.probability;
            if (result.mass > bound) return result;
            continue;
        }
        // paths past the budget are not expanded; the mass they carry is
        // forfeited and exhaustion below reports the failure
        if (static_cast<int>(entry.path.size()) > depth_budget) continue;
        for (const auto& [t, q] : mc.trans[at]) {
            if (!productive[t]) continue;
            detail::SearchEntry next;
            next.probability = entry.probability * q;
            next.path = entry.path;
            next.path.push_back(t);
            frontier.push(std::move(next));
        }
    }
    // only reachable when the depth budget forfeited needed mass; the
    // finite-path mass of a violated non-strict until converges to a
    // value above the bound
    throw DepthBudgetError("counterexample search exceeded the depth budget of " +
                           std::to_string(depth_budget) + " before reaching the bound");
}

// Recomputes every invariant from scratch: path shape and stepwise
// literal satisfaction, pairwise non-prefixing, exact mass, and the
// violation itself.
inline bool verify_counterexample(const MarkovChain& mc, const FiniteCounterexample& ce) {
    if (!validate(mc).empty()) return false;
    if (ce.formula.kind() != StateFormula::Kind::Prob) return false;
    if (ce.formula.cmp() != Comparison::Le) return false;
    const PathFormula& p = ce.formula.path();
    if (p.kind() != PathFormula::Kind::Until) return false;
    if (!is_literal(p.lhs()) || !is_literal(p.rhs())) return false;
    if (ce.paths.empty()) return false;

    auto holds_at = [&](const StateFormula& lit, int state) {
        return eval_literal(lit, [&](const std::string& a) { return mc.has_label(state, a); });
    };
    Rational mass(0);
    for (const auto& path : ce.paths) {
        if (path.empty() || path.front() != mc.init) return false;
        Rational cylinder(1);
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            if (!holds_at(p.lhs(), path[i])) return false;
            auto edge = mc.trans[path[i]].find(path[i + 1]);
            if (edge == mc.trans[path[i]].end()) return false;
            cylinder *= edge->second;
        }
        if (!holds_at(p.rhs(), path.back())) return false;
        mass += cylinder;
    }
    for (std::size_t i = 0; i < ce.paths.size(); ++i)
        for (std::size_t j = 0; j < ce.paths.size(); ++j) {
            if (i == j) continue;
            const auto& shorter = ce.paths[i];
            const auto& longer = ce.paths[j];
            if (shorter.size() <= longer.size() &&
                std::equal(shorter.begin(), shorter.end(), longer.begin()))
                return false; // prefixing (or duplicate) paths overlap
        }
    if (!(mass == ce.mass)) return false;
    return ce.mass > ce.formula.bound();
}

// Header line with the formula and mass, then one path per line.
inline std::string render_counterexample(const FiniteCounterexample& ce) {
    std::ostringstream out;
    out << "violates " << print_formula(ce.formula) << " with mass " << ce.mass.to_string()
        << "\n";
    for (const auto& path : ce.paths) {
        for (std::size_t i = 0; i < path.size(); ++i) {
            if (i) out << " ";
            out << path[i];
        }
        out << "\n";
    }
    return out.str();
}

} // namespace pctl
