// Finite state-labelled Markov chains with exact rational transitions:
// validation, a line-oriented file format, seeded random generation, and
// the unfold/stutter/shrink transformations.

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pctl/errors.hpp"
#include "pctl/prng.hpp"
#include "pctl/rational.hpp"

namespace pctl {

struct MarkovChain {
    // propositions are global; labels are per-state subsets
    std::vector<std::string> ap;
    std::vector<std::set<std::string>> labels;
    // trans[s] maps successor -> probability; entries are positive and
    // per-state sums must be exactly 1
    std::vector<std::map<int, Rational>> trans;
    int init = 0;

    int state_count() const { return static_cast<int>(trans.size()); }

    bool has_label(int state, const std::string& name) const {
        return labels[state].count(name) > 0;
    }
};

inline std::vector<std::string> validate(const MarkovChain& mc) {
    std::vector<std::string> violations;
    int n = mc.state_count();
    if (n == 0) violations.push_back("chain has no states");
    if (static_cast<int>(mc.labels.size()) != n)
        violations.push_back("label table size differs from state count");
    if (mc.init < 0 || mc.init >= n)
        violations.push_back("initial state " + std::to_string(mc.init) + " out of range");
    std::set<std::string> known(mc.ap.begin(), mc.ap.end());
    for (int s = 0; s < static_cast<int>(mc.labels.size()) && s < n; ++s)
        for (const auto& name : mc.labels[s])
            if (!known.count(name))
                violations.push_back("state " + std::to_string(s) + " labelled with unknown proposition '" + name + "'");
    for (int s = 0; s < n; ++s) {
        Rational sum(0);
        for (const auto& [t, p] : mc.trans[s]) {
            if (t < 0 || t >= n)
                violations.push_back("state " + std::to_string(s) + " has successor " +
                                     std::to_string(t) + " out of range");
            if (p <= Rational(0) || p > Rational(1))
                violations.push_back("state " + std::to_string(s) + " has probability " +
                                     p.to_string() + " outside (0,1]");
            sum += p;
        }
        if (!(sum == Rational(1)))
            violations.push_back("state " + std::to_string(s) + " row sums to " + sum.to_string());
    }
    return violations;
}

inline void require_valid(const MarkovChain& mc) {
    auto v = validate(mc);
    if (!v.empty()) throw std::invalid_argument("invalid Markov chain: " + v.front());
}

// ---------------------------------------------------------------------------
// File format (UTF-8, line oriented, '#' comments):
//   mc
//   states: N
//   init: i
//   ap: a b c
//   label i: a c
//   trans i: j:p k:q
// ---------------------------------------------------------------------------

inline std::string save_mc(const MarkovChain& mc) {
    std::ostringstream out;
    out << "mc\n";
    out << "states: " << mc.state_count() << "\n";
    out << "init: " << mc.init << "\n";
    out << "ap:";
    for (const auto& a : mc.ap) out << " " << a;
    out << "\n";
    for (int s = 0; s < mc.state_count(); ++s) {
        if (mc.labels[s].empty()) continue;
        out << "label " << s << ":";
        for (const auto& a : mc.labels[s]) out << " " << a;
        out << "\n";
    }
    for (int s = 0; s < mc.state_count(); ++s) {
        out << "trans " << s << ":";
        for (const auto& [t, p] : mc.trans[s]) out << " " << t << ":" << p.to_string();
        out << "\n";
    }
    return out.str();
}

namespace detail {

inline std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

[[noreturn]] inline void mc_error(int line, const std::string& message) {
    throw ParseError("line " + std::to_string(line) + ": " + message,
                     {static_cast<std::size_t>(line), static_cast<std::size_t>(line)});
}

// All distributions over `states` targets whose nonzero entries come
// from the grid and sum to one; shared by the chain enumerators.
inline void enumerate_rows(const std::vector<Rational>& grid, int states, int from,
                           const Rational& remaining, std::map<int, Rational>& current,
                           std::vector<std::map<int, Rational>>& out) {
    if (remaining.is_zero()) {
        out.push_back(current);
        return;
    }
    if (from >= states) return;
    enumerate_rows(grid, states, from + 1, remaining, current, out);
    for (const auto& value : grid) {
        if (value <= Rational(0) || value > remaining) continue;
        current[from] = value;
        enumerate_rows(grid, states, from + 1, remaining - value, current, out);
        current.erase(from);
    }
}

} // namespace detail

inline MarkovChain load_mc(const std::string& text) {
    MarkovChain mc;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    bool saw_header = false, saw_states = false;
    std::set<int> trans_seen;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw.substr(0, raw.find('#'));
        auto words = detail::split_ws(line);
        if (words.empty()) continue;
        if (!saw_header) {
            if (words.size() != 1 || words[0] != "mc")
                detail::mc_error(line_no, "expected 'mc' header");
            saw_header = true;
            continue;
        }
        const std::string& key = words[0];
        if (key == "states:") {
            if (words.size() != 2) detail::mc_error(line_no, "expected 'states: N'");
            int n = 0;
            try {
                n = std::stoi(words[1]);
            } catch (...) {
                detail::mc_error(line_no, "malformed state count");
            }
            if (n < 1) detail::mc_error(line_no, "state count must be positive");
            mc.labels.assign(n, {});
            mc.trans.assign(n, {});
            saw_states = true;
        } else if (key == "init:") {
            if (words.size() != 2) detail::mc_error(line_no, "expected 'init: i'");
            try {
                mc.init = std::stoi(words[1]);
            } catch (...) {
                detail::mc_error(line_no, "malformed initial state");
            }
        } else if (key == "ap:") {
            mc.ap.assign(words.begin() + 1, words.end());
        } else if (key == "label") {
            if (!saw_states) detail::mc_error(line_no, "'label' before 'states:'");
            if (words.size() < 2 || words[1].back() != ':')
                detail::mc_error(line_no, "expected 'label i: ...'");
            int s = 0;
            try {
                s = std::stoi(words[1].substr(0, words[1].size() - 1));
            } catch (...) {
                detail::mc_error(line_no, "malformed state index");
            }
            if (s < 0 || s >= mc.state_count()) detail::mc_error(line_no, "label state out of range");
            for (std::size_t i = 2; i < words.size(); ++i) mc.labels[s].insert(words[i]);
        } else if (key == "trans") {
            if (!saw_states) detail::mc_error(line_no, "'trans' before 'states:'");
            if (words.size() < 2 || words[1].back() != ':')
                detail::mc_error(line_no, "expected 'trans i: j:p ...'");
            int s = 0;
            try {
                s = std::stoi(words[1].substr(0, words[1].size() - 1));
            } catch (...) {
                detail::mc_error(line_no, "malformed state index");
            }
            if (s < 0 || s >= mc.state_count()) detail::mc_error(line_no, "trans state out of range");
            if (!trans_seen.insert(s).second)
                detail::mc_error(line_no, "duplicate trans line for state " + std::to_string(s));
            for (std::size_t i = 2; i < words.size(); ++i) {
                auto colon = words[i].find(':');
                if (colon == std::string::npos)
                    detail::mc_error(line_no, "expected 'target:probability'");
                int t = 0;
                try {
                    t = std::stoi(words[i].substr(0, colon));
                } catch (...) {
                    detail::mc_error(line_no, "malformed successor index");
                }
                auto p = Rational::parse(words[i].substr(colon + 1));
                if (!p) detail::mc_error(line_no, "malformed probability");
                if (mc.trans[s].count(t))
                    detail::mc_error(line_no, "duplicate successor " + std::to_string(t));
                mc.trans[s][t] = *p;
            }
        } else {
            detail::mc_error(line_no, "unknown directive '" + key + "'");
        }
    }
    if (!saw_header) detail::mc_error(line_no, "missing 'mc' header");
    if (!saw_states) detail::mc_error(line_no, "missing 'states:' line");
    auto violations = validate(mc);
    if (!violations.empty())
        throw ParseError("validation failed: " + violations.front(), {0, 0});
    return mc;
}

// ---------------------------------------------------------------------------
// Random generation
// ---------------------------------------------------------------------------

struct GenParams {
    int state_count = 4;
    int max_out_degree = 3;
    std::vector<std::string> ap = {"a", "b"};
    std::uint64_t seed = 1;
    // unnormalized weights; rows are normalized exactly
    std::vector<Rational> grid = {Rational(1), Rational(2), Rational(3)};
};

// Deterministic in the seed. Reachability of every state is not
// guaranteed; consumers must tolerate unreachable states.
inline MarkovChain random_mc(const GenParams& params) {
    if (params.state_count < 1) throw std::invalid_argument("random_mc: state_count must be >= 1");
    if (params.max_out_degree < 1)
        throw std::invalid_argument("random_mc: max_out_degree must be >= 1");
    if (params.grid.empty()) throw std::invalid_argument("random_mc: empty probability grid");
    SplitMix64 rng(params.seed);
    MarkovChain mc;
    mc.ap = params.ap;
    int n = params.state_count;
    mc.labels.assign(n, {});
    mc.trans.assign(n, {});
    mc.init = 0;
    for (int s = 0; s < n; ++s) {
        for (const auto& prop : params.ap)
            if (rng.coin()) mc.labels[s].insert(prop);
        int degree = 1 + static_cast<int>(rng.below(std::min(params.max_out_degree, n)));
        std::set<int> succs;
        while (static_cast<int>(succs.size()) < degree)
            succs.insert(static_cast<int>(rng.below(n)));
        std::vector<Rational> weights;
        Rational total(0);
        for (std::size_t i = 0; i < succs.size(); ++i) {
            Rational w = params.grid[rng.below(params.grid.size())];
            weights.push_back(w);
            total += w;
        }
        std::size_t i = 0;
        for (int t : succs) mc.trans[s][t] = weights[i++] / total;
    }
    return mc;
}

// ---------------------------------------------------------------------------
// Tree-prefix structure
// ---------------------------------------------------------------------------

// States that the unfolding visits along exactly one node: the initial
// state when nothing points at it, then chains of unique-predecessor
// states below it. Only these admit the single-occurrence stutter and
// shrink transformations.
inline std::vector<bool> tree_prefix_states(const MarkovChain& mc) {
    int n = mc.state_count();
    std::vector<std::set<int>> preds(n);
    for (int s = 0; s < n; ++s)
        for (const auto& [t, p] : mc.trans[s]) preds[t].insert(s);
    std::vector<bool> tree(n, false);
    if (preds[mc.init].empty()) tree[mc.init] = true;
    bool changed = tree[mc.init];
    while (changed) {
        changed = false;
        for (int s = 0; s < n; ++s) {
            if (tree[s] || s == mc.init) continue;
            if (preds[s].size() == 1 && tree[*preds[s].begin()]) {
                tree[s] = true;
                changed = true;
            }
        }
    }
    return tree;
}

// ---------------------------------------------------------------------------
// Transformations
// ---------------------------------------------------------------------------

// Unfolds the first d levels below the initial state into fresh tree
// states; level-d states transition into the retained original chain.
// Satisfaction of every PCTL formula is preserved.
inline MarkovChain unfold_to_depth(const MarkovChain& mc, int depth) {
    require_valid(mc);
    if (depth < 0) throw std::invalid_argument("unfold_to_depth: negative depth");
    int n = mc.state_count();
    MarkovChain out;
    out.ap = mc.ap;

    struct TreeNode {
        int original;
        int level;
    };
    std::vector<TreeNode> nodes;
    nodes.push_back({mc.init, 0});
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].level == depth) continue;
        for ([[maybe_unused]] const auto& entry : mc.trans[nodes[i].original])
            nodes.push_back({entry.first, nodes[i].level + 1});
    }
    // tree nodes occupy 0..T-1 in BFS order; originals follow at T..T+n-1
    int tree_count = static_cast<int>(nodes.size());
    auto original_index = [&](int s) { return tree_count + s; };

    out.labels.assign(tree_count + n, {});
    out.trans.assign(tree_count + n, {});
    out.init = 0;
    for (int i = 0; i < tree_count; ++i) out.labels[i] = mc.labels[nodes[i].original];
    for (int s = 0; s < n; ++s) out.labels[original_index(s)] = mc.labels[s];
    for (int s = 0; s < n; ++s)
        for (const auto& [t, p] : mc.trans[s]) out.trans[original_index(s)][original_index(t)] = p;

    // children were appended in transition order, so a second scan with a
    // running cursor reconstructs the tree edges
    std::size_t cursor = 1;
    for (int i = 0; i < tree_count; ++i) {
        if (nodes[i].level == depth) {
            for (const auto& [t, p] : mc.trans[nodes[i].original])
                out.trans[i][original_index(t)] = p;
        } else {
            for (const auto& [t, p] : mc.trans[nodes[i].original]) {
                out.trans[i][static_cast<int>(cursor)] = p;
                ++cursor;
            }
        }
    }
    return out;
}

// Inserts a duplicate of tree-prefix state s: s moves to the duplicate
// with probability one and the duplicate takes over s's distribution.
inline MarkovChain stutter(const MarkovChain& mc, int s) {
    require_valid(mc);
    if (s < 0 || s >= mc.state_count()) throw std::invalid_argument("stutter: state out of range");
    auto tree = tree_prefix_states(mc);
    if (!tree[s])
        throw std::invalid_argument("stutter: state " + std::to_string(s) +
                                    " is not in the tree-shaped prefix");
    MarkovChain out = mc;
    int fresh = out.state_count();
    out.labels.push_back(out.labels[s]);
    out.trans.push_back(out.trans[s]);
    out.trans[s].clear();
    out.trans[s][fresh] = Rational(1);
    return out;
}

// Removes non-initial tree-prefix state s; its unique predecessor inherits
// s's outgoing edges scaled by the deleted edge probability.
inline MarkovChain shrink(const MarkovChain& mc, int s) {
    require_valid(mc);
    if (s < 0 || s >= mc.state_count()) throw std::invalid_argument("shrink: state out of range");
    if (s == mc.init) throw std::invalid_argument("shrink: deleting the initial state is prohibited");
    auto tree = tree_prefix_states(mc);
    if (!tree[s])
        throw std::invalid_argument("shrink: state " + std::to_string(s) +
                                    " is not in the tree-shaped prefix");
    int pred = -1;
    for (int u = 0; u < mc.state_count(); ++u)
        if (mc.trans[u].count(s)) pred = u;
    // tree membership guarantees exactly one predecessor
    Rational into = mc.trans[pred].at(s);

    MarkovChain out;
    out.ap = mc.ap;
    std::vector<int> remap(mc.state_count(), -1);
    int next_id = 0;
    for (int u = 0; u < mc.state_count(); ++u)
        if (u != s) remap[u] = next_id++;
    out.labels.assign(next_id, {});
    out.trans.assign(next_id, {});
    out.init = remap[mc.init];
    for (int u = 0; u < mc.state_count(); ++u) {
        if (u == s) continue;
        out.labels[remap[u]] = mc.labels[u];
        for (const auto& [t, p] : mc.trans[u]) {
            if (t == s) continue;
            out.trans[remap[u]][remap[t]] = p;
        }
    }
    for (const auto& [t, p] : mc.trans[s]) {
        Rational& slot = out.trans[remap[pred]][remap[t]];
        slot += into * p;
    }
    return out;
}

// Same chain with a different initial state; evaluates formulas from s.
inline MarkovChain reroot(const MarkovChain& mc, int s) {
    if (s < 0 || s >= mc.state_count()) throw std::invalid_argument("reroot: state out of range");
    MarkovChain out = mc;
    out.init = s;
    return out;
}

inline std::vector<bool> reachable_states(const MarkovChain& mc) {
    std::vector<bool> seen(mc.state_count(), false);
    std::vector<int> stack = {mc.init};
    seen[mc.init] = true;
    while (!stack.empty()) {
        int s = stack.back();
        stack.pop_back();
        for (const auto& [t, p] : mc.trans[s])
            if (!seen[t]) {
                seen[t] = true;
                stack.push_back(t);
            }
    }
    return seen;
}

} // namespace pctl
