// Finite-depth probabilistic trees: prefix/suffix relations, node-level
// stutter and shrink, a text format, and the bounded extension oracle
// that searches for a continuation chain making a formula true.
//
// Nodes are integer sequences; the unfolding of a chain names each node
// by the state sequence that reaches it, so a node's last element is the
// state it copies.

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pctl/errors.hpp"
#include "pctl/formula.hpp"
#include "pctl/markov.hpp"
#include "pctl/modelcheck.hpp"
#include "pctl/rational.hpp"

namespace pctl {

using TreePath = std::vector<int>;

struct TreeNode {
    std::set<std::string> label;
    Rational edge_prob = Rational(1); // probability of the edge from the parent; 1 at the root

    bool operator==(const TreeNode&) const = default;
};

struct ProbTree {
    // prefix-closed, exactly one length-1 node (the root)
    std::map<TreePath, TreeNode> nodes;

    bool operator==(const ProbTree&) const = default;

    bool contains(const TreePath& path) const { return nodes.count(path) > 0; }

    TreePath root() const {
        for (const auto& [path, node] : nodes)
            if (path.size() == 1) return path;
        throw std::logic_error("tree has no root");
    }

    std::vector<TreePath> children(const TreePath& path) const {
        std::vector<TreePath> out;
        for (auto it = nodes.upper_bound(path); it != nodes.end(); ++it) {
            if (it->first.size() < path.size() ||
                !std::equal(path.begin(), path.end(), it->first.begin()))
                break;
            if (it->first.size() == path.size() + 1) out.push_back(it->first);
        }
        return out;
    }

    bool is_leaf(const TreePath& path) const { return children(path).empty(); }

    int depth() const {
        std::size_t d = 0;
        for (const auto& [path, node] : nodes) d = std::max(d, path.size());
        return static_cast<int>(d);
    }

    std::set<std::string> propositions() const {
        std::set<std::string> out;
        for (const auto& [path, node] : nodes) out.insert(node.label.begin(), node.label.end());
        return out;
    }
};

inline std::vector<std::string> validate_tree(const ProbTree& t) {
    std::vector<std::string> violations;
    int roots = 0;
    for (const auto& [path, node] : t.nodes) {
        if (path.empty()) {
            violations.push_back("empty node path");
            continue;
        }
        if (path.size() == 1) {
            ++roots;
            if (!(node.edge_prob == Rational(1))) violations.push_back("root edge probability must be 1");
            continue;
        }
        TreePath parent(path.begin(), path.end() - 1);
        if (!t.contains(parent)) violations.push_back("node without parent in tree");
        if (node.edge_prob <= Rational(0) || node.edge_prob > Rational(1))
            violations.push_back("edge probability outside (0,1]");
    }
    if (roots != 1) violations.push_back("tree must have exactly one root");
    for (const auto& [path, node] : t.nodes) {
        auto kids = t.children(path);
        if (kids.empty()) continue;
        Rational sum(0);
        for (const auto& kid : kids) sum += t.nodes.at(kid).edge_prob;
        if (!(sum == Rational(1)))
            violations.push_back("child probabilities of an internal node sum to " + sum.to_string());
    }
    return violations;
}

inline void require_valid_tree(const ProbTree& t) {
    auto v = validate_tree(t);
    if (!v.empty()) throw std::invalid_argument("invalid probabilistic tree: " + v.front());
}

// Depth-d finite prefix of the unfolding of a chain (d >= 1 levels of
// nodes); node names are the state sequences that reach them.
inline ProbTree from_unfolding(const MarkovChain& mc, int depth) {
    require_valid(mc);
    if (depth < 1) throw std::invalid_argument("from_unfolding: depth must be >= 1");
    ProbTree t;
    TreePath root{mc.init};
    t.nodes[root] = {mc.labels[mc.init], Rational(1)};
    std::vector<TreePath> frontier = {root};
    for (int level = 1; level < depth; ++level) {
        std::vector<TreePath> next_frontier;
        for (const auto& path : frontier) {
            int state = path.back();
            for (const auto& [succ, p] : mc.trans[state]) {
                TreePath child = path;
                child.push_back(succ);
                t.nodes[child] = {mc.labels[succ], p};
                next_frontier.push_back(child);
            }
        }
        frontier = std::move(next_frontier);
    }
    return t;
}

// Prefix relation: node containment, label agreement, and exact edge
// agreement below every node that is internal on both sides.
inline bool is_prefix(const ProbTree& t1, const ProbTree& t2) {
    for (const auto& [path, node] : t1.nodes) {
        auto it = t2.nodes.find(path);
        if (it == t2.nodes.end()) return false;
        if (node.label != it->second.label) return false;
        if (path.size() > 1 && !(node.edge_prob == it->second.edge_prob)) return false;
    }
    for (const auto& [path, node] : t1.nodes) {
        auto kids1 = t1.children(path);
        if (kids1.empty()) continue; // leaves of t1 may be internal in t2
        auto kids2 = t2.children(path);
        if (kids1 != kids2) return false;
    }
    return true;
}

// Subtree rooted at pi, reindexed so pi becomes the root.
inline ProbTree suffix_at(const ProbTree& t, const TreePath& pi) {
    if (!t.contains(pi)) throw std::invalid_argument("suffix_at: unknown node");
    ProbTree out;
    for (const auto& [path, node] : t.nodes) {
        if (path.size() < pi.size() || !std::equal(pi.begin(), pi.end(), path.begin())) continue;
        TreePath shifted(path.begin() + (pi.size() - 1), path.end());
        TreeNode copy = node;
        if (shifted.size() == 1) copy.edge_prob = Rational(1);
        out.nodes[shifted] = copy;
    }
    return out;
}

// Duplicates node pi: pi keeps its label, moves with probability one to a
// fresh copy named pi+[last(pi)], and the copy takes over pi's subtree.
// The forced copy name must be fresh, otherwise the defining equations
// are unsatisfiable.
inline ProbTree stutter_tree(const ProbTree& t, const TreePath& pi) {
    if (!t.contains(pi)) throw std::invalid_argument("stutter_tree: unknown node");
    TreePath copy = pi;
    copy.push_back(pi.back());
    if (t.contains(copy))
        throw std::invalid_argument(
            "stutter_tree: the duplicate node name already exists; rename the colliding child");
    ProbTree out;
    for (const auto& [path, node] : t.nodes) {
        bool below_pi =
            path.size() > pi.size() && std::equal(pi.begin(), pi.end(), path.begin());
        if (!below_pi) {
            out.nodes[path] = node;
            continue;
        }
        // shift the strict subtree one level down under the copy
        TreePath shifted = pi;
        shifted.push_back(pi.back());
        shifted.insert(shifted.end(), path.begin() + pi.size(), path.end());
        out.nodes[shifted] = node;
    }
    out.nodes[copy] = {t.nodes.at(pi).label, Rational(1)};
    return out;
}

// Deletes non-root node pi; the parent inherits pi's children with the
// products of the probabilities through pi.
inline ProbTree shrink_tree(const ProbTree& t, const TreePath& pi) {
    if (!t.contains(pi)) throw std::invalid_argument("shrink_tree: unknown node");
    if (pi.size() == 1)
        throw std::invalid_argument("shrink_tree: deletion of the initial node is prohibited");
    TreePath parent(pi.begin(), pi.end() - 1);
    auto kids = t.children(pi);
    if (kids.empty() && t.children(parent).size() > 1)
        throw std::invalid_argument(
            "shrink_tree: deleting a leaf with siblings would break the parent distribution");
    // collision check: a shifted child of pi must not clash with an
    // existing sibling of pi
    for (const auto& kid : kids) {
        TreePath shifted = parent;
        shifted.push_back(kid.back());
        if (t.contains(shifted))
            throw std::invalid_argument(
                "shrink_tree: a shifted node name already exists; rename the colliding child");
    }
    Rational into = t.nodes.at(pi).edge_prob;
    ProbTree out;
    for (const auto& [path, node] : t.nodes) {
        bool at_or_below =
            path.size() >= pi.size() && std::equal(pi.begin(), pi.end(), path.begin());
        if (!at_or_below) {
            out.nodes[path] = node;
            continue;
        }
        if (path == pi) continue; // deleted
        TreePath shifted = parent;
        shifted.insert(shifted.end(), path.begin() + pi.size(), path.end());
        TreeNode copy = node;
        if (shifted.size() == parent.size() + 1) copy.edge_prob = into * node.edge_prob;
        out.nodes[shifted] = copy;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Text format, mirroring the sequence notation:
//   (1, a b)            root label set
//   0: 1/2 b            child named 0 of the root
//   0.2: 1 a c          grandchild, path relative to the root
// ---------------------------------------------------------------------------

inline std::string save_tree(const ProbTree& t) {
    std::ostringstream out;
    TreePath root = t.root();
    out << "(1,";
    for (const auto& name : t.nodes.at(root).label) out << " " << name;
    out << ")\n";
    for (const auto& [path, node] : t.nodes) {
        if (path.size() == 1) continue;
        for (std::size_t i = 1; i < path.size(); ++i) {
            if (i > 1) out << ".";
            out << path[i];
        }
        out << ": " << node.edge_prob.to_string();
        for (const auto& name : node.label) out << " " << name;
        out << "\n";
    }
    return out.str();
}

inline ProbTree load_tree(const std::string& text) {
    ProbTree t;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    bool saw_root = false;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw.substr(0, raw.find('#'));
        auto words = detail::split_ws(line);
        if (words.empty()) continue;
        if (!saw_root) {
            // root line: (1, labels...)
            std::string joined;
            for (const auto& w : words) joined += w + " ";
            auto open = joined.find("(1,");
            if (open == std::string::npos) detail::mc_error(line_no, "expected root line '(1, labels)'");
            auto close = joined.find(')');
            if (close == std::string::npos) detail::mc_error(line_no, "unterminated root line");
            std::string labels = joined.substr(open + 3, close - open - 3);
            TreeNode root;
            for (const auto& w : detail::split_ws(labels)) root.label.insert(w);
            t.nodes[{0}] = root;
            saw_root = true;
            continue;
        }
        if (words.size() < 2 || words[0].back() != ':')
            detail::mc_error(line_no, "expected 'path: probability labels'");
        std::string path_text = words[0].substr(0, words[0].size() - 1);
        TreePath path{0};
        std::size_t start = 0;
        while (start <= path_text.size()) {
            auto dot = path_text.find('.', start);
            if (dot == std::string::npos) dot = path_text.size();
            try {
                path.push_back(std::stoi(path_text.substr(start, dot - start)));
            } catch (...) {
                detail::mc_error(line_no, "malformed node path");
            }
            start = dot + 1;
        }
        auto p = Rational::parse(words[1]);
        if (!p) detail::mc_error(line_no, "malformed edge probability");
        TreeNode node;
        node.edge_prob = *p;
        for (std::size_t i = 2; i < words.size(); ++i) node.label.insert(words[i]);
        if (t.contains(path)) detail::mc_error(line_no, "duplicate node");
        t.nodes[path] = node;
    }
    if (!saw_root) throw ParseError("tree file has no root line", {0, 0});
    auto violations = validate_tree(t);
    if (!violations.empty()) throw ParseError("validation failed: " + violations.front(), {0, 0});
    return t;
}

// ---------------------------------------------------------------------------
// Extension oracle
// ---------------------------------------------------------------------------

struct ExtensionFamily {
    int max_states = 3;
    // empty alphabet: use the formula's atoms
    std::vector<std::string> alphabet;
    std::vector<Rational> grid = {Rational(1), Rational(1, 2)};
    std::size_t enumeration_budget = 200000;
};

// Composite chain: the tree's nodes as states, every leaf moving with
// probability one into the continuation's initial state.
inline MarkovChain attach_continuation(const ProbTree& t, const MarkovChain& continuation) {
    require_valid_tree(t);
    std::vector<TreePath> order;
    std::map<TreePath, int> index;
    for (const auto& [path, node] : t.nodes) {
        index[path] = static_cast<int>(order.size());
        order.push_back(path);
    }
    int tree_count = static_cast<int>(order.size());
    MarkovChain out;
    std::set<std::string> props = t.propositions();
    props.insert(continuation.ap.begin(), continuation.ap.end());
    out.ap.assign(props.begin(), props.end());
    out.labels.assign(tree_count + continuation.state_count(), {});
    out.trans.assign(tree_count + continuation.state_count(), {});
    out.init = index.at(t.root());
    for (int i = 0; i < tree_count; ++i) out.labels[i] = t.nodes.at(order[i]).label;
    for (int s = 0; s < continuation.state_count(); ++s)
        out.labels[tree_count + s] = continuation.labels[s];
    for (int i = 0; i < tree_count; ++i) {
        auto kids = t.children(order[i]);
        if (kids.empty()) {
            out.trans[i][tree_count + continuation.init] = Rational(1);
        } else {
            for (const auto& kid : kids) out.trans[i][index.at(kid)] = t.nodes.at(kid).edge_prob;
        }
    }
    for (int s = 0; s < continuation.state_count(); ++s)
        for (const auto& [u, p] : continuation.trans[s])
            out.trans[tree_count + s][tree_count + u] = p;
    return out;
}

struct ExtensionWitness {
    MarkovChain continuation;
    std::size_t tested = 0;
};

// Enumerates continuation chains in the family, attaches each to every
// leaf, and model-checks. Returns the first satisfying continuation in
// enumeration order, or nothing if the family is exhausted. A miss is a
// bounded refutation over this family only, not a proof that no
// continuation exists.
inline std::optional<ExtensionWitness> extension_oracle(const ProbTree& t,
                                                        const StateFormula& phi,
                                                        const ExtensionFamily& family = {}) {
    require_valid_tree(t);
    std::vector<std::string> alphabet = family.alphabet;
    if (alphabet.empty()) {
        auto atoms = phi.atoms();
        alphabet.assign(atoms.begin(), atoms.end());
    }
    if (alphabet.size() > 16) throw SizeLimitError("extension alphabet too large", alphabet.size());
    std::size_t label_choices = std::size_t{1} << alphabet.size();

    // family size check up front
    std::size_t total = 0;
    std::vector<std::vector<std::map<int, Rational>>> rows_by_count(family.max_states + 1);
    for (int k = 1; k <= family.max_states; ++k) {
        std::map<int, Rational> current;
        detail::enumerate_rows(family.grid, k, 0, Rational(1), current, rows_by_count[k]);
        std::size_t per_state = label_choices * rows_by_count[k].size();
        std::size_t combos = 1;
        for (int s = 0; s < k; ++s) {
            if (per_state != 0 && combos > family.enumeration_budget / per_state + 1)
                combos = family.enumeration_budget + 1;
            else
                combos *= per_state;
        }
        total += combos;
        if (total > family.enumeration_budget)
            throw SizeLimitError("extension family larger than the enumeration budget", total);
    }

    std::size_t tested = 0;
    for (int k = 1; k <= family.max_states; ++k) {
        const auto& rows = rows_by_count[k];
        if (rows.empty()) continue; // the grid admits no distribution over k states
        std::size_t per_state = label_choices * rows.size();
        std::vector<std::size_t> odometer(k, 0);
        while (true) {
            MarkovChain cont;
            cont.ap = alphabet;
            cont.labels.assign(k, {});
            cont.trans.assign(k, {});
            cont.init = 0;
            for (int s = 0; s < k; ++s) {
                std::size_t label_idx = odometer[s] / rows.size();
                std::size_t row_idx = odometer[s] % rows.size();
                for (std::size_t bit = 0; bit < alphabet.size(); ++bit)
                    if ((label_idx >> bit) & 1u) cont.labels[s].insert(alphabet[bit]);
                cont.trans[s] = rows[row_idx];
            }
            ++tested;
            MarkovChain composite = attach_continuation(t, cont);
            if (check(composite, phi)) return ExtensionWitness{cont, tested};
            // advance odometer
            int pos = k - 1;
            while (pos >= 0) {
                if (++odometer[pos] < per_state) break;
                odometer[pos] = 0;
                --pos;
            }
            if (pos < 0) break;
        }
    }
    return std::nullopt;
}

} // namespace pctl
