// Positive normal form, literal checks, flatness, and the outer-CNF
// transformation that feeds the safety/liveness decomposition.

#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "pctl/errors.hpp"
#include "pctl/formula.hpp"

namespace pctl {

StateFormula to_pnf(const StateFormula& phi);

namespace detail {

inline PathFormula pnf_path(const PathFormula& p) {
    if (p.kind() == PathFormula::Kind::Next) return next(to_pnf(p.arg()));
    if (p.kind() == PathFormula::Kind::Until) return until(to_pnf(p.lhs()), to_pnf(p.rhs()));
    return weak_until(to_pnf(p.lhs()), to_pnf(p.rhs()));
}

// not(x W y) is pathwise (x & !y) U (!x & !y); the U/W duality laws of
// the logic are instances of this complement.
inline PathFormula dual_until_of_weak(const StateFormula& lhs, const StateFormula& rhs) {
    return until(to_pnf(f_and(lhs, f_not(rhs))), to_pnf(f_and(f_not(lhs), f_not(rhs))));
}

inline StateFormula push_negation(const StateFormula& phi) {
    switch (phi.kind()) {
        case StateFormula::Kind::True:
            return f_false();
        case StateFormula::Kind::False:
            return f_true();
        case StateFormula::Kind::Atom:
            return f_not(phi);
        case StateFormula::Kind::Not:
            return to_pnf(phi.inner());
        case StateFormula::Kind::And:
            return f_or(push_negation(phi.lhs()), push_negation(phi.rhs()));
        case StateFormula::Kind::Or:
            return f_and(push_negation(phi.lhs()), push_negation(phi.rhs()));
        case StateFormula::Kind::Prob: {
            Comparison flipped = negate_comparison(phi.cmp());
            const PathFormula& p = phi.path();
            // A strict bound on W is normalised away through the duality
            // law; strict bounds on U and X are kept as-is.
            if (p.kind() == PathFormula::Kind::WeakUntil && is_strict(flipped)) {
                Comparison dual_cmp =
                    flipped == Comparison::Lt ? Comparison::Gt : Comparison::Lt;
                return prob(dual_cmp, Rational(1) - phi.bound(),
                            dual_until_of_weak(p.lhs(), p.rhs()));
            }
            return prob(flipped, phi.bound(), pnf_path(p));
        }
    }
    return phi;
}

} // namespace detail

// Semantically equivalent formula in which negation occurs only directly
// above atoms. Idempotent.
inline StateFormula to_pnf(const StateFormula& phi) {
    switch (phi.kind()) {
        case StateFormula::Kind::True:
        case StateFormula::Kind::False:
        case StateFormula::Kind::Atom:
            return phi;
        case StateFormula::Kind::Not:
            return detail::push_negation(phi.inner());
        case StateFormula::Kind::And:
            return f_and(to_pnf(phi.lhs()), to_pnf(phi.rhs()));
        case StateFormula::Kind::Or:
            return f_or(to_pnf(phi.lhs()), to_pnf(phi.rhs()));
        case StateFormula::Kind::Prob:
            return prob(phi.cmp(), phi.bound(), detail::pnf_path(phi.path()));
    }
    return phi;
}

// PNF of the negation; model checking the result is the complement of
// model checking the input on every chain.
inline StateFormula negate(const StateFormula& phi) { return to_pnf(f_not(phi)); }

// Literal formulas: atoms, constants, and Boolean combinations thereof.
// Disjunction is admitted since PNF of !(a & b) produces !a | !b and the
// shape stays definable in the neg/and grammar.
inline bool is_literal(const StateFormula& phi) {
    switch (phi.kind()) {
        case StateFormula::Kind::True:
        case StateFormula::Kind::False:
        case StateFormula::Kind::Atom:
            return true;
        case StateFormula::Kind::Not:
            return is_literal(phi.inner());
        case StateFormula::Kind::And:
        case StateFormula::Kind::Or:
            return is_literal(phi.lhs()) && is_literal(phi.rhs());
        case StateFormula::Kind::Prob:
            return false;
    }
    return false;
}

// Evaluates a literal formula under a truth assignment.
inline bool eval_literal(const StateFormula& phi,
                         const std::function<bool(const std::string&)>& holds) {
    switch (phi.kind()) {
        case StateFormula::Kind::True:
            return true;
        case StateFormula::Kind::False:
            return false;
        case StateFormula::Kind::Atom:
            return holds(phi.atom_name());
        case StateFormula::Kind::Not:
            return !eval_literal(phi.inner(), holds);
        case StateFormula::Kind::And:
            return eval_literal(phi.lhs(), holds) && eval_literal(phi.rhs(), holds);
        case StateFormula::Kind::Or:
            return eval_literal(phi.lhs(), holds) || eval_literal(phi.rhs(), holds);
        case StateFormula::Kind::Prob:
            throw std::invalid_argument("eval_literal: probability operator in literal position");
    }
    return false;
}

// Satisfiability of a literal formula over a finite proposition set, by
// exhaustive enumeration of the 2^|ap| assignments.
inline bool literal_sat(const StateFormula& phi, const std::set<std::string>& ap) {
    if (!is_literal(phi)) throw std::invalid_argument("literal_sat: non-literal input");
    std::vector<std::string> props(ap.begin(), ap.end());
    if (props.size() > 24) throw SizeLimitError("literal_sat: proposition set too large", props.size());
    for (std::uint64_t mask = 0; mask < (1ull << props.size()); ++mask) {
        auto holds = [&](const std::string& name) -> bool {
            for (std::size_t i = 0; i < props.size(); ++i)
                if (props[i] == name) return ((mask >> i) & 1ull) != 0;
            return false;
        };
        if (eval_literal(phi, holds)) return true;
    }
    return false;
}

inline bool literal_sat(const StateFormula& phi) { return literal_sat(phi, phi.atoms()); }

// Flat fragment: Boolean combinations of probability operators with
// non-strict bounds and literal path arguments; literal subformulas are
// admitted as atoms of the combination.
inline bool is_flat(const StateFormula& phi) {
    if (is_literal(phi)) return true;
    switch (phi.kind()) {
        case StateFormula::Kind::And:
        case StateFormula::Kind::Or:
            return is_flat(phi.lhs()) && is_flat(phi.rhs());
        case StateFormula::Kind::Prob: {
            if (is_strict(phi.cmp())) return false;
            const PathFormula& p = phi.path();
            if (p.kind() == PathFormula::Kind::Next) return is_literal(p.arg());
            return is_literal(p.lhs()) && is_literal(p.rhs());
        }
        default:
            return false;
    }
}

inline std::size_t node_count(const StateFormula& phi) {
    switch (phi.kind()) {
        case StateFormula::Kind::True:
        case StateFormula::Kind::False:
        case StateFormula::Kind::Atom:
            return 1;
        case StateFormula::Kind::Not:
            return 1 + node_count(phi.inner());
        case StateFormula::Kind::And:
        case StateFormula::Kind::Or:
            return 1 + node_count(phi.lhs()) + node_count(phi.rhs());
        case StateFormula::Kind::Prob: {
            const PathFormula& p = phi.path();
            std::size_t inner = node_count(p.lhs());
            if (p.kind() != PathFormula::Kind::Next) inner += node_count(p.rhs());
            return 2 + inner;
        }
    }
    return 1;
}

namespace detail {

// A CNF unit: either a probability operator or a maximal literal subtree.
using Clause = std::vector<StateFormula>;

inline void cnf_distribute(const StateFormula& phi, std::vector<Clause>& out,
                           std::size_t budget, std::size_t& nodes) {
    if (is_literal(phi) || phi.kind() == StateFormula::Kind::Prob) {
        nodes += node_count(phi);
        if (nodes > budget)
            throw SizeLimitError("outer CNF exceeds node budget", nodes);
        out.push_back({phi});
        return;
    }
    if (phi.kind() == StateFormula::Kind::And) {
        cnf_distribute(phi.lhs(), out, budget, nodes);
        cnf_distribute(phi.rhs(), out, budget, nodes);
        return;
    }
    if (phi.kind() == StateFormula::Kind::Or) {
        std::vector<Clause> left, right;
        std::size_t sub_nodes = 0;
        cnf_distribute(phi.lhs(), left, budget, sub_nodes);
        cnf_distribute(phi.rhs(), right, budget, sub_nodes);
        for (const Clause& l : left)
            for (const Clause& r : right) {
                Clause joined = l;
                joined.insert(joined.end(), r.begin(), r.end());
                for (const StateFormula& u : joined) nodes += node_count(u);
                if (nodes > budget)
                    throw SizeLimitError("outer CNF exceeds node budget", nodes);
                out.push_back(std::move(joined));
            }
        return;
    }
    throw std::invalid_argument("flat_outer_cnf: input is not flat");
}

inline StateFormula clause_to_formula(const Clause& clause) {
    StateFormula acc = clause.front();
    for (std::size_t i = 1; i < clause.size(); ++i) acc = f_or(acc, clause[i]);
    return acc;
}

} // namespace detail

// Shape of a single outer-CNF conjunct: a disjunction of flat probability
// operators and literals, with conjunction only inside literal units.
inline bool is_single_conjunct(const StateFormula& phi) {
    if (is_literal(phi)) return true;
    if (phi.kind() == StateFormula::Kind::Or)
        return is_single_conjunct(phi.lhs()) && is_single_conjunct(phi.rhs());
    if (phi.kind() == StateFormula::Kind::Prob) return is_flat(phi);
    return false;
}

inline constexpr std::size_t kDefaultCnfNodeBudget = 10000;

// Equivalent conjunct list for a flat formula: distributes | over & until
// no conjunction remains except inside literal units.
inline std::vector<StateFormula> flat_outer_cnf(const StateFormula& phi,
                                                std::size_t node_budget = kDefaultCnfNodeBudget) {
    if (!is_flat(phi)) throw std::invalid_argument("flat_outer_cnf: input is not flat");
    std::vector<detail::Clause> clauses;
    std::size_t nodes = 0;
    detail::cnf_distribute(phi, clauses, node_budget, nodes);
    std::vector<StateFormula> conjuncts;
    conjuncts.reserve(clauses.size());
    for (const auto& clause : clauses) conjuncts.push_back(detail::clause_to_formula(clause));
    return conjuncts;
}

} // namespace pctl
