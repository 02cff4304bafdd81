// PCTL abstract syntax.
//
// State formulas: true, false, atoms, !, &, |, and the probability
// operator P~q[path]. Path formulas: X, U, W. The sugar F/G exists only
// in the parser and is expanded before an AST is ever stored. Formulas
// are immutable and shared; copying is cheap.

#pragma once

#include <memory>
#include <set>
#include <string>
#include <utility>

#include "pctl/rational.hpp"

namespace pctl {

enum class Comparison { Lt, Le, Gt, Ge };

inline bool compare(const Rational& value, Comparison cmp, const Rational& bound) {
    switch (cmp) {
        case Comparison::Lt: return value < bound;
        case Comparison::Le: return value <= bound;
        case Comparison::Gt: return value > bound;
        case Comparison::Ge: return value >= bound;
    }
    return false;
}

// Negation of the comparison: !(x ~ q) == x ~' q.
inline Comparison negate_comparison(Comparison cmp) {
    switch (cmp) {
        case Comparison::Lt: return Comparison::Ge;
        case Comparison::Le: return Comparison::Gt;
        case Comparison::Gt: return Comparison::Le;
        case Comparison::Ge: return Comparison::Lt;
    }
    return cmp;
}

inline bool is_strict(Comparison cmp) { return cmp == Comparison::Lt || cmp == Comparison::Gt; }
inline bool is_lower_bound(Comparison cmp) { return cmp == Comparison::Gt || cmp == Comparison::Ge; }

inline std::string comparison_symbol(Comparison cmp) {
    switch (cmp) {
        case Comparison::Lt: return "<";
        case Comparison::Le: return "<=";
        case Comparison::Gt: return ">";
        case Comparison::Ge: return ">=";
    }
    return "?";
}

class PathFormula;

class StateFormula {
public:
    enum class Kind { True, False, Atom, Not, And, Or, Prob };

    StateFormula() = default;

    Kind kind() const;
    bool is_true() const { return kind() == Kind::True; }
    bool is_false() const { return kind() == Kind::False; }
    bool is_atom() const { return kind() == Kind::Atom; }
    bool is_prob() const { return kind() == Kind::Prob; }

    const std::string& atom_name() const;
    const StateFormula& lhs() const;
    const StateFormula& rhs() const;
    const StateFormula& inner() const;
    Comparison cmp() const;
    const Rational& bound() const;
    const PathFormula& path() const;

    bool operator==(const StateFormula& other) const;

    void collect_atoms(std::set<std::string>& out) const;
    std::set<std::string> atoms() const {
        std::set<std::string> out;
        collect_atoms(out);
        return out;
    }

    friend StateFormula f_true();
    friend StateFormula f_false();
    friend StateFormula atom(std::string name);
    friend StateFormula f_not(StateFormula inner);
    friend StateFormula f_and(StateFormula lhs, StateFormula rhs);
    friend StateFormula f_or(StateFormula lhs, StateFormula rhs);
    friend StateFormula prob(Comparison cmp, Rational bound, PathFormula path);

private:
    struct Node;
    explicit StateFormula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

class PathFormula {
public:
    enum class Kind { Next, Until, WeakUntil };

    PathFormula() = default;

    Kind kind() const { return node_->kind; }
    const StateFormula& arg() const { return node_->lhs; }
    const StateFormula& lhs() const { return node_->lhs; }
    const StateFormula& rhs() const { return node_->rhs; }

    bool operator==(const PathFormula& other) const;

    friend PathFormula next(StateFormula arg);
    friend PathFormula until(StateFormula lhs, StateFormula rhs);
    friend PathFormula weak_until(StateFormula lhs, StateFormula rhs);

private:
    struct Node {
        Kind kind;
        StateFormula lhs;
        StateFormula rhs;
    };
    explicit PathFormula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;

    friend class StateFormula;
};

struct StateFormula::Node {
    Kind kind;
    std::string atom;
    StateFormula lhs;
    StateFormula rhs;
    Comparison cmp = Comparison::Ge;
    Rational bound;
    PathFormula path_formula;
};

inline StateFormula::Kind StateFormula::kind() const { return node_->kind; }
inline const std::string& StateFormula::atom_name() const { return node_->atom; }
inline const StateFormula& StateFormula::lhs() const { return node_->lhs; }
inline const StateFormula& StateFormula::rhs() const { return node_->rhs; }
inline const StateFormula& StateFormula::inner() const { return node_->lhs; }
inline Comparison StateFormula::cmp() const { return node_->cmp; }
inline const Rational& StateFormula::bound() const { return node_->bound; }
inline const PathFormula& StateFormula::path() const { return node_->path_formula; }

inline StateFormula f_true() {
    static const StateFormula t(std::make_shared<const StateFormula::Node>(
        StateFormula::Node{StateFormula::Kind::True, {}, {}, {}, Comparison::Ge, {}, {}}));
    return t;
}

inline StateFormula f_false() {
    static const StateFormula f(std::make_shared<const StateFormula::Node>(
        StateFormula::Node{StateFormula::Kind::False, {}, {}, {}, Comparison::Ge, {}, {}}));
    return f;
}

inline StateFormula atom(std::string name) {
    return StateFormula(std::make_shared<const StateFormula::Node>(StateFormula::Node{
        StateFormula::Kind::Atom, std::move(name), {}, {}, Comparison::Ge, {}, {}}));
}

inline StateFormula f_not(StateFormula inner) {
    return StateFormula(std::make_shared<const StateFormula::Node>(StateFormula::Node{
        StateFormula::Kind::Not, {}, std::move(inner), {}, Comparison::Ge, {}, {}}));
}

inline StateFormula f_and(StateFormula lhs, StateFormula rhs) {
    return StateFormula(std::make_shared<const StateFormula::Node>(StateFormula::Node{
        StateFormula::Kind::And, {}, std::move(lhs), std::move(rhs), Comparison::Ge, {}, {}}));
}

inline StateFormula f_or(StateFormula lhs, StateFormula rhs) {
    return StateFormula(std::make_shared<const StateFormula::Node>(StateFormula::Node{
        StateFormula::Kind::Or, {}, std::move(lhs), std::move(rhs), Comparison::Ge, {}, {}}));
}

inline StateFormula prob(Comparison cmp, Rational bound, PathFormula path) {
    if (bound < Rational(0) || bound > Rational(1))
        throw std::domain_error("probability bound outside [0,1]: " + bound.to_string());
    return StateFormula(std::make_shared<const StateFormula::Node>(StateFormula::Node{
        StateFormula::Kind::Prob, {}, {}, {}, cmp, std::move(bound), std::move(path)}));
}

inline PathFormula next(StateFormula arg) {
    return PathFormula(std::make_shared<const PathFormula::Node>(
        PathFormula::Node{PathFormula::Kind::Next, std::move(arg), {}}));
}

inline PathFormula until(StateFormula lhs, StateFormula rhs) {
    return PathFormula(std::make_shared<const PathFormula::Node>(
        PathFormula::Node{PathFormula::Kind::Until, std::move(lhs), std::move(rhs)}));
}

inline PathFormula weak_until(StateFormula lhs, StateFormula rhs) {
    return PathFormula(std::make_shared<const PathFormula::Node>(
        PathFormula::Node{PathFormula::Kind::WeakUntil, std::move(lhs), std::move(rhs)}));
}

// F phi == true U phi, G phi == phi W false (expanded immediately).
inline PathFormula eventually(StateFormula arg) { return until(f_true(), std::move(arg)); }
inline PathFormula globally(StateFormula arg) { return weak_until(std::move(arg), f_false()); }

inline bool StateFormula::operator==(const StateFormula& other) const {
    if (node_ == other.node_) return true;
    if (!node_ || !other.node_) return false;
    if (node_->kind != other.node_->kind) return false;
    switch (node_->kind) {
        case Kind::True:
        case Kind::False:
            return true;
        case Kind::Atom:
            return node_->atom == other.node_->atom;
        case Kind::Not:
            return node_->lhs == other.node_->lhs;
        case Kind::And:
        case Kind::Or:
            return node_->lhs == other.node_->lhs && node_->rhs == other.node_->rhs;
        case Kind::Prob:
            return node_->cmp == other.node_->cmp && node_->bound == other.node_->bound &&
                   node_->path_formula == other.node_->path_formula;
    }
    return false;
}

inline bool PathFormula::operator==(const PathFormula& other) const {
    if (node_ == other.node_) return true;
    if (!node_ || !other.node_) return false;
    if (node_->kind != other.node_->kind) return false;
    if (node_->kind == Kind::Next) return node_->lhs == other.node_->lhs;
    return node_->lhs == other.node_->lhs && node_->rhs == other.node_->rhs;
}

inline void StateFormula::collect_atoms(std::set<std::string>& out) const {
    switch (node_->kind) {
        case Kind::True:
        case Kind::False:
            return;
        case Kind::Atom:
            out.insert(node_->atom);
            return;
        case Kind::Not:
            node_->lhs.collect_atoms(out);
            return;
        case Kind::And:
        case Kind::Or:
            node_->lhs.collect_atoms(out);
            node_->rhs.collect_atoms(out);
            return;
        case Kind::Prob: {
            const PathFormula& p = node_->path_formula;
            p.lhs().collect_atoms(out);
            if (p.kind() != PathFormula::Kind::Next) p.rhs().collect_atoms(out);
            return;
        }
    }
}

} // namespace pctl
