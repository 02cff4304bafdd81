// Exact PCTL satisfaction over finite Markov chains.
//
// Until probabilities solve the fixed-point linear system by Gaussian
// elimination over rationals after zeroing the states that cannot reach
// the target; value iteration cannot certify satisfaction at an exactly
// attained bound, elimination can.

#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "pctl/errors.hpp"
#include "pctl/formula.hpp"
#include "pctl/markov.hpp"
#include "pctl/normal_form.hpp"
#include "pctl/parser.hpp"
#include "pctl/rational.hpp"

namespace pctl {

using ProbVector = std::vector<Rational>;
using StateMask = std::vector<bool>;

namespace detail {

// Least set containing the target and closed under allowed predecessors.
inline StateMask backward_reachable(const MarkovChain& mc, const StateMask& allowed,
                                    const StateMask& target) {
    int n = mc.state_count();
    std::vector<std::vector<int>> preds(n);
    for (int s = 0; s < n; ++s)
        for (const auto& [t, p] : mc.trans[s]) preds[t].push_back(s);
    StateMask reach(n, false);
    std::vector<int> stack;
    for (int s = 0; s < n; ++s)
        if (target[s]) {
            reach[s] = true;
            stack.push_back(s);
        }
    while (!stack.empty()) {
        int s = stack.back();
        stack.pop_back();
        for (int u : preds[s])
            if (!reach[u] && allowed[u] && !target[u]) {
                reach[u] = true;
                stack.push_back(u);
            }
    }
    return reach;
}

// Sparse elimination tuned for the tree-heavy systems unfoldings create:
// always pivot on the smallest remaining row, so acyclic parts collapse
// by pure substitution and only the cyclic core densifies.
class LinearSystem {
public:
    explicit LinearSystem(int vars) : rows_(vars), rhs_(vars), alive_(vars, true) {}

    void set_coefficient(int row, int var, Rational value) {
        if (value.is_zero())
            rows_[row].erase(var);
        else
            rows_[row][var] = std::move(value);
    }

    void set_rhs(int row, Rational value) { rhs_[row] = std::move(value); }

    // Solves assuming a unique solution exists.
    std::vector<Rational> solve() {
        int n = static_cast<int>(rows_.size());
        struct Solved {
            int var;
            std::map<int, Rational> expr;
            Rational constant;
        };
        std::vector<Solved> stack;
        for (int step = 0; step < n; ++step) {
            int best = -1;
            for (int r = 0; r < n; ++r) {
                if (!alive_[r]) continue;
                if (best == -1 || rows_[r].size() < rows_[best].size()) best = r;
            }
            if (best == -1) break;
            if (rows_[best].empty())
                throw std::logic_error("linear system is singular");
            // prefer the diagonal when present
            int var = rows_[best].count(best) ? best : rows_[best].begin()->first;
            Rational pivot = rows_[best].at(var);
            Solved solved;
            solved.var = var;
            solved.constant = rhs_[best] / pivot;
            for (const auto& [w, c] : rows_[best])
                if (w != var) solved.expr[w] = -(c / pivot);
            alive_[best] = false;
            for (int r = 0; r < n; ++r) {
                if (!alive_[r]) continue;
                auto it = rows_[r].find(var);
                if (it == rows_[r].end()) continue;
                Rational factor = it->second;
                rows_[r].erase(it);
                // x_var = constant + expr, so the row gains factor*expr on
                // the left and loses factor*constant on the right
                for (const auto& [w, c] : solved.expr) {
                    Rational updated = (rows_[r].count(w) ? rows_[r][w] : Rational(0)) + factor * c;
                    set_coefficient(r, w, updated);
                }
                rhs_[r] -= factor * solved.constant;
            }
            stack.push_back(std::move(solved));
        }
        std::vector<Rational> solution(n, Rational(0));
        for (std::size_t i = stack.size(); i-- > 0;) {
            const Solved& s = stack[i];
            Rational value = s.constant;
            for (const auto& [w, c] : s.expr) value += c * solution[w];
            solution[s.var] = value;
        }
        return solution;
    }

private:
    std::vector<std::map<int, Rational>> rows_;
    std::vector<Rational> rhs_;
    std::vector<bool> alive_;
};

} // namespace detail

// Exact probability, per state, of reaching a target state through
// allowed states.
inline ProbVector prob_until(const MarkovChain& mc, const StateMask& allowed,
                             const StateMask& target) {
    int n = mc.state_count();
    StateMask reach = detail::backward_reachable(mc, allowed, target);
    // unknowns: allowed, non-target states that can still reach the target
    std::vector<int> var_of(n, -1);
    std::vector<int> state_of;
    for (int s = 0; s < n; ++s)
        if (reach[s] && !target[s]) {
            var_of[s] = static_cast<int>(state_of.size());
            state_of.push_back(s);
        }
    ProbVector result(n, Rational(0));
    for (int s = 0; s < n; ++s)
        if (target[s]) result[s] = Rational(1);
    if (state_of.empty()) return result;

    detail::LinearSystem system(static_cast<int>(state_of.size()));
    for (std::size_t i = 0; i < state_of.size(); ++i) {
        int s = state_of[i];
        Rational diag(1);
        Rational rhs(0);
        for (const auto& [t, p] : mc.trans[s]) {
            if (target[t]) {
                rhs += p;
            } else if (var_of[t] >= 0) {
                if (var_of[t] == static_cast<int>(i))
                    diag -= p;
                else
                    system.set_coefficient(static_cast<int>(i), var_of[t], -p);
            }
        }
        system.set_coefficient(static_cast<int>(i), static_cast<int>(i), diag);
        system.set_rhs(static_cast<int>(i), rhs);
    }
    auto solution = system.solve();
    for (std::size_t i = 0; i < state_of.size(); ++i) result[state_of[i]] = solution[i];
    return result;
}

// Pr(s1 W s2) = 1 - Pr((s1 and not s2) U (neither)).
inline ProbVector prob_weak_until(const MarkovChain& mc, const StateMask& s1,
                                  const StateMask& s2) {
    int n = mc.state_count();
    StateMask stay(n), escape(n);
    for (int i = 0; i < n; ++i) {
        stay[i] = s1[i] && !s2[i];
        escape[i] = !s1[i] && !s2[i];
    }
    ProbVector bad = prob_until(mc, stay, escape);
    ProbVector result(n);
    for (int i = 0; i < n; ++i) result[i] = Rational(1) - bad[i];
    return result;
}

inline ProbVector prob_next(const MarkovChain& mc, const StateMask& target) {
    int n = mc.state_count();
    ProbVector result(n, Rational(0));
    for (int s = 0; s < n; ++s)
        for (const auto& [t, p] : mc.trans[s])
            if (target[t]) result[s] += p;
    return result;
}

inline StateMask sat_mask(const MarkovChain& mc, const StateFormula& phi) {
    int n = mc.state_count();
    switch (phi.kind()) {
        case StateFormula::Kind::True:
            return StateMask(n, true);
        case StateFormula::Kind::False:
            return StateMask(n, false);
        case StateFormula::Kind::Atom: {
            StateMask mask(n, false);
            for (int s = 0; s < n; ++s) mask[s] = mc.has_label(s, phi.atom_name());
            return mask;
        }
        case StateFormula::Kind::Not: {
            StateMask mask = sat_mask(mc, phi.inner());
            for (int s = 0; s < n; ++s) mask[s] = !mask[s];
            return mask;
        }
        case StateFormula::Kind::And: {
            StateMask a = sat_mask(mc, phi.lhs());
            StateMask b = sat_mask(mc, phi.rhs());
            for (int s = 0; s < n; ++s) a[s] = a[s] && b[s];
            return a;
        }
        case StateFormula::Kind::Or: {
            StateMask a = sat_mask(mc, phi.lhs());
            StateMask b = sat_mask(mc, phi.rhs());
            for (int s = 0; s < n; ++s) a[s] = a[s] || b[s];
            return a;
        }
        case StateFormula::Kind::Prob: {
            const PathFormula& p = phi.path();
            ProbVector probs;
            if (p.kind() == PathFormula::Kind::Next) {
                probs = prob_next(mc, sat_mask(mc, p.arg()));
            } else {
                StateMask lhs = sat_mask(mc, p.lhs());
                StateMask rhs = sat_mask(mc, p.rhs());
                probs = p.kind() == PathFormula::Kind::Until ? prob_until(mc, lhs, rhs)
                                                             : prob_weak_until(mc, lhs, rhs);
            }
            StateMask mask(n, false);
            for (int s = 0; s < n; ++s) mask[s] = compare(probs[s], phi.cmp(), phi.bound());
            return mask;
        }
    }
    return StateMask(n, false);
}

inline std::set<int> sat_states(const MarkovChain& mc, const StateFormula& phi) {
    StateMask mask = sat_mask(mc, phi);
    std::set<int> out;
    for (int s = 0; s < mc.state_count(); ++s)
        if (mask[s]) out.insert(s);
    return out;
}

inline bool check(const MarkovChain& mc, const StateFormula& phi) {
    return sat_mask(mc, phi)[mc.init];
}

// Probability of the path formula, per state; what the P operator compares.
inline ProbVector path_probabilities(const MarkovChain& mc, const PathFormula& p) {
    if (p.kind() == PathFormula::Kind::Next) return prob_next(mc, sat_mask(mc, p.arg()));
    StateMask lhs = sat_mask(mc, p.lhs());
    StateMask rhs = sat_mask(mc, p.rhs());
    return p.kind() == PathFormula::Kind::Until ? prob_until(mc, lhs, rhs)
                                                : prob_weak_until(mc, lhs, rhs);
}

// ---------------------------------------------------------------------------
// Qualitative CTL over the underlying digraph
// ---------------------------------------------------------------------------

struct CtlFormula {
    enum class Kind {
        ExistsEventually,
        ForallEventually,
        ExistsGlobally,
        ForallGlobally,
        ExistsUntil,
    };
    Kind kind;
    StateFormula arg1;
    StateFormula arg2; // ExistsUntil only
};

namespace detail {

inline StateMask literal_mask(const MarkovChain& mc, const StateFormula& phi) {
    if (!is_literal(phi))
        throw std::invalid_argument("ctl_check: arguments must be literal formulas");
    StateMask mask(mc.state_count(), false);
    for (int s = 0; s < mc.state_count(); ++s)
        mask[s] = eval_literal(phi, [&](const std::string& a) { return mc.has_label(s, a); });
    return mask;
}

inline StateMask exists_until_fixpoint(const MarkovChain& mc, const StateMask& lhs,
                                       const StateMask& rhs) {
    int n = mc.state_count();
    StateMask sat = rhs;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int s = 0; s < n; ++s) {
            if (sat[s] || !lhs[s]) continue;
            for (const auto& [t, p] : mc.trans[s])
                if (sat[t]) {
                    sat[s] = true;
                    changed = true;
                    break;
                }
        }
    }
    return sat;
}

inline StateMask exists_globally_fixpoint(const MarkovChain& mc, const StateMask& arg) {
    int n = mc.state_count();
    StateMask sat = arg;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int s = 0; s < n; ++s) {
            if (!sat[s]) continue;
            bool has_successor = false;
            for (const auto& [t, p] : mc.trans[s])
                if (sat[t]) {
                    has_successor = true;
                    break;
                }
            if (!has_successor) {
                sat[s] = false;
                changed = true;
            }
        }
    }
    return sat;
}

} // namespace detail

inline std::set<int> ctl_check(const MarkovChain& mc, const CtlFormula& psi) {
    int n = mc.state_count();
    StateMask result;
    switch (psi.kind) {
        case CtlFormula::Kind::ExistsUntil:
            result = detail::exists_until_fixpoint(mc, detail::literal_mask(mc, psi.arg1),
                                                   detail::literal_mask(mc, psi.arg2));
            break;
        case CtlFormula::Kind::ExistsEventually:
            result = detail::exists_until_fixpoint(mc, StateMask(n, true),
                                                   detail::literal_mask(mc, psi.arg1));
            break;
        case CtlFormula::Kind::ExistsGlobally:
            result = detail::exists_globally_fixpoint(mc, detail::literal_mask(mc, psi.arg1));
            break;
        case CtlFormula::Kind::ForallEventually: {
            // AF p == !EG !p
            result = detail::exists_globally_fixpoint(
                mc, detail::literal_mask(mc, f_not(psi.arg1)));
            for (int s = 0; s < n; ++s) result[s] = !result[s];
            break;
        }
        case CtlFormula::Kind::ForallGlobally: {
            // AG p == !EF !p
            result = detail::exists_until_fixpoint(mc, StateMask(n, true),
                                                   detail::literal_mask(mc, f_not(psi.arg1)));
            for (int s = 0; s < n; ++s) result[s] = !result[s];
            break;
        }
    }
    std::set<int> out;
    for (int s = 0; s < n; ++s)
        if (result[s]) out.insert(s);
    return out;
}

// Query syntax: 'EF p', 'AF p', 'EG p', 'AG p', 'E p U q' with literal
// arguments.
inline CtlFormula parse_ctl_query(const std::string& text) {
    auto tokens = detail::Lexer(text).run();
    if (tokens.empty() || tokens[0].kind != detail::Tok::Ident)
        throw ParseError("expected one of EF, AF, EG, AG, E", tokens.empty() ? SourceSpan{}
                                                                             : tokens[0].span);
    std::string op = tokens[0].text;
    std::size_t rest_begin = tokens[0].span.end;
    std::string rest = text.substr(rest_begin);
    auto literal_arg = [&](const std::string& s) {
        StateFormula phi = parse_formula(s);
        if (!is_literal(phi))
            throw ParseError("CTL arguments must be literal formulas", {0, s.size()});
        return phi;
    };
    if (op == "EF") return {CtlFormula::Kind::ExistsEventually, literal_arg(rest), {}};
    if (op == "AF") return {CtlFormula::Kind::ForallEventually, literal_arg(rest), {}};
    if (op == "EG") return {CtlFormula::Kind::ExistsGlobally, literal_arg(rest), {}};
    if (op == "AG") return {CtlFormula::Kind::ForallGlobally, literal_arg(rest), {}};
    if (op == "E") {
        // split at the top-level U keyword
        auto rest_tokens = detail::Lexer(rest).run();
        int bracket_depth = 0;
        std::size_t split = std::string::npos;
        for (const auto& t : rest_tokens) {
            if (t.kind == detail::Tok::LBracket) ++bracket_depth;
            if (t.kind == detail::Tok::RBracket) --bracket_depth;
            if (t.kind == detail::Tok::KwU && bracket_depth == 0) {
                split = t.span.start;
                break;
            }
        }
        if (split == std::string::npos)
            throw ParseError("expected 'E p U q'", {0, text.size()});
        return {CtlFormula::Kind::ExistsUntil, literal_arg(rest.substr(0, split)),
                literal_arg(rest.substr(split + 1))};
    }
    throw ParseError("unknown CTL operator '" + op + "'", tokens[0].span);
}

} // namespace pctl
