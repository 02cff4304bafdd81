// Shared test chains. The two three-state chains below are the recurring
// examples: one splits from an a-state into absorbing a/c branches, the
// other reaches an absorbing b-state with total probability exactly 1/2
// through a 0.2 self-loop.

#pragma once

#include <cstdint>
#include <vector>

#include "pctl/formula.hpp"
#include "pctl/markov.hpp"
#include "pctl/prng.hpp"

namespace fixtures {

using pctl::MarkovChain;
using pctl::Rational;

// 0{a} -1/2-> 1{a}, -1/2-> 2{c}; 1 and 2 absorbing.
inline MarkovChain split_chain() {
    MarkovChain mc;
    mc.ap = {"a", "b", "c"};
    mc.labels = {{"a"}, {"a"}, {"c"}};
    mc.trans.resize(3);
    mc.trans[0][1] = Rational(1, 2);
    mc.trans[0][2] = Rational(1, 2);
    mc.trans[1][1] = Rational(1);
    mc.trans[2][2] = Rational(1);
    mc.init = 0;
    return mc;
}

// 0{a} -0.4-> 1{b}, -0.4-> 2{c}, -0.2-> 0; 1 and 2 absorbing.
// Reaches b with probability exactly 1/2, but never within finitely many
// steps.
inline MarkovChain loop_chain() {
    MarkovChain mc;
    mc.ap = {"a", "b", "c"};
    mc.labels = {{"a"}, {"b"}, {"c"}};
    mc.trans.resize(3);
    mc.trans[0][0] = Rational(1, 5);
    mc.trans[0][1] = Rational(2, 5);
    mc.trans[0][2] = Rational(2, 5);
    mc.trans[1][1] = Rational(1);
    mc.trans[2][2] = Rational(1);
    mc.init = 0;
    return mc;
}

// split_chain with state 1 relabelled b: reaches b with probability 1/2
// in a single step.
inline MarkovChain split_chain_b() {
    MarkovChain mc = split_chain();
    mc.labels[1] = {"b"};
    return mc;
}

// Dirac two-cycle with L(0)={a}, L(1)={}; the label mismatch blocks
// simulation while every live-fragment formula holds at both states.
inline MarkovChain dirac_cycle() {
    MarkovChain mc;
    mc.ap = {"a"};
    mc.labels = {{"a"}, {}};
    mc.trans.resize(2);
    mc.trans[0][1] = Rational(1);
    mc.trans[1][0] = Rational(1);
    mc.init = 0;
    return mc;
}

// 0{} -1/2-> 0, -1/2-> 1{a}; 1 absorbing. AF a fails at 0 (the eternal
// self-loop path) although a is reached almost surely.
inline MarkovChain lasso_to_a() {
    MarkovChain mc;
    mc.ap = {"a"};
    mc.labels = {{}, {"a"}};
    mc.trans.resize(2);
    mc.trans[0][0] = Rational(1, 2);
    mc.trans[0][1] = Rational(1, 2);
    mc.trans[1][1] = Rational(1);
    mc.init = 0;
    return mc;
}

// 0{a} -1/2-> 0, -1/2-> 1{}; 1 absorbing. EG a holds at 0 via the
// self-loop, but that single path carries probability mass zero.
inline MarkovChain lasso_from_a() {
    MarkovChain mc;
    mc.ap = {"a"};
    mc.labels = {{"a"}, {}};
    mc.trans.resize(2);
    mc.trans[0][0] = Rational(1, 2);
    mc.trans[0][1] = Rational(1, 2);
    mc.trans[1][1] = Rational(1);
    mc.init = 0;
    return mc;
}

// Five-state tree with an absorbing tail: 0{a} -> 1{b} (1/2), 2{c} (1/2);
// 1 -> 3{d} (0.4), 4{e} (0.6); 2,3,4 absorbing. Deleting state 1 rewires
// 0 -> 3 with 0.2 and 0 -> 4 with 0.3.
inline MarkovChain branch_tail_chain() {
    MarkovChain mc;
    mc.ap = {"a", "b", "c", "d", "e"};
    mc.labels = {{"a"}, {"b"}, {"c"}, {"d"}, {"e"}};
    mc.trans.resize(5);
    mc.trans[0][1] = Rational(1, 2);
    mc.trans[0][2] = Rational(1, 2);
    mc.trans[1][3] = Rational(2, 5);
    mc.trans[1][4] = Rational(3, 5);
    mc.trans[2][2] = Rational(1);
    mc.trans[3][3] = Rational(1);
    mc.trans[4][4] = Rational(1);
    mc.init = 0;
    return mc;
}

inline std::vector<MarkovChain> random_corpus(int count, std::uint64_t seed_base,
                                              int max_states = 8,
                                              std::vector<std::string> ap = {"a", "b"}) {
    std::vector<MarkovChain> out;
    for (int i = 0; i < count; ++i) {
        pctl::GenParams params;
        params.seed = seed_base + static_cast<std::uint64_t>(i);
        params.state_count = 1 + static_cast<int>(params.seed % max_states);
        params.max_out_degree = 3;
        params.ap = ap;
        out.push_back(pctl::random_mc(params));
    }
    return out;
}

inline pctl::Rational random_threshold(pctl::SplitMix64& rng) {
    static const pctl::Rational grid[] = {pctl::Rational(0), pctl::Rational(1, 4),
                                          pctl::Rational(1, 2), pctl::Rational(3, 4),
                                          pctl::Rational(1)};
    return grid[rng.below(5)];
}

// Arbitrary formulas, negations anywhere; exercises the normal-form path.
inline pctl::StateFormula random_formula(pctl::SplitMix64& rng,
                                         const std::vector<std::string>& ap, int depth) {
    using namespace pctl;
    if (depth <= 0) {
        switch (rng.below(4)) {
            case 0: return f_true();
            case 1: return f_false();
            default: return atom(ap[rng.below(ap.size())]);
        }
    }
    switch (rng.below(7)) {
        case 0: return atom(ap[rng.below(ap.size())]);
        case 1: return f_not(random_formula(rng, ap, depth - 1));
        case 2:
            return f_and(random_formula(rng, ap, depth - 1), random_formula(rng, ap, depth - 1));
        case 3:
            return f_or(random_formula(rng, ap, depth - 1), random_formula(rng, ap, depth - 1));
        default: {
            Comparison cmps[] = {Comparison::Lt, Comparison::Le, Comparison::Gt, Comparison::Ge};
            Comparison cmp = cmps[rng.below(4)];
            Rational q = random_threshold(rng);
            switch (rng.below(3)) {
                case 0: return prob(cmp, q, next(random_formula(rng, ap, depth - 1)));
                case 1:
                    return prob(cmp, q,
                                until(random_formula(rng, ap, depth - 1),
                                      random_formula(rng, ap, depth - 1)));
                default:
                    return prob(cmp, q,
                                weak_until(random_formula(rng, ap, depth - 1),
                                           random_formula(rng, ap, depth - 1)));
            }
        }
    }
}

// Boolean combinations of flat probability atoms and literals.
inline pctl::StateFormula random_flat_formula(pctl::SplitMix64& rng,
                                              const std::vector<std::string>& ap, int depth) {
    using namespace pctl;
    auto literal = [&]() {
        StateFormula lit = atom(ap[rng.below(ap.size())]);
        if (rng.coin()) lit = f_not(lit);
        return lit;
    };
    auto prob_atom = [&]() {
        Comparison cmp = rng.coin() ? Comparison::Le : Comparison::Ge;
        Rational q = random_threshold(rng);
        switch (rng.below(3)) {
            case 0: return prob(cmp, q, next(literal()));
            case 1: return prob(cmp, q, until(literal(), literal()));
            default: return prob(cmp, q, weak_until(literal(), literal()));
        }
    };
    if (depth <= 0) return rng.coin() ? literal() : prob_atom();
    switch (rng.below(4)) {
        case 0: return prob_atom();
        case 1: return literal();
        case 2:
            return f_and(random_flat_formula(rng, ap, depth - 1),
                         random_flat_formula(rng, ap, depth - 1));
        default:
            return f_or(random_flat_formula(rng, ap, depth - 1),
                        random_flat_formula(rng, ap, depth - 1));
    }
}

} // namespace fixtures
