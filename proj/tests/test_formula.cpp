#include <doctest.h>

#include "fixtures.hpp"
#include "pctl/formula.hpp"
#include "pctl/modelcheck.hpp"
#include "pctl/normal_form.hpp"
#include "pctl/parser.hpp"

using namespace pctl;

namespace {
const StateFormula a = atom("a");
const StateFormula b = atom("b");
} // namespace

TEST_CASE("structural equality") {
    CHECK(f_and(a, b) == f_and(a, b));
    CHECK(!(f_and(a, b) == f_and(b, a)));
    CHECK(prob(Comparison::Ge, Rational(1, 2), until(a, b)) ==
          prob(Comparison::Ge, Rational(1, 2), until(a, b)));
    CHECK(!(prob(Comparison::Ge, Rational(1, 2), until(a, b)) ==
            prob(Comparison::Gt, Rational(1, 2), until(a, b))));
    CHECK(eventually(a) == until(f_true(), a));
    CHECK(globally(a) == weak_until(a, f_false()));
}

TEST_CASE("bound outside unit interval is rejected at construction") {
    CHECK_THROWS_AS(prob(Comparison::Ge, Rational(2), next(a)), std::domain_error);
    CHECK_THROWS_AS(prob(Comparison::Ge, Rational(-1, 2), next(a)), std::domain_error);
}

TEST_CASE("pnf flips the comparison on a negated probability") {
    StateFormula phi = f_not(prob(Comparison::Ge, Rational(1, 2), until(a, b)));
    StateFormula expected = prob(Comparison::Lt, Rational(1, 2), until(a, b));
    CHECK(to_pnf(phi) == expected);
}

TEST_CASE("pnf applies De Morgan") {
    CHECK(to_pnf(f_not(f_and(a, b))) == f_or(f_not(a), f_not(b)));
    CHECK(to_pnf(f_not(f_or(a, b))) == f_and(f_not(a), f_not(b)));
    CHECK(to_pnf(f_not(f_not(a))) == a);
    CHECK(to_pnf(f_not(f_true())) == f_false());
}

TEST_CASE("negating a weak until dualizes to an until") {
    // !(P>=q[a W b]) == P<q[a W b] == P>1-q[(a & !b) U (!a & !b)]
    StateFormula phi = prob(Comparison::Ge, Rational(1, 2), weak_until(a, b));
    StateFormula n = negate(phi);
    StateFormula expected = prob(
        Comparison::Gt, Rational(1, 2),
        until(f_and(a, f_not(b)), f_and(f_not(a), f_not(b))));
    CHECK(n == expected);
}

TEST_CASE("pnf is idempotent on assorted shapes") {
    std::vector<StateFormula> shapes = {
        f_not(f_and(a, f_not(b))),
        f_not(prob(Comparison::Le, Rational(1, 4), weak_until(a, b))),
        f_not(prob(Comparison::Ge, Rational(1), next(f_not(f_or(a, b))))),
        f_and(f_not(f_or(a, b)), prob(Comparison::Ge, Rational(1, 3), until(f_not(a), b))),
    };
    for (const auto& phi : shapes) {
        StateFormula once = to_pnf(phi);
        CHECK(to_pnf(once) == once);
    }
}

TEST_CASE("literal recognition") {
    CHECK(is_literal(f_and(a, f_not(b))));
    CHECK(is_literal(f_true()));
    CHECK(is_literal(f_or(f_not(a), b)));
    CHECK(!is_literal(prob(Comparison::Ge, Rational(1), next(a))));
    CHECK(is_literal(to_pnf(f_not(f_and(a, b)))));
}

TEST_CASE("literal satisfiability by truth-table enumeration") {
    CHECK_FALSE(literal_sat(f_and(a, f_not(a))));
    CHECK(literal_sat(f_and(a, f_not(b)), {"a", "b"}));
    CHECK(literal_sat(f_and(to_pnf(f_not(f_and(a, b))), a), {"a", "b"}));
    CHECK_FALSE(literal_sat(f_false()));
    CHECK(literal_sat(f_true()));
    CHECK_THROWS_AS(literal_sat(prob(Comparison::Ge, Rational(1), next(a))),
                    std::invalid_argument);
}

TEST_CASE("flatness") {
    CHECK(is_flat(parse_formula("P<=0.5[a U b]")));
    CHECK(!is_flat(parse_formula("P>0.5[a U b]")));           // strict bound
    CHECK(!is_flat(parse_formula("P>=1[P>=1[F a] U b]")));    // nesting
    CHECK(is_flat(parse_formula("a & !b")));
    CHECK(is_flat(parse_formula("P>=1[X a & b] | P<=0[c W d]")));
    CHECK(!is_flat(parse_formula("!P>=1[X a]")));
}

TEST_CASE("outer cnf distributes or over and") {
    StateFormula A = prob(Comparison::Le, Rational(1, 2), until(a, b));
    StateFormula B = prob(Comparison::Ge, Rational(1, 2), weak_until(a, b));
    StateFormula C = prob(Comparison::Ge, Rational(1, 4), next(a));
    auto conjuncts = flat_outer_cnf(f_or(f_and(A, B), C));
    REQUIRE(conjuncts.size() == 2);
    CHECK(conjuncts[0] == f_or(A, C));
    CHECK(conjuncts[1] == f_or(B, C));
    for (const auto& c : conjuncts) CHECK(is_single_conjunct(c));
}

TEST_CASE("outer cnf keeps literal conjunctions intact") {
    StateFormula lit = f_and(a, f_not(b));
    StateFormula P = prob(Comparison::Le, Rational(1, 2), until(a, b));
    auto conjuncts = flat_outer_cnf(f_or(lit, P));
    REQUIRE(conjuncts.size() == 1);
    CHECK(conjuncts[0] == f_or(lit, P));
    CHECK(is_single_conjunct(conjuncts[0]));
}

TEST_CASE("outer cnf is the identity on a single probability atom") {
    StateFormula phi = parse_formula("P<=0.5[a U b]");
    auto conjuncts = flat_outer_cnf(phi);
    REQUIRE(conjuncts.size() == 1);
    CHECK(conjuncts[0] == phi);
}

TEST_CASE("pnf preserves satisfaction on random formulas and chains") {
    SplitMix64 rng(560);
    auto chains = fixtures::random_corpus(20, 56000, 6);
    for (int i = 0; i < 40; ++i) {
        StateFormula phi = fixtures::random_formula(rng, {"a", "b"}, 4);
        StateFormula pnf = to_pnf(phi);
        for (const auto& mc : chains) {
            CAPTURE(print_formula(phi));
            CHECK(check(mc, phi) == check(mc, pnf));
        }
    }
}

TEST_CASE("negate complements model checking and is an involution") {
    SplitMix64 rng(570);
    auto chains = fixtures::random_corpus(50, 57000, 6);
    CHECK(negate(atom("a")) == f_not(atom("a")));
    for (int i = 0; i < 25; ++i) {
        StateFormula phi = fixtures::random_formula(rng, {"a", "b"}, 3);
        StateFormula negated = negate(phi);
        StateFormula doubled = negate(negated);
        for (const auto& mc : chains) {
            CAPTURE(print_formula(phi));
            bool value = check(mc, phi);
            CHECK(check(mc, negated) == !value);
            CHECK(check(mc, doubled) == value);
        }
    }
}

TEST_CASE("cnf conjunction is equivalent to its input on the corpus") {
    SplitMix64 rng(580);
    auto chains = fixtures::random_corpus(50, 58000, 6);
    for (int i = 0; i < 20; ++i) {
        StateFormula phi = to_pnf(fixtures::random_flat_formula(rng, {"a", "b"}, 3));
        REQUIRE(is_flat(phi));
        auto conjuncts = flat_outer_cnf(phi);
        StateFormula rebuilt = conjuncts.front();
        for (std::size_t k = 1; k < conjuncts.size(); ++k)
            rebuilt = f_and(rebuilt, conjuncts[k]);
        for (const auto& c : conjuncts) CHECK(is_single_conjunct(c));
        for (const auto& mc : chains) {
            CAPTURE(print_formula(phi));
            CHECK(check(mc, phi) == check(mc, rebuilt));
        }
    }
}

TEST_CASE("outer cnf node budget") {
    // (p1&q1)|(p2&q2)|... blows up exponentially; a tiny budget trips
    StateFormula big = parse_formula("P>=1[X a]");
    for (int i = 0; i < 12; ++i)
        big = f_or(big, f_and(parse_formula("P>=1[X a]"), parse_formula("P<=0[X b]")));
    CHECK_THROWS_AS(flat_outer_cnf(big, 100), SizeLimitError);
}
