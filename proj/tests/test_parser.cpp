#include <doctest.h>

#include "pctl/parser.hpp"
#include "pctl/prng.hpp"

using namespace pctl;

TEST_CASE("parses the running examples") {
    StateFormula phi = parse_formula("P<=0.5[a U b]");
    CHECK(phi == prob(Comparison::Le, Rational(1, 2), until(atom("a"), atom("b"))));

    CHECK(parse_formula("P>=1[F a]") ==
          prob(Comparison::Ge, Rational(1), until(f_true(), atom("a"))));
    CHECK(parse_formula("P>=1[G a]") ==
          prob(Comparison::Ge, Rational(1), weak_until(atom("a"), f_false())));
    CHECK(parse_formula("P>0[X !a]") ==
          prob(Comparison::Gt, Rational(0), next(f_not(atom("a")))));
    CHECK(parse_formula("P>=1/2[a W b]") ==
          prob(Comparison::Ge, Rational(1, 2), weak_until(atom("a"), atom("b"))));
}

TEST_CASE("precedence and parentheses") {
    CHECK(parse_formula("!a & b | c") == f_or(f_and(f_not(atom("a")), atom("b")), atom("c")));
    CHECK(parse_formula("a & (b | c)") == f_and(atom("a"), f_or(atom("b"), atom("c"))));
    // path operators are only valid inside P[...]
    CHECK_THROWS_AS(parse_formula("a & b U c"), ParseError);
}

TEST_CASE("equality bound sugar") {
    CHECK(parse_formula("P=1[F a]") == parse_formula("P>=1[F a]"));
    CHECK(parse_formula("P=0[F a]") == parse_formula("P<=0[F a]"));
    CHECK_THROWS_AS(parse_formula("P=0.5[F a]"), ParseError);
}

TEST_CASE("bound out of range") {
    CHECK_THROWS_AS(parse_formula("P>=2[X a]"), BoundOutOfRangeError);
    CHECK_THROWS_AS(parse_formula("P<=3/2[X a]"), BoundOutOfRangeError);
}

TEST_CASE("rejections carry a span within the input") {
    auto check_span = [](const std::string& text) {
        try {
            parse_formula(text);
            FAIL("expected a parse error for: " << text);
        } catch (const ParseError& e) {
            CHECK(e.span().start <= e.span().end);
            CHECK(e.span().end <= text.size());
        }
    };
    check_span("a &");
    check_span("P>=0.5[a U ]");
    check_span("P>=[a U b]");
    check_span("(a | b");
    check_span("a @ b");
    check_span("P>=0.5[a]");
    check_span("P>=2[X a]");
}

TEST_CASE("comments and whitespace") {
    CHECK(parse_formula("  a \t& b # trailing comment") == f_and(atom("a"), atom("b")));
    auto formulas = parse_formula_file("# corpus\na & b\n\nP>=1[F c] # live\n");
    REQUIRE(formulas.size() == 2);
    CHECK(formulas[0] == f_and(atom("a"), atom("b")));
    CHECK(formulas[1] == prob(Comparison::Ge, Rational(1), until(f_true(), atom("c"))));
}

TEST_CASE("printing matches the documented renderings") {
    CHECK(print_formula(prob(Comparison::Ge, Rational(1, 2), until(atom("a"), atom("b")))) ==
          "P>=1/2[a U b]");
    CHECK(print_formula(f_and(atom("a"), f_or(atom("b"), atom("c")))) == "a & (b | c)");
    CHECK(print_formula(prob(Comparison::Le, Rational(3, 10), next(atom("a")))) ==
          "P<=0.3[X a]");
    CHECK(print_formula(parse_formula("P>=1[F a]")) == "P>=1[F a]");
    CHECK(print_formula(parse_formula("P>=1[G a]")) == "P>=1[G a]");
}

namespace {

// random AST generator for the round-trip property
StateFormula random_state(SplitMix64& rng, int depth);

PathFormula random_path(SplitMix64& rng, int depth) {
    switch (rng.below(3)) {
        case 0: return next(random_state(rng, depth - 1));
        case 1: return until(random_state(rng, depth - 1), random_state(rng, depth - 1));
        default: return weak_until(random_state(rng, depth - 1), random_state(rng, depth - 1));
    }
}

StateFormula random_state(SplitMix64& rng, int depth) {
    static const char* names[] = {"a", "b", "c", "x1"};
    if (depth <= 0) {
        switch (rng.below(3)) {
            case 0: return f_true();
            case 1: return f_false();
            default: return atom(names[rng.below(4)]);
        }
    }
    switch (rng.below(6)) {
        case 0: return atom(names[rng.below(4)]);
        case 1: return f_not(random_state(rng, depth - 1));
        case 2: return f_and(random_state(rng, depth - 1), random_state(rng, depth - 1));
        case 3: return f_or(random_state(rng, depth - 1), random_state(rng, depth - 1));
        default: {
            static const Rational qs[] = {Rational(0), Rational(1, 4), Rational(1, 2),
                                          Rational(2, 3), Rational(1)};
            Comparison cmps[] = {Comparison::Lt, Comparison::Le, Comparison::Gt, Comparison::Ge};
            return prob(cmps[rng.below(4)], qs[rng.below(5)], random_path(rng, depth));
        }
    }
}

} // namespace

TEST_CASE("print/parse round trip on 1000 random ASTs") {
    SplitMix64 rng(2024);
    for (int i = 0; i < 1000; ++i) {
        StateFormula phi = random_state(rng, 4);
        std::string text = print_formula(phi);
        CAPTURE(text);
        StateFormula reparsed = parse_formula(text);
        CHECK(reparsed == phi);
    }
}
