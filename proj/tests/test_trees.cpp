#include <doctest.h>

#include "fixtures.hpp"
#include "pctl/parser.hpp"
#include "pctl/trees.hpp"

using namespace pctl;

namespace {

// branching a-root with b/c/d/e spine, child names chosen to keep the
// shrink collision-free
ProbTree spine_tree() {
    ProbTree t;
    t.nodes[{0}] = {{"a"}, Rational(1)};
    t.nodes[{0, 0}] = {{"b"}, Rational(1, 2)};
    t.nodes[{0, 1}] = {{"c"}, Rational(1, 2)};
    t.nodes[{0, 0, 2}] = {{"d"}, Rational(2, 5)};
    t.nodes[{0, 0, 3}] = {{"e"}, Rational(3, 5)};
    return t;
}

// drop the strict subtrees of pseudo-randomly chosen nodes; the result is
// a prefix by construction
ProbTree random_prefix(const ProbTree& t, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<TreePath> cuts;
    for (const auto& [path, node] : t.nodes)
        if (path.size() > 1 && rng.below(3) == 0) cuts.push_back(path);
    ProbTree out;
    for (const auto& [path, node] : t.nodes) {
        bool below_cut = false;
        for (const auto& cut : cuts)
            if (path.size() > cut.size() && std::equal(cut.begin(), cut.end(), path.begin()))
                below_cut = true;
        if (!below_cut) out.nodes[path] = node;
    }
    return out;
}

} // namespace

TEST_CASE("unfolding prefixes of the loop chain") {
    MarkovChain mc = fixtures::loop_chain();
    ProbTree t1 = from_unfolding(mc, 1);
    CHECK(t1.nodes.size() == 1);
    CHECK(t1.nodes.at({0}).label == std::set<std::string>{"a"});

    ProbTree t2 = from_unfolding(mc, 2);
    REQUIRE(t2.nodes.size() == 4);
    CHECK(t2.nodes.at({0, 0}).edge_prob == Rational(1, 5));
    CHECK(t2.nodes.at({0, 1}).edge_prob == Rational(2, 5));
    CHECK(t2.nodes.at({0, 1}).label == std::set<std::string>{"b"});
    CHECK(t2.nodes.at({0, 2}).edge_prob == Rational(2, 5));

    ProbTree t3 = from_unfolding(mc, 3);
    CHECK(t3.nodes.size() == 9);
    CHECK(validate_tree(t3).empty());
    // the nine nodes written as digit strings: 0, 00, 01, 02, 000, 001,
    // 002, 011, 022
    for (TreePath path : std::vector<TreePath>{{0},
                                               {0, 0},
                                               {0, 1},
                                               {0, 2},
                                               {0, 0, 0},
                                               {0, 0, 1},
                                               {0, 0, 2},
                                               {0, 1, 1},
                                               {0, 2, 2}})
        CHECK(t3.contains(path));
    CHECK(t3.nodes.at({0, 0}).label == std::set<std::string>{"a"});
    CHECK(t3.nodes.at({0, 0, 1}).edge_prob == Rational(2, 5));
}

TEST_CASE("prefix relation") {
    MarkovChain mc = fixtures::loop_chain();
    ProbTree t2 = from_unfolding(mc, 2);
    ProbTree t3 = from_unfolding(mc, 3);
    CHECK(is_prefix(t2, t3));
    CHECK(!is_prefix(t3, t2));
    CHECK(is_prefix(t3, t3));
    // perturbing one edge probability breaks the relation
    ProbTree bent = t2;
    bent.nodes[{0, 0}].edge_prob = Rational(1, 4);
    CHECK(!is_prefix(bent, t3));
    // as does relabelling
    ProbTree relabeled = t2;
    relabeled.nodes[{0, 1}].label = {"c"};
    CHECK(!is_prefix(relabeled, t3));
}

TEST_CASE("prefix is a partial order on generated trees") {
    for (int i = 0; i < 12; ++i) {
        GenParams params;
        params.seed = 11000 + i;
        params.state_count = 3 + i % 3;
        MarkovChain mc = random_mc(params);
        ProbTree full = from_unfolding(mc, 3);
        ProbTree a = random_prefix(full, 21 + i);
        ProbTree b = random_prefix(a, 91 + i);
        CHECK(is_prefix(a, a));
        CHECK(is_prefix(b, a));
        CHECK(is_prefix(a, full));
        CHECK(is_prefix(b, full));         // transitivity instance
        if (is_prefix(a, b)) CHECK(a == b); // antisymmetry
        CHECK(is_prefix(from_unfolding(mc, 2), from_unfolding(mc, 3)));
        CHECK(is_prefix(from_unfolding(mc, 3), from_unfolding(mc, 4)));
    }
}

TEST_CASE("suffix reindexes the subtree") {
    MarkovChain mc = fixtures::loop_chain();
    ProbTree t = from_unfolding(mc, 3);
    CHECK(suffix_at(t, t.root()) == t);
    // jumping to the absorbing b-state gives the all-b tree
    ProbTree suffix = suffix_at(t, {0, 1});
    ProbTree all_b = from_unfolding(reroot(mc, 1), 2);
    CHECK(suffix == all_b);
    // a leaf suffix is a single node
    CHECK(suffix_at(t, {0, 1, 1}).nodes.size() == 1);
    CHECK_THROWS_AS(suffix_at(t, {9, 9}), std::invalid_argument);
}

TEST_CASE("stuttering duplicates a node with probability one") {
    ProbTree t1 = spine_tree();
    ProbTree t2 = stutter_tree(t1, {0, 1});
    CHECK(validate_tree(t2).empty());
    REQUIRE(t2.contains({0, 1, 1}));
    CHECK(t2.nodes.at({0, 1, 1}).label == std::set<std::string>{"c"});
    CHECK(t2.nodes.at({0, 1, 1}).edge_prob == Rational(1));
    CHECK(t2.nodes.at({0, 1}).edge_prob == Rational(1, 2));
    CHECK(t2.nodes.size() == t1.nodes.size() + 1);
}

TEST_CASE("stuttering an internal node shifts its subtree below the copy") {
    ProbTree t1 = spine_tree();
    ProbTree st = stutter_tree(t1, {0, 0});
    CHECK(validate_tree(st).empty());
    REQUIRE(st.contains({0, 0, 0}));
    CHECK(st.nodes.at({0, 0, 0}).label == std::set<std::string>{"b"});
    CHECK(st.contains({0, 0, 0, 2}));
    CHECK(st.nodes.at({0, 0, 0, 2}).edge_prob == Rational(2, 5));
    CHECK(!st.contains({0, 0, 2}));
}

TEST_CASE("shrinking multiplies the probabilities through the deleted node") {
    ProbTree t1 = spine_tree();
    ProbTree t3 = shrink_tree(t1, {0, 0});
    CHECK(validate_tree(t3).empty());
    REQUIRE(t3.contains({0, 2}));
    REQUIRE(t3.contains({0, 3}));
    CHECK(t3.nodes.at({0, 2}).edge_prob == Rational(1, 5));  // 0.5 * 0.4
    CHECK(t3.nodes.at({0, 3}).edge_prob == Rational(3, 10)); // 0.5 * 0.6
    CHECK(t3.nodes.at({0, 1}).edge_prob == Rational(1, 2));
    CHECK(!t3.contains({0, 0}));
}

TEST_CASE("stutter then shrink of the copy is the identity") {
    ProbTree t1 = spine_tree();
    for (TreePath pi : {TreePath{0, 0}, TreePath{0, 1}, TreePath{0, 0, 2}}) {
        TreePath copy = pi;
        copy.push_back(pi.back());
        CHECK(shrink_tree(stutter_tree(t1, pi), copy) == t1);
    }
}

TEST_CASE("shrink guards") {
    ProbTree t1 = spine_tree();
    CHECK_THROWS_AS(shrink_tree(t1, {0}), std::invalid_argument);       // root
    CHECK_THROWS_AS(shrink_tree(t1, {0, 0, 2}), std::invalid_argument); // leaf with sibling
    // only-child leaf deletion turns the parent into a leaf
    ProbTree chain;
    chain.nodes[{0}] = {{"a"}, Rational(1)};
    chain.nodes[{0, 0}] = {{"b"}, Rational(1)};
    ProbTree shrunk = shrink_tree(chain, {0, 0});
    CHECK(shrunk.nodes.size() == 1);
    CHECK(validate_tree(shrunk).empty());
}

TEST_CASE("name collisions are rejected") {
    // stutter: the duplicate would collide with an existing child
    ProbTree t;
    t.nodes[{0}] = {{"a"}, Rational(1)};
    t.nodes[{0, 0}] = {{"a"}, Rational(1)};
    CHECK_THROWS_AS(stutter_tree(t, {0}), std::invalid_argument);
    // shrink: a shifted grandchild would collide with a sibling
    ProbTree u;
    u.nodes[{0}] = {{"a"}, Rational(1)};
    u.nodes[{0, 0}] = {{"b"}, Rational(1, 2)};
    u.nodes[{0, 1}] = {{"c"}, Rational(1, 2)};
    u.nodes[{0, 0, 1}] = {{"d"}, Rational(1)};
    CHECK_THROWS_AS(shrink_tree(u, {0, 0}), std::invalid_argument);
}

TEST_CASE("tree text format round trips") {
    for (const ProbTree& t : {spine_tree(), from_unfolding(fixtures::loop_chain(), 3)}) {
        std::string text = save_tree(t);
        ProbTree reloaded = load_tree(text);
        CHECK(save_tree(reloaded) == save_tree(t));
        CHECK(validate_tree(reloaded).empty());
    }
    ProbTree parsed = load_tree("(1, c)\n");
    CHECK(parsed.nodes.size() == 1);
    CHECK(parsed.nodes.at({0}).label == std::set<std::string>{"c"});
    CHECK_THROWS_AS(load_tree("(1, a)\n0: 1/2 b\n"), ParseError); // child sum != 1
    CHECK_THROWS_AS(load_tree("0: 1 b\n"), ParseError);           // no root line
}

TEST_CASE("extension oracle refutes the single-c prefix") {
    ProbTree t = load_tree("(1, c)\n");
    StateFormula phi = parse_formula("P>=0.5[a U b]");
    CHECK(!extension_oracle(t, phi).has_value());
    ExtensionFamily bigger;
    bigger.max_states = 2;
    bigger.grid = {Rational(1), Rational(1, 2), Rational(1, 4), Rational(3, 4)};
    CHECK(!extension_oracle(t, phi, bigger).has_value());
}

TEST_CASE("extension oracle refutes the capped-mass prefix") {
    // root a with 0.4 a-leaf and 0.6 c-leaf: no continuation can push the
    // until probability past 0.4
    ProbTree t;
    t.nodes[{0}] = {{"a"}, Rational(1)};
    t.nodes[{0, 0}] = {{"a"}, Rational(2, 5)};
    t.nodes[{0, 1}] = {{"c"}, Rational(3, 5)};
    CHECK(!extension_oracle(t, parse_formula("P>=0.5[a U b]")).has_value());
}

TEST_CASE("extension oracle finds eventual-b witnesses and they are sound") {
    StateFormula phi = parse_formula("P>=0.5[F b]");
    for (const ProbTree& t :
         {load_tree("(1, c)\n"), spine_tree(), from_unfolding(fixtures::split_chain(), 3)}) {
        auto witness = extension_oracle(t, phi);
        REQUIRE(witness.has_value());
        CHECK(check(attach_continuation(t, witness->continuation), phi));
    }
}

TEST_CASE("extension oracle respects the enumeration budget") {
    ProbTree t = load_tree("(1, c)\n");
    ExtensionFamily family;
    family.enumeration_budget = 10;
    family.max_states = 3;
    family.alphabet = {"a", "b", "c"};
    CHECK_THROWS_AS(extension_oracle(t, parse_formula("P>=0.5[a U b]"), family), SizeLimitError);
}

TEST_CASE("attach_continuation output is a valid chain") {
    ProbTree t = spine_tree();
    MarkovChain cont = fixtures::dirac_cycle();
    MarkovChain composite = attach_continuation(t, cont);
    CHECK(validate(composite).empty());
    CHECK(composite.state_count() == static_cast<int>(t.nodes.size()) + 2);
}
