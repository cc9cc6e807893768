#include <doctest.h>

#include <random>

#include "algsem/formula.hpp"
#include "support.hpp"

using namespace algsem;
using test_support::signature;

namespace {

Formula random_formula(const Signature& sig, std::mt19937& rng, int depth) {
    std::uniform_int_distribution<int> coin(0, 3);
    if (depth == 0 || coin(rng) == 0) {
        int nc = static_cast<int>(sig.constants.size());
        int pick = std::uniform_int_distribution<int>(0, nc + 2)(rng);
        if (pick < nc) return Formula::constant(sig, pick);
        return Formula::variable("x" + std::to_string(pick - nc));
    }
    int op = std::uniform_int_distribution<int>(0, static_cast<int>(sig.operations.size()) - 1)(rng);
    std::vector<Formula> args;
    for (int i = 0; i < sig.arity(op); ++i) args.push_back(random_formula(sig, rng, depth - 1));
    return Formula::apply(sig, op, args);
}

// Count of formulas with at most d nodes on the longest branch, by recursion.
long pool_count(const Signature& sig, int depth, int vars) {
    long atoms = vars + static_cast<long>(sig.constants.size());
    long n = atoms;
    for (int d = 2; d <= depth; ++d) {
        long next = atoms;
        for (const auto& op : sig.operations) {
            long t = 1;
            for (int i = 0; i < op.arity; ++i) t *= n;
            next += t;
        }
        n = next;
    }
    return n;
}

}  // namespace

TEST_CASE("parse_formula builds trees and rejects bad input") {
    Signature s = signature({"c0"}, {{"and", 2}, {"box", 1}});
    Formula f = parse_formula("and(x,y)", s);
    CHECK(f.is_operation());
    CHECK(f.name() == "and");
    CHECK(f.arg(0) == Formula::variable("x"));
    CHECK(to_string(parse_formula(" box( box (c0) ) ", s)) == "box(box(c0))");
    CHECK_THROWS_AS(parse_formula("and(x)", s), Error);
    CHECK_THROWS_AS(parse_formula("or(x,y)", s), Error);
    CHECK_THROWS_AS(parse_formula("and(x,y", s), Error);
    CHECK_THROWS_AS(parse_formula("c0(x)", s), Error);
}

TEST_CASE("substitution examples") {
    Signature s = signature({"c0"}, {{"and", 2}, {"box", 1}});
    Formula x = Formula::variable("x");
    CHECK(substitute(x, {{"x", parse_formula("and(y,y)", s)}}) == parse_formula("and(y,y)", s));
    Formula f = parse_formula("and(x,box(y))", s);
    CHECK(substitute(f, Substitution{}) == f);
    CHECK(substitute(parse_formula("box(x)", s), "x", Formula::constant(s, 0)) ==
          parse_formula("box(c0)", s));
}

TEST_CASE("graph-based signatures") {
    CHECK(signature({"c0", "c1"}, {{"box", 1}}).graph_based());
    CHECK_FALSE(signature({}, {{"and", 2}}).graph_based());
    CHECK(signature({"c0", "c1"}, {}).graph_based());
    CHECK_FALSE(signature({}, {{"box", 1}, {"dia", 1}}).graph_based());
}

TEST_CASE("signature validation") {
    CHECK_THROWS_AS(signature({"c0", "c0"}, {}).validate(), Error);
    CHECK_THROWS_AS(signature({"0"}, {}).validate(), Error);
    CHECK_NOTHROW(signature({"0"}, {}).validate(true));
    CHECK_THROWS_AS(signature({}, {{"f", 0}}).validate(), Error);
    CHECK_THROWS_AS(signature({"f"}, {{"f", 1}}).validate(), Error);
}

TEST_CASE("subformula trees") {
    Signature s = signature({"c0"}, {{"and", 2}, {"box", 1}});
    std::string x = "x";
    CHECK(subformula_tree(Formula::variable("x"), &x).empty());
    auto t = subformula_tree(parse_formula("and(x,c0)", s), &x);
    REQUIRE(t.size() == 2);
    CHECK(t.nodes[0].label == "and");
    CHECK(t.nodes[1].label == "c0");
    auto chain = subformula_tree(parse_formula("box(box(x))", s));
    CHECK(chain.size() == 3);
    CHECK(chain.leaf_count("x") == 1);
}

TEST_CASE("box and diamond from an n-ary operation") {
    Signature s = signature({}, {{"and", 2}, {"f", 3}, {"box", 1}});
    auto [b, d] = box_diamond_from_nary(s, 0);
    CHECK(to_string(b) == "and(and(x,x),x)");
    CHECK(to_string(d) == "and(x,and(x,x))");
    auto [b3, d3] = box_diamond_from_nary(s, 1);
    CHECK(to_string(b3) == "f(f(x,x,x),x,x)");
    CHECK(to_string(d3) == "f(x,f(x,x,x),x)");
    CHECK_THROWS_AS(box_diamond_from_nary(s, 2), Error);
}

TEST_CASE("iteration helpers") {
    Signature s = signature({"c0"}, {{"box", 1}});
    Formula x = Formula::variable("x");
    CHECK(iterate_op(s, 0, 0, x) == x);
    CHECK(to_string(iterate_op(s, 0, 3, Formula::constant(s, 0))) == "box(box(box(c0)))");
    CHECK(to_string(iterate(parse_formula("box(box(x))", s), "x", 2, x)) == "box(box(box(box(x))))");
}

TEST_CASE("equations parse and print") {
    Signature s = signature({"one"}, {{"and", 2}});
    auto eqs = parse_equations("x ~ one; and(x,x) ~ x", s);
    REQUIRE(eqs.size() == 2);
    CHECK(to_string(eqs[0]) == "x ~ one");
    CHECK(parse_equations("", s).empty());
    CHECK_THROWS_AS(parse_equation("x = one", s), Error);
}

TEST_CASE("property: print/parse round trip and tree round trip") {
    Signature s = signature({"c0", "c1"}, {{"and", 2}, {"box", 1}, {"f", 3}});
    std::mt19937 rng(7);
    for (int i = 0; i < 500; ++i) {
        Formula f = random_formula(s, rng, 5);
        CHECK(parse_formula(to_string(f), s) == f);
        auto t = subformula_tree(f);
        CHECK(static_cast<int>(t.size()) == f.size());
        CHECK(formula_from_tree(t) == f);
        std::string x0 = "x0";
        CHECK(static_cast<int>(subformula_tree(f, &x0).size()) ==
              f.size() - occurrences(f, "x0"));
    }
}

TEST_CASE("property: substitution composes") {
    Signature s = signature({"c0"}, {{"and", 2}, {"box", 1}});
    std::mt19937 rng(11);
    for (int i = 0; i < 300; ++i) {
        Formula f = random_formula(s, rng, 4);
        Substitution s1, s2;
        for (int v = 0; v < 3; ++v) {
            if (rng() & 1) s1["x" + std::to_string(v)] = random_formula(s, rng, 2);
            if (rng() & 1) s2["x" + std::to_string(v)] = random_formula(s, rng, 2);
        }
        CHECK(substitute(f, compose(s1, s2)) == substitute(substitute(f, s2), s1));
    }
}

TEST_CASE("formula pool sizes match a counting recursion") {
    Signature d2 = signature({}, {{"and", 2}, {"or", 2}});
    // 2 atoms, then 2 + 2*2^2 = 10, then 2 + 2*10^2 = 202
    CHECK(formula_pool(d2, 3, 2).size() == 202);
    Signature mix = signature({"c0"}, {{"and", 2}, {"box", 1}});
    for (int d = 1; d <= 3; ++d)
        for (int v = 1; v <= 2; ++v)
            CHECK(static_cast<long>(formula_pool(mix, d, v).size()) == pool_count(mix, d, v));
    auto pool = formula_pool(mix, 3, 2);
    for (std::size_t i = 1; i < pool.size(); ++i) CHECK(formula_less(pool[i - 1], pool[i]));
}
