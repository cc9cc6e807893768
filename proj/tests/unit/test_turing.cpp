#include <doctest.h>

#include <random>

#include "algsem/turing.hpp"
#include "support.hpp"

using namespace algsem;
using test_support::tm_fixture;

namespace {

const Symbol Z = Symbol::zero, O = Symbol::one, E = Symbol::blank;

TuringMachine machine(std::vector<std::string> nonfinal, std::vector<std::string> final_states) {
    TuringMachine M;
    M.nonfinal_states = std::move(nonfinal);
    M.final_states = std::move(final_states);
    M.initial = M.nonfinal_states.front();
    return M;
}

TuringMachine random_machine(std::mt19937& rng) {
    int q = 1 + static_cast<int>(rng() % 3);
    std::vector<std::string> nonfinal;
    for (int i = 0; i < q; ++i) nonfinal.push_back("q" + std::to_string(i));
    auto M = machine(nonfinal, {"p"});
    std::vector<std::string> all = nonfinal;
    all.push_back("p");
    for (const auto& s : nonfinal)
        for (Symbol a : {Z, O, E})
            M.delta[{s, a}] = Transition{all[rng() % all.size()], rng() % 2 ? O : Z,
                                         rng() % 2 ? Move::left : Move::right};
    return M;
}

std::vector<Symbol> random_segment(std::mt19937& rng) {
    if (rng() % 3 == 0) return {E};
    std::vector<Symbol> s(1 + rng() % 3);
    for (auto& v : s) v = rng() % 2 ? O : Z;
    return s;
}

Configuration random_configuration(const TuringMachine& M, std::mt19937& rng) {
    while (true) {
        Configuration c;
        c.state = M.nonfinal_states[rng() % M.nonfinal_states.size()];
        c.left = random_segment(rng);
        c.right = random_segment(rng);
        c.head = std::vector<Symbol>{Z, O, E}[rng() % 3];
        if (c.valid()) return c;
    }
}

}  // namespace

TEST_CASE("encoding language") {
    auto M = machine({"q0"}, {"p"});
    for (Symbol a : {Z, O, E}) M.delta[{"q0", a}] = Transition{"p", O, Move::right};
    auto sig = encode_language(M);
    CHECK(sig.constants == std::vector<std::string>{"q0", "p", "0", "1", "empty"});
    REQUIRE(sig.operations.size() == 3);
    CHECK(sig.operations[0].name == "dot");
    CHECK(sig.operations[0].arity == 2);
    CHECK(sig.operations[1].name == "lambda");
    CHECK(sig.operations[1].arity == 3);
    CHECK(sig.operations[2].name == "arrow");
    CHECK(sig.operations[2].arity == 2);

    auto no_final = machine({"q0"}, {});
    for (Symbol a : {Z, O, E}) no_final.delta[{"q0", a}] = Transition{"q0", O, Move::right};
    CHECK_NOTHROW(encode_language(no_final));

    auto clash = machine({"0"}, {"p"});
    for (Symbol a : {Z, O, E}) clash.delta[{"0", a}] = Transition{"p", O, Move::right};
    CHECK_THROWS_AS(encode_language(clash), Error);
    auto partial = machine({"q0"}, {"p"});
    partial.delta[{"q0", O}] = Transition{"p", O, Move::right};
    CHECK_THROWS_AS(partial.validate(), Error);
    auto blank_write = M;
    blank_write.delta[{"q0", O}].write = E;
    CHECK_THROWS_AS(blank_write.validate(), Error);
}

TEST_CASE("encoded calculus") {
    auto t = tm_fixture("tm-one-step");
    auto H = encode_calculus(t.machine, t.input);
    auto text = [&](const std::string& name) {
        for (std::size_t i = 0; i < H.rules.size(); ++i)
            if (H.names[i] == name) return to_string(H.rules[i]);
        return std::string("missing");
    };
    CHECK(text("R2[q0,1]") == "dot(q0,lambda(x,1,dot(y,z))) |> dot(p,lambda(dot(x,1),y,z))");
    CHECK(text("R7") == "|> arrow(x,x)");
    CHECK(text("R9[dot]") == "arrow(x1,y1), arrow(x2,y2) |> arrow(dot(x1,x2),dot(y1,y2))");
    CHECK(text("R5") == "|> dot(q0,lambda(empty,1,1))");
    CHECK(H.names.size() == H.rules.size());
}

TEST_CASE("configuration formulas") {
    auto t = tm_fixture("tm-one-step");
    auto sig = encode_language(t.machine);
    auto c0 = initial_configuration(t.machine, t.input);
    CHECK(to_string(config_formula(sig, c0)) == "dot(q0,lambda(empty,1,1))");
    Configuration c{"q0", {Z, O}, O, {O, Z}};
    CHECK(to_string(config_formula(sig, c)) == "dot(q0,lambda(dot(0,1),1,dot(1,0)))");
    Configuration blank{"q0", {E}, E, {E}};
    CHECK(blank.valid());
    CHECK(to_string(config_formula(sig, blank)) == "dot(q0,lambda(empty,empty,empty))");
    CHECK_FALSE(Configuration{"q0", {Z, E}, O, {O}}.valid());
    CHECK_FALSE(Configuration{"q0", {Z}, E, {O}}.valid());
    CHECK_THROWS_AS(parse_tape("1"), Error);
    CHECK_THROWS_AS(parse_tape("12"), Error);
}

TEST_CASE("property: configuration formulas round-trip") {
    std::mt19937 rng(83);
    auto M = random_machine(rng);
    auto sig = encode_language(M);
    for (int i = 0; i < 300; ++i) {
        auto c = random_configuration(M, rng);
        auto back = config_from_formula(M, config_formula(sig, c));
        REQUIRE(back);
        CHECK(*back == c);
    }
    CHECK_FALSE(config_from_formula(M, parse_formula("dot(q0,empty)", sig)));
}

TEST_CASE("steps") {
    auto M = machine({"q"}, {"r"});
    for (Symbol a : {Z, O, E}) M.delta[{"q", a}] = Transition{"r", Z, Move::left};
    // n >= 2, u1 not blank
    auto d = step(M, Configuration{"q", {O, Z, O}, O, {Z, O}});
    REQUIRE(d);
    CHECK(*d == Configuration{"r", {O, Z}, O, {Z, Z, O}});
    // n = 1, right side empty
    auto d4 = step(M, Configuration{"q", {O}, E, {E}});
    REQUIRE(d4);
    CHECK(*d4 == Configuration{"r", {E}, O, {Z}});
    CHECK_FALSE(step(M, Configuration{"r", {O}, O, {O}}));
}

TEST_CASE("property: steps preserve valid configurations") {
    std::mt19937 rng(89);
    for (int trial = 0; trial < 30; ++trial) {
        auto M = random_machine(rng);
        for (int i = 0; i < 40; ++i) {
            auto c = random_configuration(M, rng);
            auto d = step(M, c);
            REQUIRE(d);
            CHECK(d->valid());
        }
    }
}

TEST_CASE("halting demo on the one-step machine") {
    auto t = tm_fixture("tm-one-step");
    auto demo = demo_halting_derivation(t.machine, t.input, 50);
    REQUIRE(demo);
    auto H = encode_calculus(t.machine, t.input);
    CHECK(check_proof(H, {}, demo->proof, demo->goal));
    CHECK(to_string(demo->goal) == "arrow(x,dot(x,x))");
    CHECK(demo->run.size() == 2);
    std::vector<std::string> names;
    for (const auto& l : demo->proof.lines) names.push_back(H.names.at(l.rule));
    // the right move from a one-symbol right segment pads it first
    CHECK(names == std::vector<std::string>{"R5", "R4-fwd[q0]", "R2[q0,1]", "R3-back[p]", "R6[p]"});
    CHECK_FALSE(demo_halting_derivation(t.machine, t.input, 0));

    // configurations here have height 3; a tighter bound keeps R9 in check
    Budget b;
    b.max_depth = 3;
    b.max_vars = 1;
    auto found = derives_bounded(H, {}, demo->goal, b);
    REQUIRE(found.derived);
    CHECK(check_proof(H, {}, found.proof, demo->goal));
}

TEST_CASE("walk and loop fixtures") {
    auto walk = tm_fixture("tm-walk");
    auto demo = demo_halting_derivation(walk.machine, walk.input, 50);
    REQUIRE(demo);
    CHECK(check_proof(encode_calculus(walk.machine, walk.input), {}, demo->proof, demo->goal));

    auto loop = tm_fixture("tm-loop");
    CHECK_FALSE(demo_halting_derivation(loop.machine, loop.input, 50));
    CHECK(nontrivial_implications(loop.machine, loop.input, loop.saturation).empty());
}

TEST_CASE("property: halting runs of random machines replay into checked proofs") {
    std::mt19937 rng(97);
    int halted = 0, running = 0;
    for (int trial = 0; trial < 120; ++trial) {
        auto M = random_machine(rng);
        std::vector<Symbol> input(2 + rng() % 3);
        for (auto& s : input) s = rng() % 2 ? O : Z;
        auto demo = demo_halting_derivation(M, input, 50);
        // independent simulation
        auto c = initial_configuration(M, input);
        int steps = 0;
        while (steps < 50 && M.is_nonfinal(c.state)) {
            c = *step(M, c);
            ++steps;
        }
        bool halts = M.is_final(c.state);
        CHECK(demo.has_value() == halts);
        if (!demo) {
            ++running;
            continue;
        }
        ++halted;
        CHECK(static_cast<int>(demo->run.size()) == steps + 1);
        CHECK(demo->run.back() == c);
        CHECK(check_proof(encode_calculus(M, input), {}, demo->proof, demo->goal));
    }
    CHECK(halted > 30);
    CHECK(running > 5);
}
