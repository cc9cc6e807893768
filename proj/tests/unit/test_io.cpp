#include <doctest.h>

#include <filesystem>

#include "algsem/io.hpp"
#include "support.hpp"

using namespace algsem;
using test_support::fixture;

namespace {

Json base_problem() {
    return Json::parse(R"json({
      "name": "t",
      "signature": {"constants": ["c"], "operations": [{"name": "f", "arity": 2}, {"name": "g", "arity": 1}]},
      "algebras": [{"name": "A", "elements": ["a", "b"], "constants": {"c": "b"},
                    "operations": {"f": [["a", "b"], ["b", "b"]], "g": ["b", "a"]}}],
      "matrices": [{"name": "AF", "algebra": "A", "designated": ["b"]}],
      "tau": "x ~ f(x,x)"
    })json");
}

}  // namespace

TEST_CASE("every bundled fixture loads") {
    int matrices = 0, calculi = 0, machines = 0;
    for (const auto& entry : std::filesystem::directory_iterator(ALGSEM_FIXTURES)) {
        auto path = entry.path().string();
        INFO(path);
        auto j = read_json_file(path);
        if (j.contains("states")) {
            CHECK_NOTHROW(load_tm(path));
            ++machines;
        } else {
            auto p = load_problem(path);
            if (p.calculus) ++calculi;
            if (!p.matrices.empty()) {
                ++matrices;
                CHECK_NOTHROW(p.family());
            }
        }
    }
    CHECK(matrices >= 10);
    CHECK(calculi == 3);
    CHECK(machines == 3);
}

TEST_CASE("tables: nested and flat forms agree") {
    auto nested = parse_problem(base_problem());
    auto j = base_problem();
    j["algebras"][0]["operations"]["f"] = Json::array({0, 1, 1, 1});
    auto flat = parse_problem(j);
    CHECK(nested.algebra("A").tables == flat.algebra("A").tables);
    const auto& A = nested.algebra("A");
    CHECK(A.apply2(0, 0, 1) == 1);
    CHECK(A.apply2(0, 0, 0) == 0);
    CHECK(A.constants == std::vector<int>{1});
    CHECK(nested.matrix("AF").designated == std::vector<int>{1});
    CHECK(&nested.matrix("A") == &nested.matrix("AF"));
    REQUIRE(nested.tau);
    CHECK(to_string(*nested.tau) == "x ~ f(x,x)");
}

TEST_CASE("schema errors are reported") {
    auto broken = [](auto edit) {
        Json j = base_problem();
        edit(j);
        return j;
    };
    CHECK_THROWS_AS(parse_problem(Json::array()), Error);
    CHECK_THROWS_AS(parse_problem(broken([](Json& j) { j.erase("signature"); })), Error);
    CHECK_THROWS_AS(parse_problem(broken([](Json& j) { j["algebras"][0]["operations"]["g"] = Json::array({"b"}); })), Error);
    CHECK_THROWS_AS(parse_problem(broken([](Json& j) { j["algebras"][0]["operations"]["g"] = Json::array({"b", "z"}); })), Error);
    CHECK_THROWS_AS(parse_problem(broken([](Json& j) { j["algebras"][0]["operations"]["h"] = Json::array({0, 0}); })), Error);
    CHECK_THROWS_AS(parse_problem(broken([](Json& j) { j["algebras"][0]["constants"] = Json::object(); })), Error);
    CHECK_THROWS_AS(parse_problem(broken([](Json& j) { j["algebras"][0]["elements"] = Json::array({"a", "a"}); })), Error);
    CHECK_THROWS_AS(parse_problem(broken([](Json& j) { j["matrices"][0]["algebra"] = "B"; })), Error);
    CHECK_THROWS_AS(parse_problem(broken([](Json& j) { j["tau"] = "x ~ f(x,y)"; })), Error);
    CHECK_THROWS_AS(parse_problem(broken([](Json& j) { j["signature"]["operations"][0]["arity"] = "two"; })), Error);
    CHECK_THROWS_AS(parse_problem(broken([](Json& j) { j["calculus"] = Json::array({{{"premises", Json::array({"q("})}, {"conclusion", "x"}}}); })), Error);
    CHECK_THROWS_AS(load_problem("/nonexistent/problem.json"), Error);
    CHECK_THROWS_AS(parse_problem(base_problem()).matrix("nope"), Error);
}

TEST_CASE("machine files") {
    auto t = test_support::tm_fixture("tm-loop");
    CHECK(t.saturation.max_depth == 5);
    CHECK(t.saturation.max_derived == 3000);
    CHECK(t.machine.nonfinal_states.size() == 2);
    auto j = read_json_file(std::string(ALGSEM_FIXTURES) + "/tm-one-step.json");
    auto partial = j;
    partial["delta"].erase(partial["delta"].begin());
    CHECK_THROWS_AS(parse_tm(partial), Error);
    auto dup = j;
    dup["delta"].push_back(j["delta"][0]);
    CHECK_THROWS_AS(parse_tm(dup), Error);
    auto bad_move = j;
    bad_move["delta"][0]["move"] = "U";
    CHECK_THROWS_AS(parse_tm(bad_move), Error);
    auto short_input = j;
    short_input["input"] = "1";
    CHECK_THROWS_AS(parse_tm(short_input), Error);
}

TEST_CASE("reports are deterministic") {
    auto p = fixture("box-const");
    auto M = p.family();
    auto a = to_json(decide_matrices(M), M).dump();
    auto b = to_json(decide_matrices(M), M).dump();
    CHECK(a == b);
    auto flip = fixture("flip").family();
    auto r = to_json(decide_matrices(flip), flip);
    CHECK(r["answer"] == "no");
    CHECK(r["refutation"]["valuation"]["x"] == "1");
}

TEST_CASE("long witnesses are elided") {
    auto p = fixture("cpc-and-or");
    auto M = p.family();
    auto d = decide_matrices(M);
    REQUIRE(d.witness);
    auto small = to_json(*d.witness, 10);
    CHECK(small["tau_elided"] == true);
    auto full = to_json(*d.witness, std::string::npos);
    CHECK_FALSE(full.contains("tau_elided"));
}
