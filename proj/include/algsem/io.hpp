#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "algsem/decide.hpp"
#include "algsem/hilbert.hpp"
#include "algsem/semantics.hpp"
#include "algsem/turing.hpp"

namespace algsem {

using Json = nlohmann::json;

// Problem file:
// {
//   "name": "...", "description": "...",
//   "signature": {"constants": ["c0"], "operations": [{"name": "and", "arity": 2}]},
//   "algebras": [{"name": "D2", "elements": ["0", "1"], "constants": {"c0": "1"},
//                 "operations": {"and": [["0", "0"], ["0", "1"]]}}],
//   "matrices": [{"name": "D2F", "algebra": "D2", "designated": ["1"]}],
//   "calculus": [{"premises": ["x"], "conclusion": "box(x)"}],
//   "tau": "x ~ and(x,x)"
// }
// Tables are nested by argument (first argument outermost) or flat row-major;
// entries are element labels or indices.
struct NamedMatrix {
    std::string name;
    std::string algebra;
    Matrix matrix;
};

struct Problem {
    std::string name;
    std::string description;
    Signature sig;
    std::vector<std::pair<std::string, FiniteAlgebra>> algebras;
    std::vector<NamedMatrix> matrices;
    std::optional<HilbertCalculus> calculus;
    std::optional<TauSet> tau;

    MatrixFamily family() const;
    const FiniteAlgebra& algebra(const std::string& name) const;
    // By matrix name, or by algebra name when that algebra has one matrix.
    const Matrix& matrix(const std::string& name) const;
};

// Throws Error on any schema violation.
Problem parse_problem(const Json& j);
Problem load_problem(const std::string& path);

// TM file:
// {"states": {"final": ["p"], "nonfinal": ["q0"], "initial": "q0"},
//  "delta": [{"state": "q0", "read": "1", "next": "p", "write": "1", "move": "R"}],
//  "input": "11",
//  "saturation": {"max_depth": 6, "max_derived": 4000, "max_iterations": 12}}
struct TmProblem {
    std::string name;
    TuringMachine machine;
    std::vector<Symbol> input;
    Budget saturation;  // budget for the no-nontrivial-implication check
};

TmProblem parse_tm(const Json& j);
TmProblem load_tm(const std::string& path);

Json read_json_file(const std::string& path);

Json to_json(const Signature& sig);
Json to_json(const Rule& r);
Json to_json(const HilbertCalculus& H);
Json to_json(const Congruence& c, const FiniteAlgebra& A);
Json to_json(const Matrix& m);
// Equations longer than max_chars are replaced by their sizes; the evidence
// map still determines them.
Json to_json(const Witness& w, std::size_t max_chars = 20000);
Json to_json(const Refutation& r, const MatrixFamily& M);
Json to_json(const Decision& d, const MatrixFamily& M, std::size_t max_chars = 20000);
Json to_json(const VerifyReport& r);
Json to_json(const Proof& p, const HilbertCalculus& H);
Json to_json(const Configuration& c);
Json to_json(const ChainResult& c);
Json to_json(const CrossCheckReport& r);

std::string element_list(const FiniteAlgebra& A, const std::vector<int>& xs);

}  // namespace algsem
