#pragma once

#include <optional>
#include <string>
#include <vector>

#include "algsem/algebra.hpp"
#include "algsem/formula.hpp"

namespace algsem {

struct Matrix {
    FiniteAlgebra algebra;
    std::vector<int> designated;  // sorted, possibly empty

    bool is_designated(int e) const;
};

using MatrixFamily = std::vector<Matrix>;

struct Rule {
    std::vector<Formula> premises;
    Formula conclusion;
};

std::string to_string(const Rule& r);

const Signature& family_signature(const MatrixFamily& M);

struct ConsequenceResult {
    bool holds = true;
    int matrix = -1;       // refuting matrix
    Valuation valuation;   // refuting valuation
};

ConsequenceResult check_consequence(const MatrixFamily& M, const std::vector<Formula>& premises,
                                    const Formula& conclusion);
bool consequence(const MatrixFamily& M, const std::vector<Formula>& premises,
                 const Formula& conclusion);

Congruence leibniz_congruence(const FiniteAlgebra& A, const std::vector<int>& F);
Matrix reduce_matrix(const Matrix& m);
// Reduced family with duplicates (up to isomorphism) removed.
MatrixFamily reduce_family(const MatrixFamily& M);

// Least deductive filter of the logic of M on B containing X: repeatedly adds
// the values of consequences of formulas valued in the current set.
std::vector<int> filter_closure(const MatrixFamily& M, const FiniteAlgebra& B,
                                const std::vector<int>& X, long bound = 2000000);
bool is_deductive_filter(const MatrixFamily& M, const FiniteAlgebra& B, const std::vector<int>& F);
// Intersection of all deductive filters containing X.
std::vector<int> filter_generated(const MatrixFamily& M, const FiniteAlgebra& B,
                                  const std::vector<int>& X, int bound = 12);
std::vector<std::vector<int>> all_filters(const MatrixFamily& M, const FiniteAlgebra& B,
                                          int bound = 12);

// Unary polynomial functions, as value tables.
std::vector<std::vector<int>> unary_polynomials(const FiniteAlgebra& A);
Congruence tarski_congruence(const MatrixFamily& M, const FiniteAlgebra& A);

bool logically_equivalent(const MatrixFamily& M, const Formula& e, const Formula& d);
bool unital_reduced(const MatrixFamily& M);

// Formulas whose longest branch has at most `depth` nodes, over the first
// `vars` canonical variables and all constants. Sorted by size then text.
std::vector<Formula> formula_pool(const Signature& sig, int depth, int vars);
std::vector<Formula> formula_pool(const Signature& sig, int depth,
                                  const std::vector<std::string>& vars);

}  // namespace algsem
