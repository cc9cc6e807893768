#pragma once

#include <vector>

#include "algsem/algebra.hpp"
#include "algsem/matrix.hpp"

namespace algsem {

// Brute-force reference implementations. Each one is written without
// calling the routine it checks.

// Valuation by valuation, via evaluate().
ConsequenceResult consequence_oracle(const MatrixFamily& M, const std::vector<Formula>& premises,
                                     const Formula& conclusion);

// Largest member of all_congruences(A) compatible with F.
Congruence leibniz_congruence_oracle(const FiniteAlgebra& A, const std::vector<int>& F,
                                     int bound = 6);

// Largest congruence compatible with every deductive filter of the logic on A.
Congruence tarski_congruence_oracle(const MatrixFamily& M, const FiniteAlgebra& A, int bound = 6);

}  // namespace algsem
