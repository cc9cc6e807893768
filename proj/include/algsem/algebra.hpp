#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "algsem/formula.hpp"
#include "algsem/signature.hpp"

namespace algsem {

struct FiniteAlgebra {
    Signature sig;
    int size = 1;
    std::vector<int> constants;            // value of each constant
    std::vector<std::vector<int>> tables;  // per operation, row-major over args
    std::vector<std::string> labels;       // optional element names

    int apply(int op, const int* args) const;
    int apply(int op, const std::vector<int>& args) const { return apply(op, args.data()); }
    int apply1(int op, int a) const { return tables[op][a]; }
    int apply2(int op, int a, int b) const { return tables[op][a * size + b]; }

    std::string label(int e) const;
    int element(const std::string& label) const;  // accepts labels or decimal indices
    void validate() const;

    bool operator==(const FiniteAlgebra&) const = default;
};

// Table with every entry computed by `f` over the full argument grid.
std::vector<int> make_table(int size, int arity, const std::function<int(const int*)>& f);

using Valuation = std::map<std::string, int>;

int evaluate(const FiniteAlgebra& A, const Formula& f, const Valuation& v);

// Values of f at every assignment of `vars`; index = sum v[i] * size^i.
std::vector<int> term_table(const FiniteAlgebra& A, const Formula& f,
                            const std::vector<std::string>& vars);

// Decode an assignment index produced by term_table.
std::vector<int> decode_assignment(long index, int size, int count);
long assignment_count(int size, int count);

struct Congruence {
    std::vector<int> rep;  // least element of each block

    int size() const { return static_cast<int>(rep.size()); }
    bool related(int a, int b) const { return rep[a] == rep[b]; }
    int block_count() const;
    std::vector<std::vector<int>> blocks() const;
    bool is_identity() const;
    bool is_total() const;
    bool refines(const Congruence& other) const;  // this is contained in other
    bool operator==(const Congruence&) const = default;
};

Congruence identity_congruence(int n);
Congruence total_congruence(int n);
Congruence congruence_from_pairs(int n, const std::vector<std::pair<int, int>>& pairs);
Congruence meet(const Congruence& a, const Congruence& b);
bool is_congruence(const FiniteAlgebra& A, const Congruence& c);
bool compatible_with(const Congruence& c, const std::vector<int>& subset);
std::string to_string(const Congruence& c, const FiniteAlgebra* A = nullptr);

Congruence congruence_generated(const FiniteAlgebra& A,
                                const std::vector<std::pair<int, int>>& pairs);
std::vector<Congruence> all_congruences(const FiniteAlgebra& A, int bound = 6);

struct Quotient {
    FiniteAlgebra algebra;
    std::vector<int> projection;
};
Quotient quotient(const FiniteAlgebra& A, const Congruence& c);

std::vector<int> subalgebra_generated(const FiniteAlgebra& A, const std::vector<int>& gens);
// Renumbered copy of a subuniverse; element i of the result is subuniverse[i].
FiniteAlgebra restrict_to(const FiniteAlgebra& A, const std::vector<int>& subuniverse);

// Element (a_0..a_{k-1}) gets number sum a_i * prod_{j<i} |A_j|.
FiniteAlgebra product(const Signature& sig, const std::vector<FiniteAlgebra>& algs,
                      long bound = 1 << 20);

struct FreeAlgebra {
    FiniteAlgebra algebra;
    std::vector<int> generators;
    std::vector<Formula> witnesses;          // a term per element
    std::vector<std::vector<int>> functions;  // concatenated term tables over K
};

FreeAlgebra free_algebra(const Signature& sig, const std::vector<FiniteAlgebra>& K, int n,
                         long bound = 200000);

bool is_homomorphism(const FiniteAlgebra& A, const FiniteAlgebra& B, const std::vector<int>& h);
// Brute force over bijections; meant for small algebras.
bool isomorphic(const FiniteAlgebra& A, const FiniteAlgebra& B);
bool isomorphic_matrices(const FiniteAlgebra& A, const std::vector<int>& F,
                         const FiniteAlgebra& B, const std::vector<int>& G);

// Exact isomorphism invariant for algebras over constants plus at most one
// unary operation; elements in `marked` (sorted) are tagged, which makes it
// an invariant of matrices too.
bool has_unary_canonical_form(const Signature& sig);
std::string unary_canonical_form(const FiniteAlgebra& A, const std::vector<int>& marked = {});

// Iterates of the unary operation `op`: least m, then least n >= m, with
// op^m = op^(n+1) on every algebra.
std::pair<int, int> box_periodicity(const std::vector<FiniteAlgebra>& algs, int op);

// Every k-generated algebra of a graph-based signature satisfying eqs, with at
// most max_size elements, one per isomorphism class.
std::vector<FiniteAlgebra> enumerate_algebras(const Signature& sig, int k,
                                              const std::vector<Equation>& eqs, int max_size);
// (k + #constants) * (n + 1) under op^m x = op^(n+1) x.
int enumeration_size_bound(const Signature& sig, int k, int n);

bool satisfies(const FiniteAlgebra& A, const Equation& e);

}  // namespace algsem
