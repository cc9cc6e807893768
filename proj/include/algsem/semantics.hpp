#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "algsem/algebra.hpp"
#include "algsem/formula.hpp"
#include "algsem/matrix.hpp"

namespace algsem {

// Equations in the single variable x.
using TauSet = std::vector<Equation>;

inline const std::string& tau_variable() {
    static const std::string x = "x";
    return x;
}

void validate_tau(const TauSet& tau);
TauSet parse_tau(std::string_view text, const Signature& sig);
std::string to_string(const TauSet& tau);

// Each equation of tau with x replaced by phi.
std::vector<Equation> tau_apply(const TauSet& tau, const Formula& phi);
std::vector<int> tau_solutions(const FiniteAlgebra& A, const TauSet& tau);

bool equational_consequence(const std::vector<FiniteAlgebra>& K, const std::vector<Equation>& theta,
                            const Equation& goal);

struct ThetaQuery {
    std::vector<Formula> gamma;
    TauSet tau;
    Equation target;
};

// Generator pairs of the congruence: tau applied to each member of gamma.
std::vector<Equation> theta_generators(const ThetaQuery& q);

// Exact membership by ground congruence closure.
bool theta_member_exact(const ThetaQuery& q);

// Shape of a query the gcd rule applies to.
struct GraphQueryShape {
    int op = -1;        // the unary operation
    int constant = -1;  // c_i
    int k = 0, n = 0;   // tau = {op^k x ~ op^n c_i}
    int h = 0;          // target lhs is op^(k+h) p
    Formula atom;       // p
};
// Throws when q does not have the required shape.
GraphQueryShape graph_query_shape(const ThetaQuery& q, const Signature& sig);
bool theta_member_graph_based(const ThetaQuery& q, const Signature& sig);

struct ChainResult {
    bool member = false;
    std::vector<Formula> chain;  // lhs = chain.front(), rhs = chain.back()
    long explored = 0;
};

// Breadth-first search for a chain of single replacements of a generator side
// by the other side. size_cap <= 0 picks max(|lhs|,|rhs|) + 2 * max generator side.
ChainResult theta_member_bounded(const ThetaQuery& q, int chain_bound, int size_cap = 0);
// Replays a chain: each step rewrites one occurrence of a generator side.
bool check_chain(const ThetaQuery& q, const std::vector<Formula>& chain);

struct PoolSpec {
    int depth = 3;
    int vars = 2;
    int premises_max = 2;
    long budget = 5000000;  // concrete pair checks
    int probes = 24;        // random probe algebras for the semantic filter
    unsigned seed = 1;
};

struct Counterexample {
    std::vector<Formula> gamma;
    Formula phi;
    std::string reason;
};

struct VerifyReport {
    bool pass = true;
    long pool_size = 0;
    long pairs = 0;           // (gamma, phi) pairs covered
    long derivable = 0;       // gamma |- phi
    long refuted = 0;         // tau(phi) outside theta(gamma) shown semantically
    long closure_checks = 0;  // pairs settled by congruence closure
    long unknown = 0;         // pairs beyond the budget
    std::vector<Counterexample> counterexamples;
    std::string note;
};

// Checks: tau(phi) in theta(gamma, tau) implies gamma |- phi over the pool.
VerifyReport verify_algebraic_semantics_bounded(const MatrixFamily& M, const TauSet& tau,
                                                const PoolSpec& pool);
// Checks: gamma |- phi iff tau[gamma] |=_K tau(phi) over the pool.
VerifyReport verify_class_semantics_bounded(const MatrixFamily& M,
                                            const std::vector<FiniteAlgebra>& K,
                                            const TauSet& tau, const PoolSpec& pool);

struct SuszkoFailure {
    Equation equation;
    Formula context;  // in the variables v, z0, ...
    Rule rule;
    ConsequenceResult refutation;
};

// x, ctx(eps, z) -||- ctx(delta, z), x for every eps ~ delta in tau and
// every context of the given depth over v and `params` extra variables.
std::optional<SuszkoFailure> suszko_failure(const MatrixFamily& M, const TauSet& tau, int depth,
                                            int params = 1);
bool suszko_condition(const MatrixFamily& M, const TauSet& tau, int depth, int params = 1);

// First pair of distinct logically equivalent formulas jointly in exactly
// the variable x, by breadth-first search over term functions on M*.
std::optional<std::pair<Formula, Formula>> find_equivalent_pair(const MatrixFamily& M,
                                                                int max_functions = 100000);

enum class WitnessKind {
    standard_check,
    trivial_inconsistent,
    trivial_almost,
    assertional,
    almost_assertional,
    equivalent_pair_construction,
    graph_based_k_i,
    graph_based_x_box,
    constants_pair,
};

std::string to_string(WitnessKind k);

struct Witness {
    TauSet tau;
    WitnessKind kind = WitnessKind::standard_check;
    std::map<std::string, std::string> evidence;
};

Witness construct_tau_sufficient(const MatrixFamily& M, const Formula& phi, const Formula& psi);

// tau for a trivial logic: empty when inconsistent, otherwise built from a
// non-constant connective or two constants. Throws when none exists.
Witness construct_tau_trivial(const Signature& sig, bool inconsistent);

enum class GraphTauKind { x_box, k_i, periodic, constants, assertional, almost_assertional };

struct GraphTauParams {
    int k = 0, i = 0, j = 0;
    int m = 0, n = 0;
    int t = 0;
    int atom_constant = -1;  // -1 means the variable x
};

Witness construct_tau_graph_based(const Signature& sig, GraphTauKind kind,
                                  const GraphTauParams& p);

}  // namespace algsem
