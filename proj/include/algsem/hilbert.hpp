#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "algsem/decide.hpp"
#include "algsem/matrix.hpp"

namespace algsem {

struct HilbertCalculus {
    Signature sig;
    std::vector<Rule> rules;
    std::vector<std::string> names;  // optional, one per rule
};

// One-sided matching: extends s so that s(pattern) == term.
bool match_pattern(const Formula& pattern, const Formula& term, Substitution& s);

struct Budget {
    int max_depth = 6;          // height (edges) of derived formulas
    int max_vars = 4;           // distinct variables in a derived formula
    long max_derived = 20000;   // size of the derived set
    long max_iterations = 40;   // saturation rounds
};

struct ProofLine {
    Formula formula;
    int rule = -1;  // -1 for a hypothesis
    Substitution substitution;
    std::vector<int> premises;  // earlier line numbers, one per rule premise
};

struct Proof {
    std::vector<ProofLine> lines;
};

std::string to_string(const Proof& p, const HilbertCalculus& H);

// Audits every line; on failure the message names the first bad line.
bool check_proof(const HilbertCalculus& H, const std::vector<Formula>& hypotheses,
                 const Proof& p, const Formula& goal, std::string* message = nullptr);

struct DeriveResult {
    bool derived = false;
    Proof proof;
    long derived_count = 0;
    int rounds = 0;
};

// Forward saturation. Rule variables bound by premises range over the derived
// set; variables occurring only in the conclusion range over the subformulas
// of the goal and the hypotheses, plus the variable itself.
DeriveResult derives_bounded(const HilbertCalculus& H, const std::vector<Formula>& premises,
                             const Formula& goal, const Budget& b);

// Every formula derived from the premises within the budget, with no goal.
std::vector<Formula> saturate(const HilbertCalculus& H, const std::vector<Formula>& premises,
                              const std::vector<Formula>& extra_terms, const Budget& b);

std::optional<std::pair<int, int>> find_box_periodicity_hilbert(const HilbertCalculus& H,
                                                                const Budget& b,
                                                                int max_sum = 8);

// True when every rule of H is valid in the matrix.
bool validates_rules(const Matrix& m, const HilbertCalculus& H);

struct LocallyTabularResult {
    Decision decision;
    MatrixFamily family;  // empty when not built
    std::optional<std::pair<int, int>> periodicity;
    int generators = 0;
    bool budget_exceeded = false;
};

// Caller promises the presented logic is locally tabular.
LocallyTabularResult decide_locally_tabular(const HilbertCalculus& H, const Budget& b,
                                            const DecideOptions& opts = {});

}  // namespace algsem
