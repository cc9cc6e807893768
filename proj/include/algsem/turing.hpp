#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "algsem/hilbert.hpp"

namespace algsem {

enum class Symbol { zero, one, blank };
enum class Move { left, right };

std::string symbol_name(Symbol s);  // "0", "1", "empty"
Symbol parse_symbol(const std::string& s);

struct Transition {
    std::string next;
    Symbol write = Symbol::zero;  // 0 or 1
    Move move = Move::right;
};

struct TuringMachine {
    std::vector<std::string> final_states;
    std::vector<std::string> nonfinal_states;
    std::string initial;
    std::map<std::pair<std::string, Symbol>, Transition> delta;

    bool is_final(const std::string& q) const;
    bool is_nonfinal(const std::string& q) const;
    // Throws unless the state sets are disjoint, the names are usable constant
    // names, the initial state is nonfinal and delta is total on nonfinal states.
    void validate() const;
};

// A segment equal to {blank} stands for the empty segment.
struct Configuration {
    std::string state;
    std::vector<Symbol> left;
    Symbol head = Symbol::blank;
    std::vector<Symbol> right;

    bool valid() const;
    bool operator==(const Configuration&) const = default;
};

std::string to_string(const Configuration& c);

Signature encode_language(const TuringMachine& M);

// Input of length >= 2 over {0,1}.
std::vector<Symbol> parse_tape(const std::string& text);

Configuration initial_configuration(const TuringMachine& M, const std::vector<Symbol>& input);

Formula config_formula(const Signature& sig, const Configuration& c);
std::optional<Configuration> config_from_formula(const TuringMachine& M, const Formula& f);

// Rules in order: one per left move (R1), one per right move (R2), padding on
// the left both ways per state (R3), padding on the right (R4), the initial
// configuration as an axiom (R5), x -> x.x per final state (R6), reflexivity
// (R7), modus ponens (R8), and congruence of -> for each connective (R9).
// names[i] carries the rule family label, e.g. "R3-back[q0]".
HilbertCalculus encode_calculus(const TuringMachine& M, const std::vector<Symbol>& input);

// None from a final state.
std::optional<Configuration> step(const TuringMachine& M, const Configuration& c);

struct HaltingDemo {
    Proof proof;
    std::vector<Configuration> run;  // c0 .. cn, cn in a final state
    Formula goal;                    // x -> (x . x)
};

// Simulates up to max_steps; on halting returns a proof of x -> (x . x) built
// by replaying each step with the padding rules where the step needs them.
// The proof is checked before being returned.
std::optional<HaltingDemo> demo_halting_derivation(const TuringMachine& M,
                                                   const std::vector<Symbol>& input,
                                                   int max_steps);

// Formulas eps -> delta with eps != delta among those saturated within b.
std::vector<Formula> nontrivial_implications(const TuringMachine& M,
                                             const std::vector<Symbol>& input, const Budget& b);

}  // namespace algsem
