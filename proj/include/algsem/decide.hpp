#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "algsem/matrix.hpp"
#include "algsem/semantics.hpp"

namespace algsem {

enum class Answer { yes, no, inconclusive };
std::string to_string(Answer a);

struct TraceEntry {
    std::string condition;
    bool holds = false;
    std::string detail;
};

// A necessary condition that fails, with a rule instance whose validity
// status (instance_valid) can be replayed by direct evaluation.
struct Refutation {
    std::string condition;
    Rule instance;
    bool instance_valid = false;
    ConsequenceResult evidence;
};

struct Decision {
    Answer answer = Answer::inconclusive;
    std::string branch;
    std::optional<Witness> witness;
    std::optional<Refutation> refutation;
    std::vector<TraceEntry> trace;
    std::optional<std::pair<int, int>> periodicity;  // (m, n) in the unary branch
};

enum class RuleFamily { U, S, R, I };
std::string to_string(RuleFamily f);

struct RuleFamilySpec {
    RuleFamily family = RuleFamily::U;
    int k = 1;
    int i = 0;
    int m = 0, n = 0;
};

struct RuleFamilyResult {
    bool holds = true;
    long rules_checked = 0;
    std::optional<Rule> failing;
    ConsequenceResult refutation;
};

// U: x, y, box^t x |- box^t y for t <= n.
// S: x, box^(t+k) x -||- box^t c_i, x for t <= n.
// R, I: premise pair sets u < v <= 2n-m+1 with conclusion exponents up to
// 2n-m+1 that are multiples of the gcd (gcd of the empty set is 0). Unless
// exhaustive, only pair sets of size <= floor(log2(2n-m+1)) + 1 are tried.
RuleFamilyResult check_rule_family(const MatrixFamily& M, const RuleFamilySpec& spec,
                                   bool exhaustive = false);

struct DecideOptions {
    bool exhaustive_ri = false;
};

Decision decide_matrices(const MatrixFamily& M, const DecideOptions& opts = {});

// Re-evaluates the refutation instance; true when its status matches.
bool replay_refutation(const MatrixFamily& M, const Refutation& r);

struct CrossCheckReport {
    std::string status;  // agree, disagree, skipped, not-certified
    std::string detail;
    std::vector<Formula> evidence;  // the set found (Delta, or a theorem)
};

CrossCheckReport cross_check_protoalgebraic(const MatrixFamily& M, const Decision& d,
                                            int depth = 2);
CrossCheckReport cross_check_with_thms(const MatrixFamily& M, const Decision& d, int depth = 2);

}  // namespace algsem
