// One line per acceptance criterion; exit status 1 when any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "algsem/decide.hpp"
#include "algsem/hilbert.hpp"
#include "algsem/oracle.hpp"
#include "algsem/turing.hpp"
#include "support.hpp"

using namespace algsem;
using test_support::fixture;
using test_support::random_algebra;
using test_support::random_subset;
using test_support::signature;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

Formula F(const std::string& s, const Signature& sig) { return parse_formula(s, sig); }

PoolSpec pool3() {
    PoolSpec p;
    p.depth = 3;
    p.vars = 2;
    p.premises_max = 2;
    return p;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

std::string fmt_seconds(double s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f s", s);
    return buf;
}

std::string verify_summary(const VerifyReport& r) {
    std::ostringstream os;
    os << r.pairs << " pairs, " << r.counterexamples.size() << " counterexamples, " << r.unknown
       << " unknown";
    return os.str();
}

Outcome intro_example() {
    auto cpc = fixture("cpc-and-or");
    auto M = cpc.family();
    auto d = decide_matrices(M);
    if (d.answer != Answer::yes || !d.witness) return {false, "decide did not answer yes"};
    auto r = verify_algebraic_semantics_bounded(M, d.witness->tau, pool3());
    bool verified = r.pass && r.counterexamples.empty();

    auto intro = fixture("intro");
    auto red = reduce_matrix(intro.matrix("A3F"));
    bool iso = isomorphic_matrices(red.algebra, red.designated, intro.algebra("D2"), {1});
    const auto& a3 = intro.algebra("A3");
    bool sols = tau_solutions(a3, parse_tau("x ~ and(x,x)", intro.sig)) ==
                std::vector<int>{a3.element("1")};
    std::string detail = "yes via " + to_string(d.witness->kind) + "; " + verify_summary(r) +
                         "; reduced intro matrix ~ D2: " + (iso ? "yes" : "no") +
                         "; solutions of x ~ and(x,x) = {1}: " + (sols ? "yes" : "no");
    return {verified && iso && sols, detail};
}

Outcome boolean_semantics() {
    auto b = fixture("boolean");
    auto r = verify_algebraic_semantics_bounded(b.family(), parse_tau("x ~ one", b.sig), pool3());
    return {r.pass && r.counterexamples.empty(), verify_summary(r)};
}

Outcome leibniz_oracle() {
    std::mt19937 rng(1001);
    Signature sig = signature({"c"}, {{"f", 2}, {"g", 1}});
    int agree = 0;
    for (int i = 0; i < 100; ++i) {
        int n = 1 + static_cast<int>(rng() % 4);
        auto A = random_algebra(sig, n, rng);
        auto G = random_subset(n, rng);
        agree += leibniz_congruence(A, G) == leibniz_congruence_oracle(A, G);
    }
    return {agree == 100, std::to_string(agree) + "/100 agree"};
}

Outcome gcd_vs_chains() {
    std::mt19937 rng(1002);
    Signature sig = signature({"c"}, {{"box", 1}});
    std::vector<std::string> atoms{"x", "y", "c"};
    int positive = 0, negative = 0, contradictions = 0;
    for (int i = 0; i < 200; ++i) {
        int k = 1 + static_cast<int>(rng() % 3);
        int n = static_cast<int>(rng() % k);
        TauSet tau{{iterate_op(sig, 0, k, Formula::variable("x")), iterate_op(sig, 0, n, F("c", sig))}};
        std::vector<Formula> gamma;
        int size = 1 + static_cast<int>(rng() % 3);
        for (int g = 0; g < size; ++g)
            gamma.push_back(iterate_op(sig, 0, static_cast<int>(rng() % 7), F(atoms[rng() % 3], sig)));
        int h = static_cast<int>(rng() % 7);
        Formula lhs = iterate_op(sig, 0, k + h, F(atoms[rng() % 3], sig));
        ThetaQuery q{gamma, tau, {lhs, tau[0].rhs}};
        bool gcd = theta_member_graph_based(q, sig);
        auto chain = theta_member_bounded(q, 40);
        if (gcd) {
            ++positive;
            if (!chain.member || !check_chain(q, chain.chain)) ++contradictions;
        } else {
            ++negative;
            if (chain.member) ++contradictions;
        }
    }
    return {contradictions == 0, std::to_string(positive) + " gcd-positive with chains, " +
                                     std::to_string(negative) + " gcd-negative without, " +
                                     std::to_string(contradictions) + " contradictions"};
}

Outcome reduction_invariance() {
    std::mt19937 rng(1003);
    Signature sig = signature({}, {{"f", 2}, {"g", 1}});
    auto pool = formula_pool(sig, 2, 2);
    long rules = 0, disagreements = 0;
    for (int t = 0; t < 20; ++t) {
        MatrixFamily M;
        int count = 1 + static_cast<int>(rng() % 3);
        for (int i = 0; i < count; ++i) {
            int n = 1 + static_cast<int>(rng() % 4);
            M.push_back(Matrix{random_algebra(sig, n, rng), random_subset(n, rng)});
        }
        auto R = reduce_family(M);
        std::vector<std::vector<Formula>> sets{{}};
        for (std::size_t i = 0; i < pool.size(); ++i) {
            sets.push_back({pool[i]});
            for (std::size_t j = i + 1; j < pool.size(); ++j) sets.push_back({pool[i], pool[j]});
        }
        for (const auto& g : sets)
            for (const auto& c : pool) {
                ++rules;
                disagreements += consequence(M, g, c) != consequence(R, g, c);
            }
    }
    return {disagreements == 0,
            std::to_string(rules) + " rules, " + std::to_string(disagreements) + " disagreements"};
}

Outcome flip_no() {
    auto M = fixture("flip").family();
    auto d = decide_matrices(M);
    if (d.answer != Answer::no || !d.refutation) return {false, "decide did not answer no"};
    const auto& r = *d.refutation;
    bool instance = to_string(r.instance) == "x |> box(x)" && !r.instance_valid &&
                    r.evidence.valuation.count("x") && r.evidence.valuation.at("x") == 1;
    bool replays = replay_refutation(M, r);
    return {instance && replays, "refutation '" + r.condition + "' cites " + to_string(r.instance) +
                                     (replays ? ", replays as non-valid" : ", does not replay")};
}

Outcome cross_checks() {
    const char* names[] = {"boolean", "cpc-and-or", "implication", "intro", "kleene", "box-const",
                           "identity-box", "box-pair", "flip", "constants-no", "constants-pair",
                           "constants-theorem", "trivial-almost", "trivial-inconsistent"};
    int families = 0, disagree = 0, agree = 0;
    for (const char* n : names) {
        auto M = fixture(n).family();
        auto d = decide_matrices(M);
        for (const auto& rep : {cross_check_protoalgebraic(M, d), cross_check_with_thms(M, d)}) {
            disagree += rep.status == "disagree";
            agree += rep.status == "agree";
        }
        ++families;
    }
    return {disagree == 0 && families >= 10,
            std::to_string(families) + " families, " + std::to_string(agree) + " agreements, " +
                std::to_string(disagree) + " disagreements"};
}

// All tau over {c0, c1} built from x ~ c0, x ~ c1, c0 ~ c1, against every
// nonempty class of constant algebras up to isomorphism: none translates
// the logic of {x |> c0} on the rules with at most two premises over
// {x, y, c0, c1}.
bool no_tau_for_x_to_c0(const LocallyTabularResult& lt) {
    Signature sig = signature({"c0", "c1"}, {});
    std::vector<FiniteAlgebra> shapes;
    for (auto [size, c1] : {std::pair{1, 0}, std::pair{2, 0}, std::pair{2, 1}}) {
        FiniteAlgebra A;
        A.sig = sig;
        A.size = size;
        A.constants = {0, c1};
        shapes.push_back(A);
    }
    std::vector<Equation> atoms{{F("x", sig), F("c0", sig)},
                                {F("x", sig), F("c1", sig)},
                                {F("c0", sig), F("c1", sig)}};
    std::vector<Formula> fs{F("x", sig), F("y", sig), F("c0", sig), F("c1", sig)};
    std::vector<std::vector<Formula>> sets{{}};
    for (std::size_t i = 0; i < fs.size(); ++i) {
        sets.push_back({fs[i]});
        for (std::size_t j = i + 1; j < fs.size(); ++j) sets.push_back({fs[i], fs[j]});
    }
    for (int tmask = 0; tmask < 8; ++tmask) {
        TauSet tau;
        for (int e = 0; e < 3; ++e)
            if (tmask >> e & 1) tau.push_back(atoms[e]);
        for (int kmask = 1; kmask < 8; ++kmask) {
            std::vector<FiniteAlgebra> K;
            for (int a = 0; a < 3; ++a)
                if (kmask >> a & 1) K.push_back(shapes[a]);
            bool fits = true;
            for (const auto& g : sets) {
                std::vector<Equation> theta;
                for (const auto& f : g)
                    for (const auto& e : tau_apply(tau, f)) theta.push_back(e);
                for (const auto& phi : fs) {
                    bool sem = true;
                    for (const auto& e : tau_apply(tau, phi)) sem = sem && equational_consequence(K, theta, e);
                    if (sem != consequence(lt.family, g, phi)) {
                        fits = false;
                        break;
                    }
                }
                if (!fits) break;
            }
            if (fits) return false;
        }
    }
    return true;
}

Outcome locally_tabular() {
    Budget b;
    std::string detail;
    bool ok = true;

    // each calculus has its own 60 s allowance
    auto t0 = std::chrono::steady_clock::now();
    auto box = fixture("calc-box");
    auto lt = decide_locally_tabular(*box.calculus, b);
    bool box_ok = lt.decision.answer == Answer::yes && lt.decision.witness;
    for (const auto& m : lt.family) box_ok = box_ok && validates_rules(m, *box.calculus);
    if (box_ok) {
        auto r = verify_algebraic_semantics_bounded(lt.family, lt.decision.witness->tau, pool3());
        box_ok = r.pass && r.counterexamples.empty();
        detail += "{x |> box x, box x |> x}: yes, tau " + to_string(lt.decision.witness->tau) + ", " +
                  verify_summary(r);
    } else {
        detail += "{x |> box x, box x |> x}: not yes";
    }
    double t_box = seconds_since(t0);
    detail += " [" + fmt_seconds(t_box) + "]";
    ok = ok && box_ok && t_box < 60;

    t0 = std::chrono::steady_clock::now();
    auto single = fixture("calc-const");
    auto ls = decide_locally_tabular(*single.calculus, b);
    bool single_yes = ls.decision.answer == Answer::yes;
    bool replays = ls.decision.refutation && replay_refutation(ls.family, *ls.decision.refutation);
    detail += "; {x |> c0}: " + to_string(ls.decision.answer);
    if (!single_yes) {
        detail += std::string(" (refutation ") + (replays ? "replays" : "does not replay") +
                  "; exhaustive tau search over {x~c0, x~c1, c0~c1} and all constant-algebra classes: " +
                  (no_tau_for_x_to_c0(ls) ? "no tau exists" : "a tau exists") + ")";
    }
    double t_single = seconds_since(t0);
    detail += " [" + fmt_seconds(t_single) + "]";
    ok = ok && single_yes && t_single < 60;

    auto both = fixture("calc-const-both");
    auto lb = decide_locally_tabular(*both.calculus, b);
    bool both_ok = lb.decision.answer == Answer::yes && lb.decision.witness;
    if (both_ok) {
        auto r = verify_algebraic_semantics_bounded(lb.family, lb.decision.witness->tau, pool3());
        both_ok = r.pass && r.counterexamples.empty();
        detail += "; supplementary {x |> c0, x |> c1}: yes, " + verify_summary(r);
    }
    return {ok, detail};
}

Outcome reduction_demo() {
    auto t0 = std::chrono::steady_clock::now();
    auto one = test_support::tm_fixture("tm-one-step");
    auto demo = demo_halting_derivation(one.machine, one.input, 50);
    bool proof_ok = demo && check_proof(encode_calculus(one.machine, one.input), {}, demo->proof, demo->goal);
    double t_one = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    auto loop = test_support::tm_fixture("tm-loop");
    auto found = nontrivial_implications(loop.machine, loop.input, loop.saturation);
    double t_loop = seconds_since(t0);
    std::string detail = proof_ok ? "one-step proof of " + to_string(demo->goal) + " with " +
                                        std::to_string(demo->proof.lines.size()) + " checked lines"
                                  : "no checked proof";
    detail += " [" + fmt_seconds(t_one) + "]; loop: " + std::to_string(found.size()) +
              " theorems eps -> delta with eps != delta [" + fmt_seconds(t_loop) + "]";
    return {proof_ok && found.empty() && t_one < 60 && t_loop < 60, detail};
}

Outcome pruning() {
    std::mt19937 rng(1010);
    Signature sig = signature({"c0"}, {{"box", 1}});
    long comparisons = 0, disagreements = 0;
    for (int t = 0; t < 20; ++t) {
        MatrixFamily M;
        int count = 1 + static_cast<int>(rng() % 2);
        for (int i = 0; i < count; ++i) {
            int n = 1 + static_cast<int>(rng() % 4);
            M.push_back(Matrix{random_algebra(sig, n, rng), random_subset(n, rng)});
        }
        for (int n = 0; n <= 2; ++n)
            for (int m = 0; m <= n; ++m) {
                if (2 * n - m + 1 > 4) continue;
                for (RuleFamily f : {RuleFamily::R, RuleFamily::I})
                    for (int k = 1; k <= 3; ++k) {
                        RuleFamilySpec s{f, k, 0, m, n};
                        ++comparisons;
                        disagreements += check_rule_family(M, s, false).holds != check_rule_family(M, s, true).holds;
                    }
            }
    }
    return {disagreements == 0, std::to_string(comparisons) + " comparisons, " +
                                    std::to_string(disagreements) + " disagreements"};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double limit_s;  // 0 means no time limit
        std::function<Outcome()> run;
    };
    const Criterion criteria[] = {
        {1, "intro example reproduced", 30, intro_example},
        {2, "Boolean standard semantics", 30, boolean_semantics},
        {3, "Leibniz oracle equivalence", 60, leibniz_oracle},
        {4, "gcd rule vs Maltsev chains", 120, gcd_vs_chains},
        {5, "reduction invariance", 0, reduction_invariance},
        {6, "graph-based NO case", 5, flip_no},
        {7, "characterization cross-checks", 0, cross_checks},
        {8, "locally tabular Hilbert path", 0, locally_tabular},  // timed per calculus
        {9, "Turing machine reduction demo", 0, reduction_demo},  // timed per machine
        {10, "R/I pruning validation", 0, pruning},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = seconds_since(start);
        bool in_time = c.limit_s == 0 || secs < c.limit_s;
        bool pass = o.pass && in_time;
        failed += !pass;
        std::printf("criterion %d %s: %s (%.2f s%s) %s\n", c.id, pass ? "PASS" : "FAIL", c.name, secs,
                    in_time ? "" : ", over the time limit", o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of 10 criteria passed\n", 10 - failed);
    return failed ? 1 : 0;
}
