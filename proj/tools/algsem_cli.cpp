#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "algsem/io.hpp"
#include "algsem/oracle.hpp"

using namespace algsem;

namespace {

// Exit codes: 0 yes / ok, 1 no / oracle mismatch, 2 inconclusive, 3 usage or input error.
constexpr int kYes = 0, kNo = 1, kInconclusive = 2, kError = 3;

struct Options {
    std::string file;
    std::string json_out;
    bool oracle = false;

    // decide
    bool promise_lt = false;
    bool exhaustive_ri = false;
    bool cross_check = false;
    bool verify = false;
    bool full_tau = false;

    // pool
    int depth = 3;
    int vars = 2;
    int premises_max = 2;
    long budget_pairs = 5000000;
    int probes = 24;
    unsigned seed = 1;

    // saturation budget
    int budget_depth = 6;
    int budget_vars = 4;
    long budget_derived = 20000;
    long budget_iterations = 40;

    // check arguments
    std::string premises, goal, matrix, algebra, set, tau, gamma, target;
    int chain_bound = 40;
    int generators = 1;
    int steps = 50;
};

Budget saturation_budget(const Options& o) {
    return {o.budget_depth, o.budget_vars, o.budget_derived, o.budget_iterations};
}

PoolSpec pool_spec(const Options& o) {
    PoolSpec p;
    p.depth = o.depth;
    p.vars = o.vars;
    p.premises_max = o.premises_max;
    p.budget = o.budget_pairs;
    p.probes = o.probes;
    p.seed = o.seed;
    return p;
}

struct Outcome {
    Json result;
    int code = kYes;
};

int exit_for(Answer a) {
    return a == Answer::yes ? kYes : a == Answer::no ? kNo : kInconclusive;
}

std::vector<int> parse_set(const FiniteAlgebra& A, const std::string& text) {
    std::set<int> out;
    std::string cur;
    auto flush = [&] {
        auto b = cur.find_first_not_of(' '), e = cur.find_last_not_of(' ');
        if (b != std::string::npos) out.insert(A.element(cur.substr(b, e - b + 1)));
        cur.clear();
    };
    for (char c : text) {
        if (c == ',' || c == '{' || c == '}') flush();
        else cur += c;
    }
    flush();
    return {out.begin(), out.end()};
}

TauSet tau_from(const Options& o, const Problem& p) {
    if (!o.tau.empty()) return parse_tau(o.tau, p.sig);
    if (p.tau) return *p.tau;
    throw Error("no tau given: use --tau or a \"tau\" field");
}

const Matrix& pick_matrix(const Options& o, const Problem& p) {
    if (!o.matrix.empty()) return p.matrix(o.matrix);
    if (p.matrices.size() == 1) return p.matrices.front().matrix;
    throw Error("--matrix is required when the file has several matrices");
}

const FiniteAlgebra& pick_algebra(const Options& o, const Problem& p) {
    if (!o.algebra.empty()) return p.algebra(o.algebra);
    if (!o.matrix.empty()) return p.matrix(o.matrix).algebra;
    if (p.algebras.size() == 1) return p.algebras.front().second;
    throw Error("--algebra is required when the file has several algebras");
}

MatrixFamily need_family(const Problem& p) {
    MatrixFamily M = p.family();
    if (M.empty()) throw Error("the file defines no matrices");
    return M;
}

Outcome cmd_decide(const Options& o) {
    Problem p = load_problem(o.file);
    DecideOptions dopts;
    dopts.exhaustive_ri = o.exhaustive_ri;
    Outcome out;
    MatrixFamily M;
    Decision d;
    if (!p.matrices.empty() && !o.promise_lt) {
        M = p.family();
        d = decide_matrices(M, dopts);
        out.result["mode"] = "matrices";
    } else if (p.calculus) {
        if (!o.promise_lt)
            throw Error("a calculus needs --promise-locally-tabular: local tabularity "
                        "cannot be checked and must be promised by the caller");
        auto r = decide_locally_tabular(*p.calculus, saturation_budget(o), dopts);
        M = r.family;
        d = r.decision;
        out.result["mode"] = "calculus";
        out.result["generators"] = r.generators;
        out.result["family_size"] = r.family.size();
        out.result["budget_exceeded"] = r.budget_exceeded;
        if (r.periodicity)
            out.result["calculus_periodicity"] = {{"m", r.periodicity->first},
                                                  {"n", r.periodicity->second}};
        Json fam = Json::array();
        for (const auto& m : r.family) fam.push_back(to_json(m));
        out.result["family"] = fam;
    } else {
        throw Error("the file has neither matrices nor a calculus");
    }
    out.result["decision"] = to_json(d, M, o.full_tau ? std::string::npos : 20000);
    if (o.cross_check && !M.empty()) {
        out.result["cross_check"] = {{"protoalgebraic", to_json(cross_check_protoalgebraic(M, d))},
                                     {"theorems", to_json(cross_check_with_thms(M, d))}};
    }
    if (o.verify && d.witness && !M.empty())
        out.result["verify"] = to_json(verify_algebraic_semantics_bounded(M, d.witness->tau, pool_spec(o)));
    if (d.refutation) out.result["refutation_replays"] = replay_refutation(M, *d.refutation);
    out.code = exit_for(d.answer);
    return out;
}

Outcome cmd_consequence(const Options& o) {
    Problem p = load_problem(o.file);
    MatrixFamily M = need_family(p);
    auto prem = o.premises.empty() ? std::vector<Formula>{} : parse_formula_list(o.premises, p.sig);
    Formula goal = parse_formula(o.goal, p.sig);
    auto r = check_consequence(M, prem, goal);
    Outcome out;
    out.result["holds"] = r.holds;
    if (!r.holds) {
        Json v = Json::object();
        for (const auto& [k, e] : r.valuation) v[k] = M[r.matrix].algebra.label(e);
        out.result["counter_matrix"] = p.matrices[r.matrix].name;
        out.result["valuation"] = v;
    }
    if (o.oracle) {
        auto ref = consequence_oracle(M, prem, goal);
        out.result["oracle"] = {{"holds", ref.holds}, {"agree", ref.holds == r.holds}};
        if (ref.holds != r.holds) out.code = kNo;
    }
    return out;
}

Outcome cmd_leibniz(const Options& o) {
    Problem p = load_problem(o.file);
    const Matrix& m = pick_matrix(o, p);
    auto c = leibniz_congruence(m.algebra, m.designated);
    Outcome out;
    out.result["congruence"] = to_json(c, m.algebra);
    out.result["reduced"] = c.is_identity();
    if (o.oracle) {
        auto ref = leibniz_congruence_oracle(m.algebra, m.designated);
        out.result["oracle"] = {{"congruence", to_json(ref, m.algebra)}, {"agree", ref == c}};
        if (!(ref == c)) out.code = kNo;
    }
    return out;
}

Outcome cmd_reduce(const Options& o) {
    Problem p = load_problem(o.file);
    Outcome out;
    MatrixFamily in = o.matrix.empty() ? need_family(p) : MatrixFamily{p.matrix(o.matrix)};
    MatrixFamily red = reduce_family(in);
    Json fam = Json::array();
    for (const auto& m : red) fam.push_back(to_json(m));
    out.result["reduced_family"] = fam;
    if (o.oracle) {
        bool agree = true;
        for (const auto& m : in) {
            auto omega = leibniz_congruence_oracle(m.algebra, m.designated);
            auto q = quotient(m.algebra, omega);
            std::set<int> d;
            for (int f : m.designated) d.insert(q.projection[f]);
            std::vector<int> dv(d.begin(), d.end());
            bool found = false;
            for (const auto& r : red)
                if (isomorphic_matrices(q.algebra, dv, r.algebra, r.designated)) found = true;
            agree = agree && found;
        }
        out.result["oracle"] = {{"agree", agree}};
        if (!agree) out.code = kNo;
    }
    return out;
}

Outcome cmd_filter(const Options& o) {
    Problem p = load_problem(o.file);
    MatrixFamily M = need_family(p);
    const FiniteAlgebra& B = pick_algebra(o, p);
    auto X = parse_set(B, o.set);
    auto F = filter_closure(M, B, X);
    Outcome out;
    out.result["filter"] = element_list(B, F);
    if (o.oracle) {
        auto ref = filter_generated(M, B, X);
        out.result["oracle"] = {{"filter", element_list(B, ref)}, {"agree", ref == F}};
        if (ref != F) out.code = kNo;
    }
    return out;
}

Outcome cmd_tarski(const Options& o) {
    Problem p = load_problem(o.file);
    MatrixFamily M = need_family(p);
    const FiniteAlgebra& A = pick_algebra(o, p);
    auto c = tarski_congruence(M, A);
    Outcome out;
    out.result["congruence"] = to_json(c, A);
    if (o.oracle) {
        auto ref = tarski_congruence_oracle(M, A);
        out.result["oracle"] = {{"congruence", to_json(ref, A)}, {"agree", ref == c}};
        if (!(ref == c)) out.code = kNo;
    }
    return out;
}

Outcome cmd_theta(const Options& o) {
    Problem p = load_problem(o.file);
    ThetaQuery q;
    q.gamma = o.gamma.empty() ? std::vector<Formula>{} : parse_formula_list(o.gamma, p.sig);
    q.tau = tau_from(o, p);
    q.target = parse_equation(o.target, p.sig);
    bool exact = theta_member_exact(q);
    Outcome out;
    out.result["member"] = exact;
    if (o.oracle) {
        Json orc;
        bool agree = true;
        auto chain = theta_member_bounded(q, o.chain_bound);
        orc["chain_method"] = to_json(chain);
        orc["chain_replays"] = !chain.member || check_chain(q, chain.chain);
        // a missing chain within the bound is not a contradiction
        if (chain.member && !exact) agree = false;
        try {
            graph_query_shape(q, p.sig);
            bool gcd = theta_member_graph_based(q, p.sig);
            orc["gcd_method"] = gcd;
            if (gcd != exact) agree = false;
        } catch (const Error& e) {
            orc["gcd_method"] = std::string("not applicable: ") + e.what();
        }
        orc["agree"] = agree;
        out.result["oracle"] = orc;
        if (!agree) out.code = kNo;
    }
    return out;
}

Outcome cmd_verify(const Options& o) {
    Problem p = load_problem(o.file);
    MatrixFamily M = need_family(p);
    auto r = verify_algebraic_semantics_bounded(M, tau_from(o, p), pool_spec(o));
    Outcome out;
    out.result["verify"] = to_json(r);
    out.code = r.pass ? kYes : kNo;
    return out;
}

Outcome cmd_suszko(const Options& o) {
    Problem p = load_problem(o.file);
    MatrixFamily M = need_family(p);
    auto f = suszko_failure(M, tau_from(o, p), o.depth);
    Outcome out;
    out.result["holds"] = !f.has_value();
    if (f) {
        out.result["equation"] = to_string(f->equation);
        out.result["context"] = to_string(f->context);
        out.result["failing_rule"] = to_json(f->rule);
    }
    out.code = f ? kNo : kYes;
    return out;
}

Outcome cmd_free(const Options& o) {
    Problem p = load_problem(o.file);
    std::vector<FiniteAlgebra> K;
    if (!o.algebra.empty()) K.push_back(p.algebra(o.algebra));
    else
        for (const auto& [n, A] : p.algebras) K.push_back(A);
    auto F = free_algebra(p.sig, K, o.generators);
    Outcome out;
    out.result["size"] = F.algebra.size;
    Json w = Json::array();
    for (const auto& f : F.witnesses) w.push_back(to_string(f));
    out.result["elements"] = w;
    return out;
}

Outcome cmd_equiv_pair(const Options& o) {
    Problem p = load_problem(o.file);
    MatrixFamily M = need_family(p);
    auto pr = find_equivalent_pair(M);
    Outcome out;
    out.result["found"] = pr.has_value();
    if (pr) {
        out.result["pair"] = {to_string(pr->first), to_string(pr->second)};
        if (o.oracle) {
            bool fw = consequence_oracle(M, {pr->first}, pr->second).holds;
            bool bw = consequence_oracle(M, {pr->second}, pr->first).holds;
            out.result["oracle"] = {{"interderivable", fw && bw}};
            if (!(fw && bw)) out.code = kNo;
        }
    }
    return out;
}

Outcome cmd_encode_tm(const Options& o) {
    TmProblem t = load_tm(o.file);
    auto H = encode_calculus(t.machine, t.input);
    Outcome out;
    out.result["calculus"] = to_json(H);
    out.result["initial"] = to_json(initial_configuration(t.machine, t.input));
    return out;
}

Outcome cmd_tm_demo(const Options& o) {
    TmProblem t = load_tm(o.file);
    Outcome out;
    auto demo = demo_halting_derivation(t.machine, t.input, o.steps);
    out.result["halted"] = demo.has_value();
    if (demo) {
        auto H = encode_calculus(t.machine, t.input);
        Json run = Json::array();
        for (const auto& c : demo->run) run.push_back(to_json(c));
        out.result["run"] = run;
        out.result["goal"] = to_string(demo->goal);
        out.result["proof"] = to_json(demo->proof, H);
        out.result["proof_checked"] = true;
    } else {
        out.code = kInconclusive;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decide algebraizability of finite logical matrices and related checks"};
    app.require_subcommand(1);
    // global options may also follow the subcommand
    app.fallthrough();
    Options o;
    app.add_option("--json-out", o.json_out, "Also write the report to this path");
    app.add_flag("--oracle", o.oracle, "Run the brute-force oracle where one exists and diff");

    auto add_pool = [&](CLI::App* c) {
        c->add_option("--depth", o.depth, "Formula pool depth")->capture_default_str();
        c->add_option("--vars", o.vars, "Pool variables")->capture_default_str();
        c->add_option("--premises-max", o.premises_max, "Largest premise set")->capture_default_str();
        c->add_option("--budget-pairs", o.budget_pairs, "Concrete pair checks")->capture_default_str();
        c->add_option("--probes", o.probes, "Probe algebras")->capture_default_str();
        c->add_option("--seed", o.seed, "Probe seed")->capture_default_str();
    };
    auto add_budget = [&](CLI::App* c) {
        c->add_option("--budget-depth", o.budget_depth)->capture_default_str();
        c->add_option("--budget-vars", o.budget_vars)->capture_default_str();
        c->add_option("--budget-derived", o.budget_derived)->capture_default_str();
        c->add_option("--budget-iterations", o.budget_iterations)->capture_default_str();
    };

    std::function<Outcome(const Options&)> run;
    auto bind = [&](CLI::App* c, Outcome (*f)(const Options&)) {
        c->callback([&run, f] { run = f; });
    };

    auto* decide = app.add_subcommand("decide", "Decide whether the logic has an algebraic semantics");
    decide->add_option("file", o.file)->required();
    decide->add_flag("--promise-locally-tabular", o.promise_lt);
    decide->add_flag("--exhaustive-ri", o.exhaustive_ri);
    decide->add_flag("--cross-check", o.cross_check);
    decide->add_flag("--verify", o.verify, "Bounded check of the witness");
    decide->add_flag("--full-tau", o.full_tau, "Print witness equations of any length");
    add_pool(decide);
    add_budget(decide);
    bind(decide, cmd_decide);

    auto* check = app.add_subcommand("check", "Individual operations");
    check->require_subcommand(1);
    check->fallthrough();
    auto sub = [&](const char* name, const char* desc, Outcome (*f)(const Options&)) {
        auto* c = check->add_subcommand(name, desc);
        c->add_option("file", o.file)->required();
        bind(c, f);
        return c;
    };
    auto* cons = sub("consequence", "Gamma |- phi in the matrix family", cmd_consequence);
    cons->add_option("--premises", o.premises, "Semicolon separated formulas");
    cons->add_option("--goal", o.goal)->required();
    sub("leibniz", "Leibniz congruence of a matrix", cmd_leibniz)->add_option("--matrix", o.matrix);
    sub("reduce", "Reduced matrices", cmd_reduce)->add_option("--matrix", o.matrix);
    auto* filt = sub("filter", "Least deductive filter containing a set", cmd_filter);
    filt->add_option("--algebra", o.algebra);
    filt->add_option("--matrix", o.matrix);
    filt->add_option("--set", o.set, "Elements, comma separated");
    auto* tar = sub("tarski", "Tarski congruence of an algebra", cmd_tarski);
    tar->add_option("--algebra", o.algebra);
    tar->add_option("--matrix", o.matrix);
    auto* theta = sub("theta-member", "Membership in the congruence generated by tau[Gamma]", cmd_theta);
    theta->add_option("--gamma", o.gamma, "Semicolon separated formulas");
    theta->add_option("--tau", o.tau);
    theta->add_option("--target", o.target, "lhs ~ rhs")->required();
    theta->add_option("--chain-bound", o.chain_bound)->capture_default_str();
    auto* ver = sub("verify-tau", "Bounded check of a candidate tau", cmd_verify);
    ver->add_option("--tau", o.tau);
    add_pool(ver);
    auto* su = sub("suszko", "Context condition on tau", cmd_suszko);
    su->add_option("--tau", o.tau);
    su->add_option("--depth", o.depth)->capture_default_str();
    auto* fr = sub("free-algebra", "Free algebra of the variety generated", cmd_free);
    fr->add_option("--generators", o.generators)->capture_default_str();
    fr->add_option("--algebra", o.algebra);
    sub("equiv-pair", "Distinct logically equivalent formulas in x", cmd_equiv_pair);

    auto* enc = app.add_subcommand("encode-tm", "Print the calculus encoding a Turing machine");
    enc->add_option("file", o.file)->required();
    bind(enc, cmd_encode_tm);
    auto* demo = app.add_subcommand("tm-demo", "Proof of x -> (x . x) for a halting run");
    demo->add_option("file", o.file)->required();
    demo->add_option("--steps", o.steps)->capture_default_str();
    bind(demo, cmd_tm_demo);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kError;
    }

    Json report;
    Json echo = Json::array();
    for (int i = 1; i < argc; ++i) echo.push_back(argv[i]);
    report["command"] = echo;
    int code = kYes;
    try {
        Outcome out = run(o);
        report["result"] = out.result;
        code = out.code;
    } catch (const std::exception& e) {
        report["error"] = e.what();
        std::cerr << "error: " << e.what() << "\n";
        code = kError;
    }
    report["exit_code"] = code;
    std::string text = report.dump(2);
    std::cout << text << "\n";
    if (!o.json_out.empty()) {
        std::ofstream f(o.json_out);
        if (!f) {
            std::cerr << "error: cannot write " << o.json_out << "\n";
            return kError;
        }
        f << text << "\n";
    }
    return code;
}
