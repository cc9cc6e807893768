#include "algsem/decide.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <numeric>
#include <set>

namespace algsem {

std::string to_string(Answer a) {
    switch (a) {
        case Answer::yes: return "yes";
        case Answer::no: return "no";
        case Answer::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

std::string to_string(RuleFamily f) {
    switch (f) {
        case RuleFamily::U: return "U";
        case RuleFamily::S: return "S";
        case RuleFamily::R: return "R";
        case RuleFamily::I: return "I";
    }
    return "?";
}

namespace {

Formula var(const char* name) { return Formula::variable(name); }

std::string valuation_text(const MatrixFamily& M, const ConsequenceResult& r) {
    if (r.holds) return "";
    std::string out = "matrix " + std::to_string(r.matrix) + ":";
    for (const auto& [v, e] : r.valuation)
        out += " " + v + "->" + M[r.matrix].algebra.label(e);
    return out;
}

// Designation of box^j applied to each element, over all matrices.
class OrbitMasks {
public:
    OrbitMasks(const MatrixFamily& M, int op, int max_exp) {
        for (const auto& m : M) {
            for (int a = 0; a < m.algebra.size; ++a) {
                int e = a;
                std::vector<int> orbit;
                for (int j = 0; j <= max_exp; ++j) {
                    orbit.push_back(e);
                    e = m.algebra.apply1(op, e);
                }
                orbits_.push_back(std::move(orbit));
                owner_.push_back(&m);
            }
        }
    }

    std::size_t positions() const { return orbits_.size(); }
    bool designated(std::size_t pos, int j) const {
        return owner_[pos]->is_designated(orbits_[pos][j]);
    }
    // box^h c designated in the matrix owning pos.
    bool constant_designated(std::size_t pos, int c, int h, int op) const {
        const auto& A = owner_[pos]->algebra;
        int e = A.constants[c];
        for (int j = 0; j < h; ++j) e = A.apply1(op, e);
        return owner_[pos]->is_designated(e);
    }

private:
    std::vector<std::vector<int>> orbits_;
    std::vector<const Matrix*> owner_;
};

// Bit vector over positions.
using Mask = std::vector<std::uint64_t>;

Mask full_mask(std::size_t n) {
    Mask m((n + 63) / 64, ~0ULL);
    if (n % 64) m.back() = (1ULL << (n % 64)) - 1;
    if (n == 0) m.clear();
    return m;
}

bool subset(const Mask& a, const Mask& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] & ~b[i]) return false;
    return true;
}

}  // namespace

RuleFamilyResult check_rule_family(const MatrixFamily& M, const RuleFamilySpec& spec,
                                   bool exhaustive) {
    const Signature& sig = family_signature(M);
    int op = sig.unary_operation();
    if (!sig.graph_based() || op < 0)
        throw Error("rule families need a graph-based signature with a unary operation");
    if (spec.m < 0 || spec.m > spec.n) throw Error("rule family bounds need 0 <= m <= n");
    if (spec.family != RuleFamily::U) {
        if (spec.k < 1) throw Error("rule family needs k >= 1");
        if (spec.i < 0 || spec.i >= static_cast<int>(sig.constants.size()))
            throw Error("rule family constant index out of range");
    }
    RuleFamilyResult res;
    Formula x = var("x"), y = var("y");
    auto box = [&](int n, const Formula& f) { return iterate_op(sig, op, n, f); };
    auto check = [&](const Rule& r) {
        ++res.rules_checked;
        auto c = check_consequence(M, r.premises, r.conclusion);
        if (!c.holds) {
            res.holds = false;
            res.failing = r;
            res.refutation = c;
        }
        return c.holds;
    };
    const int n = spec.n, m = spec.m;
    if (spec.family == RuleFamily::U) {
        for (int t = 0; t <= n; ++t)
            if (!check({{x, y, box(t, x)}, box(t, y)})) return res;
        return res;
    }
    Formula c = Formula::constant(sig, spec.i);
    if (spec.family == RuleFamily::S) {
        for (int t = 0; t <= n; ++t) {
            if (!check({{x, box(t + spec.k, x)}, box(t, c)})) return res;
            if (!check({{box(t, c), x}, box(t + spec.k, x)})) return res;
        }
        return res;
    }

    const int L = 2 * n - m + 1;
    if (L >= 62) throw Error("rule family bound 2n-m+1 is too large");
    std::vector<std::pair<int, int>> pairs;
    for (int v = 1; v <= L; ++v)
        for (int u = 0; u < v; ++u) pairs.emplace_back(u, v);
    int max_size = exhaustive ? static_cast<int>(pairs.size())
                              : std::bit_width(static_cast<unsigned>(L));  // floor(log2 L) + 1
    if (exhaustive && pairs.size() > 24) throw Error("exhaustive enumeration is too large here");

    OrbitMasks orb(M, op, 2 * L);
    std::size_t P = orb.positions();
    std::vector<Mask> pow_mask(2 * L + 1, Mask((P + 63) / 64, 0));
    for (int j = 0; j <= 2 * L; ++j)
        for (std::size_t p = 0; p < P; ++p)
            if (orb.designated(p, j)) pow_mask[j][p / 64] |= 1ULL << (p % 64);
    std::vector<Mask> const_mask(L + 1, Mask((P + 63) / 64, 0));
    for (int h = 0; h <= L; ++h)
        for (std::size_t p = 0; p < P; ++p)
            if (orb.constant_designated(p, spec.i, h, op)) const_mask[h][p / 64] |= 1ULL << (p % 64);

    // Distinct (endpoint set, gcd) combinations.
    std::set<std::pair<std::uint64_t, int>> seen;
    bool stop = false;
    auto premises_of = [&](std::uint64_t ends) {
        std::vector<Formula> out;
        for (int e = 0; e <= L; ++e)
            if (ends >> e & 1) out.push_back(box(e, x));
        return out;
    };
    auto visit = [&](std::uint64_t ends, int d) {
        if (!seen.emplace(ends, d).second) return;
        Mask base = full_mask(P);
        for (int e = 0; e <= L; ++e)
            if (ends >> e & 1)
                for (std::size_t w = 0; w < base.size(); ++w) base[w] &= pow_mask[e][w];
        if (spec.family == RuleFamily::R) {
            for (int t = 0; t <= L && !stop; ++t) {
                Mask prem = base;
                for (std::size_t w = 0; w < prem.size(); ++w) prem[w] &= pow_mask[t][w];
                for (int g = 0; g <= L; ++g) {
                    if (d == 0 ? g != 0 : g % d != 0) continue;
                    ++res.rules_checked;
                    if (subset(prem, pow_mask[t + g])) continue;
                    auto ps = premises_of(ends | (1ULL << t));
                    Rule r{ps, box(t + g, x)};
                    auto cr = check_consequence(M, r.premises, r.conclusion);
                    res.holds = false;
                    res.failing = r;
                    res.refutation = cr;
                    stop = true;
                    return;
                }
            }
        } else {
            if (d == 0) return;
            for (int h = 0; h <= L; ++h) {
                if ((h + spec.k) % d != 0) continue;
                ++res.rules_checked;
                if (subset(base, const_mask[h])) continue;
                Rule r{premises_of(ends), box(h, c)};
                res.holds = false;
                res.failing = r;
                res.refutation = check_consequence(M, r.premises, r.conclusion);
                stop = true;
                return;
            }
        }
    };
    std::function<void(std::size_t, std::uint64_t, int, int)> go =
        [&](std::size_t from, std::uint64_t ends, int d, int size) {
            if (stop) return;
            visit(ends, d);
            if (size == max_size) return;
            for (std::size_t q = from; q < pairs.size() && !stop; ++q) {
                auto [u, v] = pairs[q];
                go(q + 1, ends | (1ULL << u) | (1ULL << v), std::gcd(d, v - u), size + 1);
            }
        };
    go(0, 0, 0, 0);
    return res;
}

bool replay_refutation(const MatrixFamily& M, const Refutation& r) {
    auto c = check_consequence(M, r.instance.premises, r.instance.conclusion);
    if (c.holds != r.instance_valid) return false;
    if (!r.instance_valid && !r.evidence.holds) {
        // The recorded valuation must refute the instance on its own.
        const auto& m = M.at(r.evidence.matrix);
        for (const auto& p : r.instance.premises)
            if (!m.is_designated(evaluate(m.algebra, p, r.evidence.valuation))) return false;
        return !m.is_designated(evaluate(m.algebra, r.instance.conclusion, r.evidence.valuation));
    }
    return true;
}

namespace {

struct Decider {
    const MatrixFamily& M;
    const DecideOptions& opts;
    const Signature& sig;
    Decision d;

    Decider(const MatrixFamily& M_, const DecideOptions& o)
        : M(M_), opts(o), sig(family_signature(M_)) {}

    ConsequenceResult rule(const std::string& condition, const Rule& r) {
        auto c = check_consequence(M, r.premises, r.conclusion);
        std::string detail = to_string(r);
        if (!c.holds) detail += " fails at " + valuation_text(M, c);
        d.trace.push_back({condition, c.holds, detail});
        return c;
    }

    void yes(const std::string& branch, Witness w) {
        d.answer = Answer::yes;
        d.branch = branch;
        d.witness = std::move(w);
    }

    void no(const std::string& branch, const std::string& condition, const Rule& r,
            bool valid, const ConsequenceResult& ev) {
        d.answer = Answer::no;
        d.branch = branch;
        d.refutation = Refutation{condition, r, valid, ev};
    }

    void run() {
        Formula x = var("x"), y = var("y");
        auto triv = rule("triviality: x |- y", {{x}, y});
        if (triv.holds) {
            auto inc = rule("inconsistency: |- x", {{}, x});
            if (inc.holds) {
                yes("trivial-inconsistent", construct_tau_trivial(sig, true));
                return;
            }
            try {
                yes("trivial-almost", construct_tau_trivial(sig, false));
            } catch (const Error&) {
                d.trace.push_back({"almost inconsistent logic needs two constants or a non-constant connective",
                                   false, "signature has neither"});
                no("trivial-almost",
                   "almost inconsistent logic over a language without two constants or a non-constant connective",
                   {{x}, y}, true, triv);
            }
            return;
        }
        if (!sig.graph_based()) {
            auto pair = find_equivalent_pair(M);
            if (!pair) {
                d.answer = Answer::inconclusive;
                d.branch = "non-graph-based";
                d.trace.push_back({"equivalent pair in x", false, "search bound reached"});
                return;
            }
            d.trace.push_back({"equivalent pair in x", true,
                               to_string(pair->first) + " == " + to_string(pair->second)});
            yes("non-graph-based", construct_tau_sufficient(M, pair->first, pair->second));
            return;
        }
        if (sig.unary_operation() < 0) {
            constants_only();
            return;
        }
        unary();
    }

    void constants_only() {
        Formula x = var("x");
        int nc = static_cast<int>(sig.constants.size());
        auto c = [&](int i) { return Formula::constant(sig, i); };
        std::optional<std::pair<Rule, ConsequenceResult>> first_failure;
        for (int i = 0; i < nc; ++i) {
            Rule r{{}, c(i)};
            auto res = rule("(i) theorem constant", r);
            if (res.holds) {
                GraphTauParams p;
                p.atom_constant = i;
                yes("constants-only(i)", construct_tau_graph_based(sig, GraphTauKind::assertional, p));
                return;
            }
            if (!first_failure) first_failure = std::pair{r, res};
        }
        std::vector<int> from_x;
        for (int i = 0; i < nc; ++i)
            if (rule("x |- constant", {{x}, c(i)}).holds) from_x.push_back(i);
        if (from_x.size() >= 2) {
            GraphTauParams p;
            p.i = from_x[0];
            p.j = from_x[1];
            p.atom_constant = from_x[0];
            yes("constants-only(ii)", construct_tau_graph_based(sig, GraphTauKind::constants, p));
            return;
        }
        if (!from_x.empty()) {
            for (int i = 0; i < nc; ++i)
                for (int j = i + 1; j < nc; ++j) {
                    bool a = rule("(iii) constants interderivable", {{c(i)}, c(j)}).holds;
                    bool b = a && rule("(iii) constants interderivable", {{c(j)}, c(i)}).holds;
                    if (a && b) {
                        GraphTauParams p;
                        p.i = i;
                        p.j = j;
                        p.atom_constant = from_x[0];
                        yes("constants-only(iii)",
                            construct_tau_graph_based(sig, GraphTauKind::constants, p));
                        return;
                    }
                }
        }
        if (!first_failure) {
            Rule r{{}, x};
            first_failure = std::pair{r, check_consequence(M, r.premises, r.conclusion)};
        }
        no("constants-only", "constants-only (i): no theorem among x and the constants",
           first_failure->first, false, first_failure->second);
    }

    void unary() {
        int op = sig.unary_operation();
        Formula x = var("x"), y = var("y");
        auto box = [&](int n, const Formula& f) { return iterate_op(sig, op, n, f); };
        std::vector<FiniteAlgebra> algs;
        for (const auto& m : reduce_family(M)) algs.push_back(m.algebra);
        auto [m, n] = box_periodicity(algs, op);
        d.periodicity = std::pair{m, n};
        d.trace.push_back({"periodicity box^m x = box^(n+1) x", true,
                           "m = " + std::to_string(m) + ", n = " + std::to_string(n)});
        RuleFamilySpec u{RuleFamily::U, 1, 0, m, n};
        auto ur = check_rule_family(M, u);
        d.trace.push_back({"U: x, y, box^t x |- box^t y for t <= n", ur.holds,
                           ur.failing ? to_string(*ur.failing) + " fails at " +
                                            valuation_text(M, ur.refutation)
                                      : ""});
        if (!ur.holds) {
            no("graph-based-unary", "U rules: x, y, box^t x |- box^t y", *ur.failing, false,
               ur.refutation);
            return;
        }
        Rule xbox{{x}, box(1, x)};
        auto r1 = rule("(i) x |- box x", xbox);
        if (r1.holds) {
            yes("graph-based-unary(i)", construct_tau_graph_based(sig, GraphTauKind::x_box, {}));
            return;
        }
        int nc = static_cast<int>(sig.constants.size());
        for (int t = 0; t <= n; ++t)
            for (int a = -1; a < nc; ++a) {
                Formula p = a < 0 ? x : Formula::constant(sig, a);
                if (!rule("(ii) y |- box^t p", {{y}, box(t, p)}).holds) continue;
                GraphTauParams gp;
                gp.t = t;
                gp.atom_constant = a;
                gp.m = m;
                gp.n = n;
                bool theorems = rule("theorem box^t p", {{}, box(t, p)}).holds;
                yes("graph-based-unary(ii)",
                    construct_tau_graph_based(sig, theorems ? GraphTauKind::assertional
                                                            : GraphTauKind::almost_assertional,
                                              gp));
                return;
            }
        for (int i = 0; i < nc; ++i)
            for (int k = 1; k <= n; ++k) {
                std::string tag = "(k=" + std::to_string(k) + ", i=" + std::to_string(i) + ")";
                bool ok = true;
                for (RuleFamily f : {RuleFamily::S, RuleFamily::R, RuleFamily::I}) {
                    RuleFamilySpec s{f, k, i, m, n};
                    auto r = check_rule_family(M, s, opts.exhaustive_ri);
                    d.trace.push_back({"(iii) family " + to_string(f) + " " + tag, r.holds,
                                       r.failing ? to_string(*r.failing) + " fails at " +
                                                       valuation_text(M, r.refutation)
                                                 : std::to_string(r.rules_checked) + " rules"});
                    if (!r.holds) {
                        ok = false;
                        break;
                    }
                }
                if (ok) {
                    GraphTauParams gp;
                    gp.k = k;
                    gp.i = i;
                    yes("graph-based-unary(iii)", construct_tau_graph_based(sig, GraphTauKind::k_i, gp));
                    return;
                }
            }
        no("graph-based-unary", "graph-based unary (i): x |- box x fails, and so do (ii) and (iii)",
           xbox, false, r1);
    }
};

bool trivial_logic(const MatrixFamily& M) {
    return consequence(M, {var("x")}, var("y"));
}

}  // namespace

Decision decide_matrices(const MatrixFamily& M, const DecideOptions& opts) {
    Decider dc(M, opts);
    dc.run();
    return dc.d;
}

CrossCheckReport cross_check_protoalgebraic(const MatrixFamily& M, const Decision& d, int depth) {
    CrossCheckReport rep;
    if (trivial_logic(M)) {
        rep.status = "skipped";
        rep.detail = "trivial logic";
        return rep;
    }
    const Signature& sig = family_signature(M);
    Formula x = var("x"), y = var("y");
    std::vector<Formula> delta;
    for (const auto& f : formula_pool(sig, depth, std::vector<std::string>{"x", "y"}))
        if (consequence(M, {}, substitute(f, "y", x))) delta.push_back(f);
    auto works = [&](const std::vector<Formula>& ds) {
        std::vector<Formula> prem{x};
        prem.insert(prem.end(), ds.begin(), ds.end());
        return consequence(M, prem, y);
    };
    if (!works(delta)) {
        rep.status = "not-certified";
        rep.detail = "no set Delta(x,y) found in the pool";
        return rep;
    }
    for (std::size_t i = delta.size(); i-- > 0;) {
        auto trial = delta;
        trial.erase(trial.begin() + static_cast<long>(i));
        if (works(trial)) delta = std::move(trial);
    }
    rep.evidence = delta;
    bool expected = find_equivalent_pair(M).has_value();
    bool got = d.answer == Answer::yes;
    rep.status = expected == got ? "agree" : "disagree";
    rep.detail = std::string("protoalgebraic; equivalent pair ") + (expected ? "exists" : "absent") +
                 ", decision " + to_string(d.answer);
    return rep;
}

CrossCheckReport cross_check_with_thms(const MatrixFamily& M, const Decision& d, int depth) {
    CrossCheckReport rep;
    if (trivial_logic(M)) {
        rep.status = "skipped";
        rep.detail = "trivial logic";
        return rep;
    }
    const Signature& sig = family_signature(M);
    std::optional<Formula> thm;
    for (const auto& f : formula_pool(sig, depth, std::vector<std::string>{"x", "y"}))
        if (!is_closed(f) && consequence(M, {}, f)) {
            thm = f;
            break;
        }
    if (!thm) {
        rep.status = "skipped";
        rep.detail = "no theorem with variables in the pool";
        return rep;
    }
    rep.evidence = {*thm};
    bool expected;
    if (sig.graph_based()) {
        expected = unital_reduced(M);
        rep.detail = std::string("graph-based with theorems; assertional ") + (expected ? "yes" : "no");
    } else {
        expected = find_equivalent_pair(M).has_value();
        rep.detail = std::string("with theorems; nontrivial equation in x ") +
                     (expected ? "exists" : "absent");
    }
    bool got = d.answer == Answer::yes;
    rep.status = expected == got ? "agree" : "disagree";
    rep.detail += ", decision " + to_string(d.answer);
    return rep;
}

}  // namespace algsem
