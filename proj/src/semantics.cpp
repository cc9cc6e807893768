#include "algsem/semantics.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "algsem/term_closure.hpp"

namespace algsem {

void validate_tau(const TauSet& tau) {
    for (const auto& e : tau)
        for (const auto* f : {&e.lhs, &e.rhs})
            for (const auto& v : variables(*f))
                if (v != tau_variable())
                    throw Error("tau equation '" + to_string(e) + "' uses variable '" + v +
                                "'; only x is allowed");
}

TauSet parse_tau(std::string_view text, const Signature& sig) {
    TauSet tau = parse_equations(text, sig);
    validate_tau(tau);
    return tau;
}

std::string to_string(const TauSet& tau) {
    std::string out;
    for (std::size_t i = 0; i < tau.size(); ++i) {
        if (i) out += "; ";
        out += to_string(tau[i]);
    }
    return out;
}

std::vector<Equation> tau_apply(const TauSet& tau, const Formula& phi) {
    std::vector<Equation> out;
    out.reserve(tau.size());
    for (const auto& e : tau)
        out.push_back({substitute(e.lhs, tau_variable(), phi), substitute(e.rhs, tau_variable(), phi)});
    return out;
}

std::vector<int> tau_solutions(const FiniteAlgebra& A, const TauSet& tau) {
    std::vector<int> out;
    for (int a = 0; a < A.size; ++a) {
        Valuation v{{tau_variable(), a}};
        bool ok = true;
        for (const auto& e : tau)
            if (evaluate(A, e.lhs, v) != evaluate(A, e.rhs, v)) {
                ok = false;
                break;
            }
        if (ok) out.push_back(a);
    }
    return out;
}

bool equational_consequence(const std::vector<FiniteAlgebra>& K, const std::vector<Equation>& theta,
                            const Equation& goal) {
    if (std::find(theta.begin(), theta.end(), goal) != theta.end()) return true;
    std::set<std::string> vs = variables(goal.lhs);
    auto add = [&](const Formula& f) {
        auto v = variables(f);
        vs.insert(v.begin(), v.end());
    };
    add(goal.rhs);
    for (const auto& e : theta) {
        add(e.lhs);
        add(e.rhs);
    }
    std::vector<std::string> vars(vs.begin(), vs.end());
    for (const auto& A : K) {
        std::vector<std::pair<std::vector<int>, std::vector<int>>> tabs;
        for (const auto& e : theta)
            tabs.emplace_back(term_table(A, e.lhs, vars), term_table(A, e.rhs, vars));
        auto gl = term_table(A, goal.lhs, vars);
        auto gr = term_table(A, goal.rhs, vars);
        for (std::size_t i = 0; i < gl.size(); ++i) {
            if (gl[i] == gr[i]) continue;
            bool all = true;
            for (const auto& [l, r] : tabs)
                if (l[i] != r[i]) {
                    all = false;
                    break;
                }
            if (all) return false;
        }
    }
    return true;
}

std::vector<Equation> theta_generators(const ThetaQuery& q) {
    std::vector<Equation> out;
    for (const auto& g : q.gamma)
        for (auto& e : tau_apply(q.tau, g)) out.push_back(std::move(e));
    return out;
}

bool theta_member_exact(const ThetaQuery& q) {
    if (q.target.lhs == q.target.rhs) return true;
    TermBank bank;
    auto gens = theta_generators(q);
    std::vector<std::pair<int, int>> ids;
    for (const auto& e : gens) ids.emplace_back(bank.intern(e.lhs), bank.intern(e.rhs));
    int a = bank.intern(q.target.lhs), b = bank.intern(q.target.rhs);
    CongruenceClosure cc(bank);
    for (auto [l, r] : ids) cc.merge(l, r);
    return cc.equivalent(a, b);
}

namespace {

// op^t atom decomposition of a graph-based formula.
std::pair<int, Formula> peel(const Formula& f, int op) {
    int t = 0;
    Formula g = f;
    while (g.is_operation()) {
        if (g.symbol() != op) throw Error("formula '" + to_string(f) + "' uses another operation");
        g = g.arg(0);
        ++t;
    }
    return {t, g};
}

}  // namespace

GraphQueryShape graph_query_shape(const ThetaQuery& q, const Signature& sig) {
    if (!sig.graph_based() || sig.unary_operation() < 0)
        throw Error("gcd membership needs a graph-based signature with a unary operation");
    if (q.tau.size() != 1) throw Error("gcd membership needs tau = {box^k x ~ box^n c}");
    GraphQueryShape s;
    s.op = sig.unary_operation();
    auto [k, lx] = peel(q.tau[0].lhs, s.op);
    auto [n, rc] = peel(q.tau[0].rhs, s.op);
    if (!lx.is_variable() || lx.name() != tau_variable() || !rc.is_constant() || n >= k)
        throw Error("gcd membership needs tau = {box^k x ~ box^n c} with n < k");
    s.k = k;
    s.n = n;
    s.constant = rc.symbol();
    auto [total, p] = peel(q.target.lhs, s.op);
    if (total < k || !(q.target.rhs == q.tau[0].rhs))
        throw Error("gcd membership needs target <box^(k+h) p, box^n c>");
    s.h = total - k;
    s.atom = p;
    for (const auto& g : q.gamma) peel(g, s.op);
    return s;
}

bool theta_member_graph_based(const ThetaQuery& q, const Signature& sig) {
    GraphQueryShape s = graph_query_shape(q, sig);
    std::vector<std::pair<int, Formula>> members;
    for (const auto& g : q.gamma) members.push_back(peel(g, s.op));
    int d = 0;
    for (std::size_t a = 0; a < members.size(); ++a) {
        const auto& [u, p] = members[a];
        if (p.is_constant() && p.symbol() == s.constant) d = std::gcd(d, s.k + u - s.n);
        for (std::size_t b = 0; b < members.size(); ++b) {
            const auto& [v, r] = members[b];
            if (v > u && r == p) d = std::gcd(d, v - u);
        }
    }
    if (s.atom.is_constant() && s.atom.symbol() == s.constant) {
        int diff = s.k + s.h - s.n;
        return d != 0 && diff % d == 0;
    }
    for (const auto& [t, p] : members) {
        if (!(p == s.atom) || t > s.h) continue;
        int g = s.h - t;
        if (d == 0 ? g == 0 : g % d == 0) return true;
    }
    return false;
}

namespace {

// Every formula obtained from f by replacing one occurrence of a side of a
// generator with the other side.
void one_step(const Formula& f, const std::vector<std::pair<Formula, Formula>>& rules,
              std::vector<Formula>& out) {
    for (const auto& [l, r] : rules)
        if (f == l) out.push_back(r);
    for (std::size_t i = 0; i < f.args().size(); ++i) {
        std::vector<Formula> sub;
        one_step(f.arg(i), rules, sub);
        for (auto& s : sub) {
            std::vector<Formula> args = f.args();
            args[i] = std::move(s);
            out.push_back(Formula::apply(f.symbol(), f.name(), std::move(args)));
        }
    }
}

std::vector<std::pair<Formula, Formula>> rewrite_rules(const ThetaQuery& q) {
    std::vector<std::pair<Formula, Formula>> rules;
    for (const auto& e : theta_generators(q)) {
        if (e.lhs == e.rhs) continue;
        rules.emplace_back(e.lhs, e.rhs);
        rules.emplace_back(e.rhs, e.lhs);
    }
    return rules;
}

}  // namespace

ChainResult theta_member_bounded(const ThetaQuery& q, int chain_bound, int size_cap) {
    ChainResult res;
    const Formula& start = q.target.lhs;
    const Formula& goal = q.target.rhs;
    if (start == goal) {
        res.member = true;
        res.chain = {start};
        return res;
    }
    auto rules = rewrite_rules(q);
    if (size_cap <= 0) {
        int side = 0;
        for (const auto& [l, r] : rules) side = std::max(side, l.size());
        size_cap = std::max(start.size(), goal.size()) + 2 * side;
    }
    const long explore_cap = 2000000;
    std::unordered_map<Formula, Formula, FormulaHash> parent;
    parent.emplace(start, Formula());
    std::vector<Formula> frontier{start};
    for (int depth = 0; depth < chain_bound && !frontier.empty(); ++depth) {
        std::vector<Formula> next;
        for (const auto& f : frontier) {
            std::vector<Formula> succ;
            one_step(f, rules, succ);
            for (auto& s : succ) {
                if (s.size() > size_cap || parent.count(s)) continue;
                parent.emplace(s, f);
                ++res.explored;
                if (s == goal) {
                    std::vector<Formula> chain{s};
                    Formula cur = f;
                    while (cur) {
                        chain.push_back(cur);
                        cur = parent.at(cur);
                    }
                    std::reverse(chain.begin(), chain.end());
                    res.member = true;
                    res.chain = std::move(chain);
                    return res;
                }
                next.push_back(std::move(s));
                if (res.explored >= explore_cap) return res;
            }
        }
        frontier = std::move(next);
    }
    return res;
}

bool check_chain(const ThetaQuery& q, const std::vector<Formula>& chain) {
    if (chain.empty() || !(chain.front() == q.target.lhs) || !(chain.back() == q.target.rhs))
        return false;
    auto rules = rewrite_rules(q);
    for (std::size_t i = 1; i < chain.size(); ++i) {
        std::vector<Formula> succ;
        one_step(chain[i - 1], rules, succ);
        if (std::find(succ.begin(), succ.end(), chain[i]) == succ.end()) return false;
    }
    return true;
}

namespace {

struct Bits {
    std::vector<std::uint64_t> w;
    int n = 0;

    explicit Bits(int bits = 0, bool ones = false)
        : w((bits + 63) / 64, ones ? ~0ULL : 0ULL), n(bits) {
        if (ones && bits % 64) w.back() = (1ULL << (bits % 64)) - 1;
    }
    void set(int i) { w[i / 64] |= 1ULL << (i % 64); }
    void and_with(const Bits& o) {
        for (std::size_t i = 0; i < w.size(); ++i) w[i] &= o.w[i];
    }
    bool subset_of(const Bits& o) const {
        for (std::size_t i = 0; i < w.size(); ++i)
            if (w[i] & ~o.w[i]) return false;
        return true;
    }
    bool operator==(const Bits&) const = default;
};

struct BitsHash {
    std::size_t operator()(const Bits& b) const {
        std::size_t h = 0;
        for (auto x : b.w) h = (h ^ x) * 0x100000001b3ULL;
        return h;
    }
};

// Designation bits over every (matrix, valuation of the pool variables).
std::vector<Bits> designation_masks(const MatrixFamily& M, const std::vector<Formula>& pool,
                                    const std::vector<std::string>& vars) {
    int width = 0;
    for (const auto& m : M) width += static_cast<int>(assignment_count(m.algebra.size, vars.size()));
    std::vector<Bits> out;
    out.reserve(pool.size());
    for (const auto& f : pool) {
        Bits b(width);
        int off = 0;
        for (const auto& m : M) {
            auto t = term_table(m.algebra, f, vars);
            for (std::size_t i = 0; i < t.size(); ++i)
                if (m.is_designated(t[i])) b.set(off + static_cast<int>(i));
            off += static_cast<int>(t.size());
        }
        out.push_back(std::move(b));
    }
    return out;
}

int mask_width(const std::vector<FiniteAlgebra>& K, std::size_t vars) {
    int width = 0;
    for (const auto& A : K) width += static_cast<int>(assignment_count(A.size, vars));
    return width;
}

// Bits where tau(phi) holds, over every (algebra, valuation).
std::vector<Bits> solution_masks(const std::vector<FiniteAlgebra>& K, const TauSet& tau,
                                 const std::vector<Formula>& pool,
                                 const std::vector<std::string>& vars) {
    int width = mask_width(K, vars.size());
    std::vector<std::vector<int>> sols;
    for (const auto& A : K) {
        std::vector<int> in(A.size, 0);
        for (int a : tau_solutions(A, tau)) in[a] = 1;
        sols.push_back(std::move(in));
    }
    std::vector<Bits> out;
    out.reserve(pool.size());
    for (const auto& f : pool) {
        Bits b(width);
        int off = 0;
        for (std::size_t k = 0; k < K.size(); ++k) {
            auto t = term_table(K[k], f, vars);
            for (std::size_t i = 0; i < t.size(); ++i)
                if (sols[k][t[i]]) b.set(off + static_cast<int>(i));
            off += static_cast<int>(t.size());
        }
        out.push_back(std::move(b));
    }
    return out;
}

FiniteAlgebra random_algebra(const Signature& sig, int size, std::mt19937& rng) {
    FiniteAlgebra A;
    A.sig = sig;
    A.size = size;
    std::uniform_int_distribution<int> pick(0, size - 1);
    for (std::size_t c = 0; c < sig.constants.size(); ++c) A.constants.push_back(pick(rng));
    for (const auto& op : sig.operations)
        A.tables.push_back(make_table(size, op.arity, [&](const int*) { return pick(rng); }));
    return A;
}

std::vector<FiniteAlgebra> probe_algebras(const Signature& sig, const TauSet& tau, int count,
                                          unsigned seed) {
    std::mt19937 rng(seed);
    std::vector<FiniteAlgebra> out;
    for (int attempt = 0; attempt < 40 * count && static_cast<int>(out.size()) < count; ++attempt) {
        int size = 2 + attempt % 2;
        FiniteAlgebra A = random_algebra(sig, size, rng);
        auto s = tau_solutions(A, tau).size();
        if (s > 0 && static_cast<int>(s) < size) out.push_back(std::move(A));
    }
    return out;
}

long binom(long n, int k) {
    if (k < 0 || k > n) return 0;
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

struct ClassTable {
    std::vector<std::vector<int>> members;
    std::vector<int> of;  // class of each pool formula
};

template <class Key, class Hash>
ClassTable classify(const std::vector<Key>& keys) {
    ClassTable t;
    std::unordered_map<Key, int, Hash> index;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        auto [it, fresh] = index.emplace(keys[i], static_cast<int>(t.members.size()));
        if (fresh) t.members.emplace_back();
        t.members[it->second].push_back(static_cast<int>(i));
        t.of.push_back(it->second);
    }
    return t;
}

// Multisets of class indices of size <= p, each as (class, multiplicity).
void for_each_multiset(int classes, int p,
                       const std::function<void(const std::vector<std::pair<int, int>>&)>& fn) {
    std::vector<std::pair<int, int>> cur;
    std::function<void(int, int)> go = [&](int from, int left) {
        fn(cur);
        if (left == 0) return;
        for (int c = from; c < classes; ++c)
            for (int mult = 1; mult <= left; ++mult) {
                cur.emplace_back(c, mult);
                go(c + 1, left - mult);
                cur.pop_back();
            }
    };
    go(0, p);
}

// Concrete sets of distinct formulas realizing a class multiset.
void for_each_realization(const ClassTable& ct, const std::vector<std::pair<int, int>>& ms,
                          const std::function<bool(const std::vector<int>&)>& fn) {
    std::vector<int> chosen;
    bool stop = false;
    std::function<void(std::size_t)> by_class;
    std::function<void(std::size_t, int, int)> pick = [&](std::size_t slot, int start, int left) {
        if (stop) return;
        if (left == 0) {
            by_class(slot + 1);
            return;
        }
        const auto& mem = ct.members[ms[slot].first];
        for (int i = start; i + left <= static_cast<int>(mem.size()) && !stop; ++i) {
            chosen.push_back(mem[i]);
            pick(slot, i + 1, left - 1);
            chosen.pop_back();
        }
    };
    by_class = [&](std::size_t slot) {
        if (stop) return;
        if (slot == ms.size()) {
            if (!fn(chosen)) stop = true;
            return;
        }
        pick(slot, 0, ms[slot].second);
    };
    by_class(0);
}

const std::size_t max_counterexamples = 20;

}  // namespace

VerifyReport verify_algebraic_semantics_bounded(const MatrixFamily& M, const TauSet& tau,
                                                const PoolSpec& spec) {
    validate_tau(tau);
    const Signature& sig = family_signature(M);
    VerifyReport rep;
    auto vars = variable_names(spec.vars);
    auto pool = formula_pool(sig, spec.depth, vars);
    rep.pool_size = static_cast<long>(pool.size());
    auto D = designation_masks(M, pool, vars);
    int dwidth = D.empty() ? 0 : D.front().n;

    std::vector<FiniteAlgebra> core;
    for (const auto& m : M) core.push_back(m.algebra);
    for (const auto& m : reduce_family(M)) core.push_back(m.algebra);
    auto T = solution_masks(core, tau, pool, vars);
    int twidth = mask_width(core, vars.size());
    auto probes = probe_algebras(sig, tau, spec.probes, spec.seed);
    auto P = solution_masks(probes, tau, pool, vars);
    int pwidth = mask_width(probes, vars.size());

    // Classes by (D, T); probes join the key when the class count stays small.
    auto make_keys = [&](bool with_probes) {
        std::vector<Bits> keys;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            Bits k(dwidth + twidth + (with_probes ? pwidth : 0));
            for (int b = 0; b < dwidth; ++b)
                if (D[i].w[b / 64] >> (b % 64) & 1) k.set(b);
            for (int b = 0; b < twidth; ++b)
                if (T[i].w[b / 64] >> (b % 64) & 1) k.set(dwidth + b);
            if (with_probes)
                for (int b = 0; b < pwidth; ++b)
                    if (P[i].w[b / 64] >> (b % 64) & 1) k.set(dwidth + twidth + b);
            keys.push_back(std::move(k));
        }
        return keys;
    };
    ClassTable ct = classify<Bits, BitsHash>(make_keys(true));
    bool probes_in_key = true;
    if (ct.members.size() > 300) {
        ct = classify<Bits, BitsHash>(make_keys(false));
        probes_in_key = false;
    }
    int nc = static_cast<int>(ct.members.size());
    auto rep_of = [&](int c) { return ct.members[c].front(); };

    TermBank bank;
    std::vector<std::vector<std::pair<int, int>>> tau_ids(pool.size());
    auto ids_of = [&](int i) -> const std::vector<std::pair<int, int>>& {
        auto& v = tau_ids[i];
        if (v.empty() && !tau.empty())
            for (const auto& e : tau_apply(tau, pool[i]))
                v.emplace_back(bank.intern(e.lhs), bank.intern(e.rhs));
        return v;
    };
    CongruenceClosure cc(bank);
    long checks = 0;

    for_each_multiset(nc, spec.premises_max, [&](const std::vector<std::pair<int, int>>& ms) {
        long gamma_count = 1;
        Bits dg(dwidth, true), tg(twidth, true), pg(pwidth, true);
        for (auto [c, mult] : ms) {
            gamma_count *= binom(static_cast<long>(ct.members[c].size()), mult);
            dg.and_with(D[rep_of(c)]);
            tg.and_with(T[rep_of(c)]);
            if (probes_in_key) pg.and_with(P[rep_of(c)]);
        }
        if (gamma_count == 0) return;
        std::vector<int> open;
        for (int c = 0; c < nc; ++c) {
            long pairs = gamma_count * static_cast<long>(ct.members[c].size());
            rep.pairs += pairs;
            int r = rep_of(c);
            if (dg.subset_of(D[r])) {
                rep.derivable += pairs;
            } else if (!tg.subset_of(T[r]) || (probes_in_key && !pg.subset_of(P[r]))) {
                rep.refuted += pairs;
            } else {
                open.push_back(c);
            }
        }
        if (open.empty()) return;
        long open_pairs = 0;
        for (int c : open) open_pairs += gamma_count * static_cast<long>(ct.members[c].size());
        long done = 0;
        for_each_realization(ct, ms, [&](const std::vector<int>& gamma) {
            Bits pgam(pwidth, true);
            for (int g : gamma) pgam.and_with(P[g]);
            bool closure_ready = false;
            for (int c : open)
                for (int phi : ct.members[c]) {
                    if (checks >= spec.budget) return false;
                    ++checks;
                    ++done;
                    if (!pgam.subset_of(P[phi])) {
                        ++rep.refuted;
                        continue;
                    }
                    if (!closure_ready) {
                        cc.reset();
                        for (int g : gamma)
                            for (auto [l, r] : ids_of(g)) cc.merge(l, r);
                        closure_ready = true;
                    }
                    ++rep.closure_checks;
                    bool member = true;
                    for (auto [l, r] : ids_of(phi))
                        if (!cc.equivalent(l, r)) {
                            member = false;
                            break;
                        }
                    if (member) {
                        rep.pass = false;
                        if (rep.counterexamples.size() < max_counterexamples) {
                            Counterexample ce;
                            for (int g : gamma) ce.gamma.push_back(pool[g]);
                            ce.phi = pool[phi];
                            ce.reason = "tau(phi) lies in theta(gamma, tau) but gamma does not entail phi";
                            rep.counterexamples.push_back(std::move(ce));
                        }
                    }
                }
            return true;
        });
        rep.unknown += open_pairs - done;
    });
    rep.note = "finite pool only: premise sets of at most " + std::to_string(spec.premises_max) +
               " formulas of depth <= " + std::to_string(spec.depth) + " over " +
               std::to_string(spec.vars) + " variables";
    if (rep.unknown > 0) rep.note += "; " + std::to_string(rep.unknown) + " pairs beyond the budget";
    return rep;
}

VerifyReport verify_class_semantics_bounded(const MatrixFamily& M,
                                            const std::vector<FiniteAlgebra>& K,
                                            const TauSet& tau, const PoolSpec& spec) {
    validate_tau(tau);
    const Signature& sig = family_signature(M);
    VerifyReport rep;
    auto vars = variable_names(spec.vars);
    auto pool = formula_pool(sig, spec.depth, vars);
    rep.pool_size = static_cast<long>(pool.size());
    auto D = designation_masks(M, pool, vars);
    auto T = solution_masks(K, tau, pool, vars);
    int dwidth = D.empty() ? 0 : D.front().n;
    int twidth = mask_width(K, vars.size());
    std::vector<std::pair<Bits, Bits>> keys;
    for (std::size_t i = 0; i < pool.size(); ++i) keys.emplace_back(D[i], T[i]);
    struct PairHash {
        std::size_t operator()(const std::pair<Bits, Bits>& p) const {
            return BitsHash{}(p.first) * 31 + BitsHash{}(p.second);
        }
    };
    ClassTable ct = classify<std::pair<Bits, Bits>, PairHash>(keys);
    int nc = static_cast<int>(ct.members.size());
    for_each_multiset(nc, spec.premises_max, [&](const std::vector<std::pair<int, int>>& ms) {
        long gamma_count = 1;
        Bits dg(dwidth, true), tg(twidth, true);
        for (auto [c, mult] : ms) {
            gamma_count *= binom(static_cast<long>(ct.members[c].size()), mult);
            dg.and_with(D[ct.members[c].front()]);
            tg.and_with(T[ct.members[c].front()]);
        }
        if (gamma_count == 0) return;
        for (int c = 0; c < nc; ++c) {
            long pairs = gamma_count * static_cast<long>(ct.members[c].size());
            rep.pairs += pairs;
            int r = ct.members[c].front();
            bool derivable = dg.subset_of(D[r]);
            bool entailed = tg.subset_of(T[r]);
            if (derivable) rep.derivable += pairs;
            else rep.refuted += pairs;
            if (derivable == entailed) continue;
            rep.pass = false;
            if (rep.counterexamples.size() >= max_counterexamples) continue;
            Counterexample ce;
            for (auto [cls, mult] : ms)
                for (int j = 0; j < mult; ++j) ce.gamma.push_back(pool[ct.members[cls][j]]);
            ce.phi = pool[r];
            ce.reason = derivable ? "gamma entails phi but tau[gamma] does not imply tau(phi) in K"
                                  : "tau[gamma] implies tau(phi) in K but gamma does not entail phi";
            rep.counterexamples.push_back(std::move(ce));
        }
    });
    rep.note = "finite pool only: premise sets of at most " + std::to_string(spec.premises_max) +
               " formulas of depth <= " + std::to_string(spec.depth) + " over " +
               std::to_string(spec.vars) + " variables";
    return rep;
}

std::optional<SuszkoFailure> suszko_failure(const MatrixFamily& M, const TauSet& tau, int depth,
                                            int params) {
    validate_tau(tau);
    const Signature& sig = family_signature(M);
    std::vector<std::string> vars{"v"};
    for (int i = 0; i < params; ++i) vars.push_back("z" + std::to_string(i));
    Formula x = Formula::variable(tau_variable());
    for (const auto& e : tau)
        for (const auto& ctx : formula_pool(sig, depth, vars)) {
            if (!variables(ctx).count("v")) continue;
            Formula a = substitute(ctx, "v", e.lhs);
            Formula b = substitute(ctx, "v", e.rhs);
            for (const auto& [p, c] : {std::pair{a, b}, std::pair{b, a}}) {
                Rule r{{x, p}, c};
                auto res = check_consequence(M, r.premises, r.conclusion);
                if (!res.holds) return SuszkoFailure{e, ctx, r, res};
            }
        }
    return std::nullopt;
}

bool suszko_condition(const MatrixFamily& M, const TauSet& tau, int depth, int params) {
    return !suszko_failure(M, tau, depth, params).has_value();
}

std::optional<std::pair<Formula, Formula>> find_equivalent_pair(const MatrixFamily& M,
                                                                int max_functions) {
    const Signature& sig = family_signature(M);
    MatrixFamily R = reduce_family(M);
    std::vector<int> offset;
    int width = 0;
    for (const auto& m : R) {
        offset.push_back(width);
        width += m.algebra.size;
    }
    auto table_of = [&](const Formula& atom) {
        std::vector<int> t(width);
        for (std::size_t k = 0; k < R.size(); ++k)
            for (int a = 0; a < R[k].algebra.size; ++a)
                t[offset[k] + a] = atom.is_variable() ? a : R[k].algebra.constants[atom.symbol()];
        return t;
    };
    struct VecHash {
        std::size_t operator()(const std::vector<int>& v) const {
            std::size_t h = v.size();
            for (int x : v) h = (h ^ static_cast<std::size_t>(x + 1)) * 0x100000001b3ULL;
            return h;
        }
    };
    std::vector<Formula> reps;
    std::vector<std::vector<int>> funcs;
    std::unordered_map<std::vector<int>, int, VecHash> index;
    std::optional<std::pair<Formula, Formula>> closed_pair;

    // Returns a pair when a candidate collides usefully.
    auto offer = [&](const Formula& f, std::vector<int> t) -> std::optional<std::pair<Formula, Formula>> {
        auto it = index.find(t);
        if (it != index.end()) {
            const Formula& old = reps[it->second];
            if (!is_closed(old) || !is_closed(f)) return std::pair{old, f};
            if (!closed_pair) closed_pair = std::pair{old, f};
            return std::nullopt;
        }
        index.emplace(t, static_cast<int>(reps.size()));
        reps.push_back(f);
        funcs.push_back(std::move(t));
        return std::nullopt;
    };

    std::vector<Formula> atoms;
    for (std::size_t c = 0; c < sig.constants.size(); ++c)
        atoms.push_back(Formula::constant(sig, static_cast<int>(c)));
    atoms.push_back(Formula::variable(tau_variable()));
    std::sort(atoms.begin(), atoms.end(), FormulaLess{});
    for (const auto& a : atoms)
        if (auto p = offer(a, table_of(a))) return p;

    std::size_t done = 0;
    while (static_cast<int>(reps.size()) < max_functions) {
        std::size_t count = reps.size();
        if (done == count) break;
        std::vector<std::pair<Formula, std::vector<int>>> cands;
        for (std::size_t op = 0; op < sig.operations.size(); ++op) {
            int arity = sig.operations[op].arity;
            long total = assignment_count(static_cast<int>(count), arity);
            for (long i = 0; i < total; ++i) {
                auto idx = decode_assignment(i, static_cast<int>(count), arity);
                bool fresh = false;
                for (int j : idx) fresh = fresh || j >= static_cast<int>(done);
                if (!fresh) continue;
                std::vector<Formula> args;
                for (int j : idx) args.push_back(reps[j]);
                std::vector<int> t(width), argv(arity);
                for (std::size_t k = 0; k < R.size(); ++k)
                    for (int a = 0; a < R[k].algebra.size; ++a) {
                        for (int j = 0; j < arity; ++j) argv[j] = funcs[idx[j]][offset[k] + a];
                        t[offset[k] + a] = R[k].algebra.apply(static_cast<int>(op), argv);
                    }
                cands.emplace_back(Formula::apply(sig, static_cast<int>(op), std::move(args)),
                                   std::move(t));
            }
        }
        std::sort(cands.begin(), cands.end(),
                  [](const auto& a, const auto& b) { return formula_less(a.first, b.first); });
        done = count;
        for (auto& [f, t] : cands)
            if (auto p = offer(f, std::move(t))) return p;
    }
    int nary = sig.nary_operation();
    if (closed_pair && nary >= 0) {
        Formula x = Formula::variable(tau_variable());
        std::vector<Formula> a(sig.arity(nary), x), b(sig.arity(nary), x);
        a[0] = closed_pair->first;
        b[0] = closed_pair->second;
        return std::pair{Formula::apply(sig, nary, a), Formula::apply(sig, nary, b)};
    }
    return std::nullopt;
}

std::string to_string(WitnessKind k) {
    switch (k) {
        case WitnessKind::standard_check: return "standard-check";
        case WitnessKind::trivial_inconsistent: return "trivial-inconsistent";
        case WitnessKind::trivial_almost: return "trivial-almost";
        case WitnessKind::assertional: return "assertional";
        case WitnessKind::almost_assertional: return "almost-assertional";
        case WitnessKind::equivalent_pair_construction: return "equivalent-pair-construction";
        case WitnessKind::graph_based_k_i: return "graph-based-k-i";
        case WitnessKind::graph_based_x_box: return "graph-based-x-box";
        case WitnessKind::constants_pair: return "constants-pair";
    }
    return "unknown";
}

Witness construct_tau_trivial(const Signature& sig, bool inconsistent) {
    Witness w;
    if (inconsistent) {
        w.kind = WitnessKind::trivial_inconsistent;
        return w;
    }
    w.kind = WitnessKind::trivial_almost;
    Formula x = Formula::variable(tau_variable());
    for (std::size_t op = 0; op < sig.operations.size(); ++op) {
        int n = sig.operations[op].arity;
        if (n < 1) continue;
        Formula fx = Formula::apply(sig, static_cast<int>(op), std::vector<Formula>(n, x));
        Formula ffx = Formula::apply(sig, static_cast<int>(op), std::vector<Formula>(n, fx));
        w.tau = {{fx, ffx}};
        w.evidence["connective"] = sig.operations[op].name;
        return w;
    }
    if (sig.constants.size() >= 2) {
        w.tau = {{Formula::constant(sig, 0), Formula::constant(sig, 1)}};
        w.evidence["constants"] = sig.constants[0] + "," + sig.constants[1];
        return w;
    }
    throw Error("an almost inconsistent logic over this signature has no algebraic semantics");
}

Witness construct_tau_sufficient(const MatrixFamily& M, const Formula& phi0, const Formula& psi0) {
    const Signature& sig = family_signature(M);
    if (sig.graph_based()) throw Error("construct_tau_sufficient needs a signature that is not graph-based");
    if (phi0 == psi0) throw Error("the two formulas must be distinct");
    auto vp = variables(phi0), vq = variables(psi0);
    std::set<std::string> all = vp;
    all.insert(vq.begin(), vq.end());
    if (all != std::set<std::string>{tau_variable()})
        throw Error("the two formulas must jointly use exactly the variable x");
    if (!logically_equivalent(M, phi0, psi0)) throw Error("the two formulas are not logically equivalent");
    Formula phi = phi0, psi = psi0;
    if (vp.empty()) std::swap(phi, psi);
    Formula x = Formula::variable(tau_variable());
    if (is_closed(psi)) {
        if (phi == x) {
            Witness w = construct_tau_trivial(sig, consequence(M, {}, x));
            w.evidence["pair"] = to_string(phi0) + " , " + to_string(psi0);
            return w;
        }
        psi = substitute(phi, tau_variable(), phi);
    }
    int k = std::max(phi.height(), psi.height()) + 1;
    Formula box, dia;
    auto unary = sig.unary_operations();
    if (unary.size() >= 2) {
        box = Formula::apply(sig, unary[0], {x});
        dia = Formula::apply(sig, unary[1], {x});
    } else {
        std::tie(box, dia) = box_diamond_from_nary(sig, sig.nary_operation(), tau_variable());
    }
    Formula inner = iterate(box, tau_variable(), k, dia);
    auto wrap = [&](const Formula& f) {
        Formula g = substitute(f, tau_variable(), inner);
        return iterate(box, tau_variable(), 2 * k, substitute(dia, tau_variable(), g));
    };
    Witness w;
    w.kind = WitnessKind::equivalent_pair_construction;
    w.tau = {{wrap(phi), wrap(psi)}};
    w.evidence["phi"] = to_string(phi);
    w.evidence["psi"] = to_string(psi);
    w.evidence["k"] = std::to_string(k);
    w.evidence["box"] = to_string(box);
    w.evidence["diamond"] = to_string(dia);
    return w;
}

Witness construct_tau_graph_based(const Signature& sig, GraphTauKind kind, const GraphTauParams& p) {
    int op = sig.unary_operation();
    auto need_op = [&] {
        if (op < 0) throw Error("this tau needs a unary operation");
    };
    auto constant = [&](int i) {
        if (i < 0 || i >= static_cast<int>(sig.constants.size()))
            throw Error("constant index " + std::to_string(i) + " out of range");
        return Formula::constant(sig, i);
    };
    auto box = [&](int n, const Formula& f) {
        if (n > 0) need_op();
        return n > 0 ? iterate_op(sig, op, n, f) : f;
    };
    Formula x = Formula::variable(tau_variable());
    auto atom = [&] { return p.atom_constant < 0 ? x : constant(p.atom_constant); };
    Witness w;
    switch (kind) {
        case GraphTauKind::x_box:
            need_op();
            w.kind = WitnessKind::graph_based_x_box;
            w.tau = {{x, box(1, x)}};
            break;
        case GraphTauKind::k_i:
            need_op();
            if (p.k < 1) throw Error("k must be positive");
            w.kind = WitnessKind::graph_based_k_i;
            w.tau = {{box(p.k, x), constant(p.i)}};
            w.evidence["k"] = std::to_string(p.k);
            w.evidence["i"] = std::to_string(p.i);
            break;
        case GraphTauKind::periodic:
            need_op();
            if (p.m < 0 || p.m > p.n) throw Error("periodicity needs 0 <= m <= n");
            w.kind = WitnessKind::almost_assertional;
            w.tau = {{box(p.m, x), box(p.n + 1, x)}};
            break;
        case GraphTauKind::constants:
            if (p.i == p.j) throw Error("two distinct constants are needed");
            if (p.atom_constant < 0) throw Error("the constant entailed by x is needed");
            w.kind = WitnessKind::constants_pair;
            // the second equation picks out the designated value
            w.tau = {{constant(p.i), constant(p.j)}, {x, constant(p.atom_constant)}};
            break;
        case GraphTauKind::assertional:
            if (p.t < 0) throw Error("t must be nonnegative");
            w.kind = WitnessKind::assertional;
            w.tau = {{x, box(p.t, atom())}};
            w.evidence["t"] = std::to_string(p.t);
            break;
        case GraphTauKind::almost_assertional:
            need_op();
            if (p.m < 0 || p.m > p.n || p.t < 0) throw Error("invalid almost assertional parameters");
            w.kind = WitnessKind::almost_assertional;
            w.tau = {{box(p.m, x), box(p.n + 1, x)}, {x, box(p.t, atom())}};
            w.evidence["m"] = std::to_string(p.m);
            w.evidence["n"] = std::to_string(p.n);
            w.evidence["t"] = std::to_string(p.t);
            break;
    }
    return w;
}

}  // namespace algsem
