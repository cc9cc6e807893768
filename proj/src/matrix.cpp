#include "algsem/matrix.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace algsem {

namespace {

struct VecHash {
    std::size_t operator()(const std::vector<int>& v) const {
        std::size_t h = v.size();
        for (int x : v) h = h * 1000003u ^ static_cast<std::size_t>(x + 1);
        return h;
    }
};

std::vector<std::string> joint_variables(const std::vector<Formula>& fs) {
    std::set<std::string> vs;
    for (const auto& f : fs) {
        auto v = variables(f);
        vs.insert(v.begin(), v.end());
    }
    return {vs.begin(), vs.end()};
}

// Subalgebra of a product generated by the given tuples (and constants).
std::vector<std::vector<int>> close_tuples(const std::vector<const FiniteAlgebra*>& factors,
                                           std::vector<std::vector<int>> gens, long bound) {
    const Signature& sig = factors.front()->sig;
    std::size_t width = factors.size();
    for (std::size_t c = 0; c < sig.constants.size(); ++c) {
        std::vector<int> t(width);
        for (std::size_t i = 0; i < width; ++i) t[i] = factors[i]->constants[c];
        gens.push_back(std::move(t));
    }
    std::unordered_set<std::vector<int>, VecHash> seen;
    std::vector<std::vector<int>> elems;
    for (auto& g : gens)
        if (seen.insert(g).second) elems.push_back(g);
    std::size_t done = 0;
    while (true) {
        std::size_t count = elems.size();
        for (std::size_t op = 0; op < sig.operations.size(); ++op) {
            int arity = sig.operations[op].arity;
            std::vector<std::size_t> idx(arity, 0);
            std::vector<int> args(arity);
            std::function<void(int, bool)> go = [&](int pos, bool fresh) {
                if (pos == arity) {
                    if (!fresh) return;
                    std::vector<int> t(width);
                    for (std::size_t i = 0; i < width; ++i) {
                        for (int j = 0; j < arity; ++j) args[j] = elems[idx[j]][i];
                        t[i] = factors[i]->apply(static_cast<int>(op), args);
                    }
                    if (seen.insert(t).second) {
                        if (static_cast<long>(elems.size()) >= bound)
                            throw Error("filter computation exceeds its size bound");
                        elems.push_back(std::move(t));
                    }
                    return;
                }
                for (std::size_t i = 0; i < count; ++i) {
                    idx[pos] = i;
                    go(pos + 1, fresh || i >= done);
                }
            };
            go(0, false);
        }
        done = count;
        if (elems.size() == count) break;
    }
    return elems;
}

}  // namespace

bool Matrix::is_designated(int e) const {
    return std::binary_search(designated.begin(), designated.end(), e);
}

std::string to_string(const Rule& r) {
    std::string out;
    for (std::size_t i = 0; i < r.premises.size(); ++i) {
        if (i) out += ", ";
        out += to_string(r.premises[i]);
    }
    return out + (r.premises.empty() ? "|> " : " |> ") + to_string(r.conclusion);
}

const Signature& family_signature(const MatrixFamily& M) {
    if (M.empty()) throw Error("matrix family is empty");
    return M.front().algebra.sig;
}

ConsequenceResult check_consequence(const MatrixFamily& M, const std::vector<Formula>& premises,
                                    const Formula& conclusion) {
    std::vector<Formula> all = premises;
    all.push_back(conclusion);
    auto vars = joint_variables(all);
    for (std::size_t mi = 0; mi < M.size(); ++mi) {
        const auto& m = M[mi];
        if (!(m.algebra.sig == M.front().algebra.sig)) throw Error("signature mismatch");
        std::vector<std::vector<int>> tabs;
        for (const auto& p : premises) tabs.push_back(term_table(m.algebra, p, vars));
        auto goal = term_table(m.algebra, conclusion, vars);
        for (std::size_t i = 0; i < goal.size(); ++i) {
            if (m.is_designated(goal[i])) continue;
            bool all_in = true;
            for (const auto& t : tabs)
                if (!m.is_designated(t[i])) {
                    all_in = false;
                    break;
                }
            if (all_in) {
                ConsequenceResult r;
                r.holds = false;
                r.matrix = static_cast<int>(mi);
                auto a = decode_assignment(static_cast<long>(i), m.algebra.size,
                                           static_cast<int>(vars.size()));
                for (std::size_t j = 0; j < vars.size(); ++j) r.valuation[vars[j]] = a[j];
                return r;
            }
        }
    }
    return {};
}

bool consequence(const MatrixFamily& M, const std::vector<Formula>& premises,
                 const Formula& conclusion) {
    return check_consequence(M, premises, conclusion).holds;
}

Congruence leibniz_congruence(const FiniteAlgebra& A, const std::vector<int>& F) {
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < A.size; ++a)
        for (int c = a + 1; c < A.size; ++c)
            if (compatible_with(congruence_generated(A, {{a, c}}), F)) pairs.emplace_back(a, c);
    return congruence_from_pairs(A.size, pairs);
}

Matrix reduce_matrix(const Matrix& m) {
    auto omega = leibniz_congruence(m.algebra, m.designated);
    auto q = quotient(m.algebra, omega);
    Matrix r;
    r.algebra = std::move(q.algebra);
    std::set<int> d;
    for (int f : m.designated) d.insert(q.projection[f]);
    r.designated.assign(d.begin(), d.end());
    if (!m.algebra.labels.empty()) {
        for (const auto& block : omega.blocks()) {
            std::string l;
            for (std::size_t i = 0; i < block.size(); ++i)
                l += (i ? "|" : "") + m.algebra.labels[block[i]];
            r.algebra.labels.push_back(l);
        }
    }
    return r;
}

MatrixFamily reduce_family(const MatrixFamily& M) {
    MatrixFamily out;
    if (!M.empty() && has_unary_canonical_form(family_signature(M))) {
        std::set<std::string> seen;
        for (const auto& m : M) {
            Matrix r = reduce_matrix(m);
            if (seen.insert(unary_canonical_form(r.algebra, r.designated)).second)
                out.push_back(std::move(r));
        }
        return out;
    }
    for (const auto& m : M) {
        Matrix r = reduce_matrix(m);
        bool dup = false;
        for (const auto& o : out)
            if (o.algebra.size == r.algebra.size && o.designated.size() == r.designated.size() &&
                (r.algebra.size > 8 ? (o.algebra.tables == r.algebra.tables &&
                                       o.algebra.constants == r.algebra.constants &&
                                       o.designated == r.designated)
                                    : isomorphic_matrices(o.algebra, o.designated, r.algebra,
                                                          r.designated))) {
                dup = true;
                break;
            }
        if (!dup) out.push_back(std::move(r));
    }
    return out;
}

namespace {

// Values under the canonical valuation x_b -> b of the consequences of every
// formula whose value lies in X. Not closed by itself when equal values do
// not mean interderivable formulas.
std::vector<int> derivation_step(const MatrixFamily& M, const FiniteAlgebra& B,
                                 const std::vector<int>& X, long bound) {
    std::vector<char> inX(B.size, 0);
    for (int x : X) inX[x] = 1;
    // Valuations g (one variable per element of B) under which every formula
    // designated-by-X in B is designated in the matrix.
    std::vector<const FiniteAlgebra*> factors{&B};
    std::vector<const Matrix*> owners;
    std::vector<std::vector<int>> columns;
    for (const auto& m : M) {
        const FiniteAlgebra& A = m.algebra;
        if (!(A.sig == B.sig)) throw Error("signature mismatch");
        long count = assignment_count(A.size, B.size);
        for (long gi = 0; gi < count; ++gi) {
            auto g = decode_assignment(gi, A.size, B.size);
            std::vector<std::vector<int>> gens;
            for (int b = 0; b < B.size; ++b) gens.push_back({b, g[b]});
            auto sub = close_tuples({&B, &A}, gens, bound);
            bool good = true;
            for (const auto& p : sub)
                if (inX[p[0]] && !m.is_designated(p[1])) {
                    good = false;
                    break;
                }
            if (!good) continue;
            factors.push_back(&A);
            owners.push_back(&m);
            columns.push_back(std::move(g));
        }
    }
    std::vector<std::vector<int>> gens;
    for (int b = 0; b < B.size; ++b) {
        std::vector<int> t{b};
        for (const auto& g : columns) t.push_back(g[b]);
        gens.push_back(std::move(t));
    }
    auto S = close_tuples(factors, gens, bound);
    std::set<int> out;
    for (const auto& s : S) {
        bool all = true;
        for (std::size_t j = 0; j < owners.size(); ++j)
            if (!owners[j]->is_designated(s[j + 1])) {
                all = false;
                break;
            }
        if (all) out.insert(s[0]);
    }
    for (int x : X) out.insert(x);
    return {out.begin(), out.end()};
}

}  // namespace

std::vector<int> filter_closure(const MatrixFamily& M, const FiniteAlgebra& B,
                                const std::vector<int>& X, long bound) {
    std::vector<int> cur(X);
    std::sort(cur.begin(), cur.end());
    cur.erase(std::unique(cur.begin(), cur.end()), cur.end());
    while (true) {
        auto next = derivation_step(M, B, cur, bound);
        if (next == cur) return cur;
        cur = std::move(next);
    }
}

bool is_deductive_filter(const MatrixFamily& M, const FiniteAlgebra& B, const std::vector<int>& F) {
    std::vector<int> sorted(F);
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    return derivation_step(M, B, sorted, 2000000) == sorted;
}

std::vector<std::vector<int>> all_filters(const MatrixFamily& M, const FiniteAlgebra& B,
                                          int bound) {
    if (B.size > bound) throw Error("algebra too large for subset enumeration");
    std::vector<std::vector<int>> out;
    for (long mask = 0; mask < (1L << B.size); ++mask) {
        std::vector<int> F;
        for (int b = 0; b < B.size; ++b)
            if (mask >> b & 1) F.push_back(b);
        if (is_deductive_filter(M, B, F)) out.push_back(std::move(F));
    }
    return out;
}

std::vector<int> filter_generated(const MatrixFamily& M, const FiniteAlgebra& B,
                                  const std::vector<int>& X, int bound) {
    std::vector<char> acc(B.size, 1);
    for (const auto& F : all_filters(M, B, bound)) {
        std::vector<char> in(B.size, 0);
        for (int f : F) in[f] = 1;
        bool contains = true;
        for (int x : X)
            if (!in[x]) contains = false;
        if (!contains) continue;
        for (int b = 0; b < B.size; ++b) acc[b] = acc[b] && in[b];
    }
    std::vector<int> out;
    for (int b = 0; b < B.size; ++b)
        if (acc[b]) out.push_back(b);
    return out;
}

std::vector<std::vector<int>> unary_polynomials(const FiniteAlgebra& A) {
    std::set<std::vector<int>> seen;
    std::vector<std::vector<int>> funcs;
    auto add = [&](std::vector<int> f) {
        if (seen.insert(f).second) funcs.push_back(std::move(f));
    };
    std::vector<int> id(A.size);
    std::iota(id.begin(), id.end(), 0);
    add(id);
    for (int e = 0; e < A.size; ++e) add(std::vector<int>(A.size, e));
    // Compose with basic translations f(e_1, .., p, .., e_r).
    for (std::size_t i = 0; i < funcs.size(); ++i) {
        for (std::size_t op = 0; op < A.tables.size(); ++op) {
            int arity = A.sig.operations[op].arity;
            long others = assignment_count(A.size, arity - 1);
            for (int pos = 0; pos < arity; ++pos)
                for (long o = 0; o < others; ++o) {
                    auto rest = decode_assignment(o, A.size, arity - 1);
                    std::vector<int> args(arity), f(A.size);
                    for (int a = 0; a < A.size; ++a) {
                        for (int j = 0, r = 0; j < arity; ++j)
                            args[j] = j == pos ? funcs[i][a] : rest[r++];
                        f[a] = A.apply(static_cast<int>(op), args);
                    }
                    add(std::move(f));
                }
        }
    }
    return funcs;
}

Congruence tarski_congruence(const MatrixFamily& M, const FiniteAlgebra& A) {
    std::vector<std::vector<int>> fg;
    for (int b = 0; b < A.size; ++b) fg.push_back(filter_closure(M, A, {b}));
    auto polys = unary_polynomials(A);
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < A.size; ++a)
        for (int c = a + 1; c < A.size; ++c) {
            bool same = true;
            for (const auto& p : polys)
                if (fg[p[a]] != fg[p[c]]) {
                    same = false;
                    break;
                }
            if (same) pairs.emplace_back(a, c);
        }
    return congruence_from_pairs(A.size, pairs);
}

bool logically_equivalent(const MatrixFamily& M, const Formula& e, const Formula& d) {
    if (e == d) return true;
    for (const auto& m : reduce_family(M))
        if (!satisfies(m.algebra, {e, d})) return false;
    return true;
}

bool unital_reduced(const MatrixFamily& M) {
    for (const auto& m : reduce_family(M))
        if (m.designated.size() > 1) return false;
    return true;
}

std::vector<Formula> formula_pool(const Signature& sig, int depth,
                                  const std::vector<std::string>& vars) {
    std::vector<Formula> atoms;
    for (std::size_t c = 0; c < sig.constants.size(); ++c)
        atoms.push_back(Formula::constant(sig, static_cast<int>(c)));
    for (const auto& v : vars) atoms.push_back(Formula::variable(v));
    std::vector<Formula> level = depth >= 1 ? atoms : std::vector<Formula>{};
    for (int d = 2; d <= depth; ++d) {
        std::unordered_set<Formula, FormulaHash> seen(level.begin(), level.end());
        std::vector<Formula> next = level;
        for (std::size_t op = 0; op < sig.operations.size(); ++op) {
            int arity = sig.operations[op].arity;
            long count = assignment_count(static_cast<int>(level.size()), arity);
            for (long i = 0; i < count; ++i) {
                auto idx = decode_assignment(i, static_cast<int>(level.size()), arity);
                std::vector<Formula> args;
                for (int j : idx) args.push_back(level[j]);
                Formula f = Formula::apply(sig, static_cast<int>(op), std::move(args));
                if (seen.insert(f).second) next.push_back(f);
            }
        }
        level = std::move(next);
    }
    std::vector<std::pair<std::string, Formula>> keyed;
    for (auto& f : level) keyed.emplace_back(to_string(f), f);
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
        if (a.second.size() != b.second.size()) return a.second.size() < b.second.size();
        return a.first < b.first;
    });
    std::vector<Formula> out;
    for (auto& [s, f] : keyed) out.push_back(f);
    return out;
}

std::vector<Formula> formula_pool(const Signature& sig, int depth, int vars) {
    return formula_pool(sig, depth, variable_names(vars));
}

}  // namespace algsem
