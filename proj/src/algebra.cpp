#include "algsem/algebra.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_map>

namespace algsem {

namespace {

struct VecHash {
    std::size_t operator()(const std::vector<int>& v) const {
        std::size_t h = v.size();
        for (int x : v) h = h * 1000003u ^ static_cast<std::size_t>(x + 1);
        return h;
    }
};

class UnionFind {
public:
    explicit UnionFind(int n) : p_(n) { std::iota(p_.begin(), p_.end(), 0); }
    int find(int a) {
        while (p_[a] != a) a = p_[a] = p_[p_[a]];
        return a;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (b < a) std::swap(a, b);
        p_[b] = a;  // keep the least element as root
        return true;
    }

private:
    std::vector<int> p_;
};

long ipow(long b, int e) {
    long r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

}  // namespace

int FiniteAlgebra::apply(int op, const int* args) const {
    int arity = sig.operations[op].arity;
    long idx = 0;
    for (int i = 0; i < arity; ++i) idx = idx * size + args[i];
    return tables[op][idx];
}

std::string FiniteAlgebra::label(int e) const {
    if (e >= 0 && e < static_cast<int>(labels.size())) return labels[e];
    return std::to_string(e);
}

int FiniteAlgebra::element(const std::string& l) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == l) return static_cast<int>(i);
    if (!l.empty() && std::all_of(l.begin(), l.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        int v = std::stoi(l);
        if (v < size) return v;
    }
    throw Error("unknown element '" + l + "'");
}

void FiniteAlgebra::validate() const {
    if (size < 1) throw Error("algebra must have at least one element");
    if (constants.size() != sig.constants.size()) throw Error("missing constant values");
    for (int c : constants)
        if (c < 0 || c >= size) throw Error("constant value out of range");
    if (tables.size() != sig.operations.size()) throw Error("missing operation tables");
    for (std::size_t i = 0; i < tables.size(); ++i) {
        if (static_cast<long>(tables[i].size()) != ipow(size, sig.operations[i].arity))
            throw Error("table of '" + sig.operations[i].name + "' has wrong size");
        for (int v : tables[i])
            if (v < 0 || v >= size)
                throw Error("table of '" + sig.operations[i].name + "' has an entry out of range");
    }
    if (!labels.empty() && static_cast<int>(labels.size()) != size)
        throw Error("label count differs from algebra size");
}

std::vector<int> make_table(int size, int arity, const std::function<int(const int*)>& f) {
    long n = ipow(size, arity);
    std::vector<int> t(n);
    std::vector<int> args(arity, 0);
    for (long idx = 0; idx < n; ++idx) {
        long r = idx;
        for (int i = arity - 1; i >= 0; --i) {
            args[i] = static_cast<int>(r % size);
            r /= size;
        }
        t[idx] = f(args.data());
    }
    return t;
}

int evaluate(const FiniteAlgebra& A, const Formula& f, const Valuation& v) {
    std::unordered_map<const FormulaNode*, int> memo;
    std::function<int(const Formula&)> go = [&](const Formula& g) -> int {
        switch (g.kind()) {
            case NodeKind::variable: {
                auto it = v.find(g.name());
                if (it == v.end()) throw Error("unbound variable '" + g.name() + "'");
                return it->second;
            }
            case NodeKind::constant: return A.constants.at(g.symbol());
            default: break;
        }
        auto m = memo.find(g.node());
        if (m != memo.end()) return m->second;
        int args[8];
        std::vector<int> big;
        int* a = args;
        if (g.args().size() > 8) {
            big.resize(g.args().size());
            a = big.data();
        }
        for (std::size_t i = 0; i < g.args().size(); ++i) a[i] = go(g.arg(i));
        int r = A.apply(g.symbol(), a);
        memo.emplace(g.node(), r);
        return r;
    };
    return go(f);
}

long assignment_count(int size, int count) { return ipow(size, count); }

std::vector<int> decode_assignment(long index, int size, int count) {
    std::vector<int> out(count);
    for (int i = 0; i < count; ++i) {
        out[i] = static_cast<int>(index % size);
        index /= size;
    }
    return out;
}

std::vector<int> term_table(const FiniteAlgebra& A, const Formula& f,
                            const std::vector<std::string>& vars) {
    long n = assignment_count(A.size, static_cast<int>(vars.size()));
    std::unordered_map<const FormulaNode*, std::vector<int>> memo;
    std::function<const std::vector<int>&(const Formula&)> go =
        [&](const Formula& g) -> const std::vector<int>& {
        auto m = memo.find(g.node());
        if (m != memo.end()) return m->second;
        std::vector<int> t(n);
        if (g.is_variable()) {
            auto it = std::find(vars.begin(), vars.end(), g.name());
            if (it == vars.end()) throw Error("unbound variable '" + g.name() + "'");
            long stride = ipow(A.size, static_cast<int>(it - vars.begin()));
            for (long i = 0; i < n; ++i) t[i] = static_cast<int>((i / stride) % A.size);
        } else if (g.is_constant()) {
            std::fill(t.begin(), t.end(), A.constants.at(g.symbol()));
        } else {
            std::vector<const std::vector<int>*> ch;
            for (const auto& a : g.args()) ch.push_back(&go(a));
            const auto& tab = A.tables.at(g.symbol());
            for (long i = 0; i < n; ++i) {
                long idx = 0;
                for (const auto* c : ch) idx = idx * A.size + (*c)[i];
                t[i] = tab[idx];
            }
        }
        return memo.emplace(g.node(), std::move(t)).first->second;
    };
    return go(f);
}

int Congruence::block_count() const {
    int n = 0;
    for (int i = 0; i < size(); ++i)
        if (rep[i] == i) ++n;
    return n;
}

std::vector<std::vector<int>> Congruence::blocks() const {
    std::vector<std::vector<int>> out;
    std::vector<int> index(size(), -1);
    for (int i = 0; i < size(); ++i) {
        if (rep[i] == i) {
            index[i] = static_cast<int>(out.size());
            out.push_back({});
        }
        out[index[rep[i]]].push_back(i);
    }
    return out;
}

bool Congruence::is_identity() const { return block_count() == size(); }
bool Congruence::is_total() const { return block_count() <= 1; }

bool Congruence::refines(const Congruence& other) const {
    for (int i = 0; i < size(); ++i)
        if (!other.related(i, rep[i])) return false;
    return true;
}

Congruence identity_congruence(int n) {
    Congruence c;
    c.rep.resize(n);
    std::iota(c.rep.begin(), c.rep.end(), 0);
    return c;
}

Congruence total_congruence(int n) { return Congruence{std::vector<int>(n, 0)}; }

Congruence congruence_from_pairs(int n, const std::vector<std::pair<int, int>>& pairs) {
    UnionFind uf(n);
    for (auto [a, b] : pairs) uf.unite(a, b);
    Congruence c;
    c.rep.resize(n);
    for (int i = 0; i < n; ++i) c.rep[i] = uf.find(i);
    return c;
}

Congruence meet(const Congruence& a, const Congruence& b) {
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < a.size(); ++i)
        for (int j = 0; j < i; ++j)
            if (a.related(i, j) && b.related(i, j)) {
                pairs.emplace_back(i, j);
                break;
            }
    return congruence_from_pairs(a.size(), pairs);
}

bool is_congruence(const FiniteAlgebra& A, const Congruence& c) {
    for (std::size_t op = 0; op < A.tables.size(); ++op) {
        int arity = A.sig.operations[op].arity;
        long n = ipow(A.size, arity);
        const auto& tab = A.tables[op];
        for (long idx = 0; idx < n; ++idx) {
            // Replace one argument by its block representative.
            long stride = 1;
            for (int pos = 0; pos < arity; ++pos) {
                int a = static_cast<int>((idx / stride) % A.size);
                long idx2 = idx + (c.rep[a] - a) * stride;
                if (!c.related(tab[idx], tab[idx2])) return false;
                stride *= A.size;
            }
        }
    }
    return true;
}

bool compatible_with(const Congruence& c, const std::vector<int>& subset) {
    std::vector<char> in(c.size(), 0);
    for (int s : subset) in[s] = 1;
    for (int i = 0; i < c.size(); ++i)
        if (in[i] != in[c.rep[i]]) return false;
    return true;
}

std::string to_string(const Congruence& c, const FiniteAlgebra* A) {
    std::string out = "{";
    auto bl = c.blocks();
    for (std::size_t b = 0; b < bl.size(); ++b) {
        if (b) out += ",";
        out += "{";
        for (std::size_t i = 0; i < bl[b].size(); ++i) {
            if (i) out += ",";
            out += A ? A->label(bl[b][i]) : std::to_string(bl[b][i]);
        }
        out += "}";
    }
    return out + "}";
}

Congruence congruence_generated(const FiniteAlgebra& A,
                                const std::vector<std::pair<int, int>>& pairs) {
    UnionFind uf(A.size);
    for (auto [a, b] : pairs) {
        if (a < 0 || b < 0 || a >= A.size || b >= A.size) throw Error("element out of range");
        uf.unite(a, b);
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t op = 0; op < A.tables.size(); ++op) {
            int arity = A.sig.operations[op].arity;
            long n = ipow(A.size, arity);
            const auto& tab = A.tables[op];
            for (long idx = 0; idx < n; ++idx) {
                long stride = 1;
                for (int pos = 0; pos < arity; ++pos) {
                    int a = static_cast<int>((idx / stride) % A.size);
                    int r = uf.find(a);
                    if (r != a && uf.unite(tab[idx], tab[idx + (r - a) * stride])) changed = true;
                    stride *= A.size;
                }
            }
        }
    }
    Congruence c;
    c.rep.resize(A.size);
    for (int i = 0; i < A.size; ++i) c.rep[i] = uf.find(i);
    return c;
}

std::vector<Congruence> all_congruences(const FiniteAlgebra& A, int bound) {
    if (A.size > bound)
        throw Error("algebra of size " + std::to_string(A.size) + " exceeds congruence bound " +
                    std::to_string(bound));
    std::vector<Congruence> out;
    int n = A.size;
    std::vector<int> rgs(n, 0), first;
    std::function<void(int, int)> go = [&](int i, int blocks) {
        if (i == n) {
            Congruence c;
            c.rep.resize(n);
            std::vector<int> rep_of(blocks, -1);
            for (int j = 0; j < n; ++j) {
                if (rep_of[rgs[j]] < 0) rep_of[rgs[j]] = j;
                c.rep[j] = rep_of[rgs[j]];
            }
            if (is_congruence(A, c)) out.push_back(std::move(c));
            return;
        }
        for (int b = 0; b <= blocks && b < n; ++b) {
            rgs[i] = b;
            go(i + 1, std::max(blocks, b + 1));
        }
    };
    go(0, 0);
    return out;
}

Quotient quotient(const FiniteAlgebra& A, const Congruence& c) {
    if (!is_congruence(A, c)) throw Error("relation is not a congruence");
    Quotient q;
    q.projection.assign(A.size, -1);
    std::vector<int> reps;
    for (int i = 0; i < A.size; ++i)
        if (c.rep[i] == i) {
            q.projection[i] = static_cast<int>(reps.size());
            reps.push_back(i);
        }
    for (int i = 0; i < A.size; ++i) q.projection[i] = q.projection[c.rep[i]];
    FiniteAlgebra& B = q.algebra;
    B.sig = A.sig;
    B.size = static_cast<int>(reps.size());
    for (int v : A.constants) B.constants.push_back(q.projection[v]);
    for (std::size_t op = 0; op < A.tables.size(); ++op) {
        int arity = A.sig.operations[op].arity;
        B.tables.push_back(make_table(B.size, arity, [&](const int* args) {
            std::vector<int> r(arity);
            for (int i = 0; i < arity; ++i) r[i] = reps[args[i]];
            return q.projection[A.apply(static_cast<int>(op), r)];
        }));
    }
    return q;
}

std::vector<int> subalgebra_generated(const FiniteAlgebra& A, const std::vector<int>& gens) {
    std::vector<char> in(A.size, 0);
    std::vector<int> elems;
    auto add = [&](int e) {
        if (e < 0 || e >= A.size) throw Error("element out of range");
        if (!in[e]) {
            in[e] = 1;
            elems.push_back(e);
        }
    };
    for (int g : gens) add(g);
    for (int c : A.constants) add(c);
    std::size_t done = 0;
    while (true) {
        std::size_t before = elems.size();
        for (std::size_t op = 0; op < A.tables.size(); ++op) {
            int arity = A.sig.operations[op].arity;
            std::vector<int> idx(arity, 0);
            std::size_t count = elems.size();
            // All argument tuples over the current set with at least one new element.
            std::function<void(int, bool)> go = [&](int pos, bool fresh) {
                if (pos == arity) {
                    if (fresh) {
                        std::vector<int> args(arity);
                        for (int i = 0; i < arity; ++i) args[i] = elems[idx[i]];
                        add(A.apply(static_cast<int>(op), args));
                    }
                    return;
                }
                for (std::size_t i = 0; i < count; ++i) {
                    idx[pos] = static_cast<int>(i);
                    go(pos + 1, fresh || i >= done);
                }
            };
            go(0, false);
        }
        done = before;
        if (elems.size() == before) break;
    }
    std::sort(elems.begin(), elems.end());
    return elems;
}

FiniteAlgebra restrict_to(const FiniteAlgebra& A, const std::vector<int>& sub) {
    std::vector<int> index(A.size, -1);
    for (std::size_t i = 0; i < sub.size(); ++i) index[sub[i]] = static_cast<int>(i);
    FiniteAlgebra B;
    B.sig = A.sig;
    B.size = static_cast<int>(sub.size());
    for (int c : A.constants) {
        if (index[c] < 0) throw Error("subset is not a subuniverse");
        B.constants.push_back(index[c]);
    }
    for (std::size_t op = 0; op < A.tables.size(); ++op) {
        int arity = A.sig.operations[op].arity;
        B.tables.push_back(make_table(B.size, arity, [&](const int* args) {
            std::vector<int> r(arity);
            for (int i = 0; i < arity; ++i) r[i] = sub[args[i]];
            int v = index[A.apply(static_cast<int>(op), r)];
            if (v < 0) throw Error("subset is not a subuniverse");
            return v;
        }));
    }
    if (!A.labels.empty())
        for (int e : sub) B.labels.push_back(A.labels[e]);
    return B;
}

FiniteAlgebra product(const Signature& sig, const std::vector<FiniteAlgebra>& algs, long bound) {
    long total = 1;
    for (const auto& A : algs) {
        if (!(A.sig == sig)) throw Error("product factors must share the signature");
        total *= A.size;
        if (total > bound) throw Error("product size exceeds bound");
    }
    int k = static_cast<int>(algs.size());
    auto decode = [&](long e) {
        std::vector<int> c(k);
        for (int i = 0; i < k; ++i) {
            c[i] = static_cast<int>(e % algs[i].size);
            e /= algs[i].size;
        }
        return c;
    };
    auto encode = [&](const std::vector<int>& c) {
        long e = 0;
        for (int i = k - 1; i >= 0; --i) e = e * algs[i].size + c[i];
        return static_cast<int>(e);
    };
    FiniteAlgebra P;
    P.sig = sig;
    P.size = static_cast<int>(total);
    for (std::size_t c = 0; c < sig.constants.size(); ++c) {
        std::vector<int> v(k);
        for (int i = 0; i < k; ++i) v[i] = algs[i].constants[c];
        P.constants.push_back(encode(v));
    }
    for (std::size_t op = 0; op < sig.operations.size(); ++op) {
        int arity = sig.operations[op].arity;
        P.tables.push_back(make_table(P.size, arity, [&](const int* args) {
            std::vector<std::vector<int>> comps;
            for (int j = 0; j < arity; ++j) comps.push_back(decode(args[j]));
            std::vector<int> out(k), a(arity);
            for (int i = 0; i < k; ++i) {
                for (int j = 0; j < arity; ++j) a[j] = comps[j][i];
                out[i] = algs[i].apply(static_cast<int>(op), a);
            }
            return encode(out);
        }));
    }
    return P;
}

FreeAlgebra free_algebra(const Signature& sig, const std::vector<FiniteAlgebra>& K, int n,
                         long bound) {
    auto vars = variable_names(n);
    std::vector<long> offsets;
    long width = 0;
    for (const auto& A : K) {
        offsets.push_back(width);
        width += assignment_count(A.size, n);
    }
    auto table_of = [&](const Formula& f) {
        std::vector<int> t;
        t.reserve(width);
        for (const auto& A : K) {
            auto part = term_table(A, f, vars);
            t.insert(t.end(), part.begin(), part.end());
        }
        return t;
    };
    auto combine = [&](int op, const std::vector<const std::vector<int>*>& args) {
        std::vector<int> t(width);
        std::vector<int> a(args.size());
        for (std::size_t k = 0; k < K.size(); ++k) {
            long end = offsets[k] + assignment_count(K[k].size, n);
            for (long i = offsets[k]; i < end; ++i) {
                for (std::size_t j = 0; j < args.size(); ++j) a[j] = (*args[j])[i];
                t[i] = K[k].apply(op, a);
            }
        }
        return t;
    };

    FreeAlgebra out;
    std::unordered_map<std::vector<int>, int, VecHash> known;
    std::vector<std::vector<int>> by_size(2);  // element ids per witness size
    auto insert_level = [&](std::vector<std::pair<Formula, std::vector<int>>> cands, int size) {
        std::sort(cands.begin(), cands.end(), [](const auto& x, const auto& y) {
            return to_string(x.first) < to_string(y.first);
        });
        if (static_cast<int>(by_size.size()) <= size) by_size.resize(size + 1);
        for (auto& [f, t] : cands) {
            if (known.count(t)) continue;
            int id = static_cast<int>(out.witnesses.size());
            if (id >= bound) throw Error("free algebra exceeds size bound");
            known.emplace(t, id);
            out.witnesses.push_back(f);
            out.functions.push_back(std::move(t));
            by_size[size].push_back(id);
        }
    };

    std::vector<std::pair<Formula, std::vector<int>>> atoms;
    for (std::size_t c = 0; c < sig.constants.size(); ++c) {
        Formula f = Formula::constant(sig, static_cast<int>(c));
        atoms.emplace_back(f, table_of(f));
    }
    for (const auto& v : vars) {
        Formula f = Formula::variable(v);
        atoms.emplace_back(f, table_of(f));
    }
    insert_level(atoms, 1);
    if (out.witnesses.empty()) throw Error("free algebra over no generators and no constants is empty");

    int max_arity = 0;
    for (const auto& op : sig.operations) max_arity = std::max(max_arity, op.arity);
    int max_witness = 1;
    for (int s = 2; s <= max_arity * max_witness + 1; ++s) {
        std::vector<std::pair<Formula, std::vector<int>>> cands;
        for (std::size_t op = 0; op < sig.operations.size(); ++op) {
            int arity = sig.operations[op].arity;
            std::vector<int> sizes(arity);
            std::vector<int> pick(arity);
            // Compositions of s-1 into `arity` positive witness sizes.
            std::function<void(int, int)> comp = [&](int pos, int left) {
                if (pos == arity) {
                    if (left != 0) return;
                    std::function<void(int)> choose = [&](int j) {
                        if (j == arity) {
                            std::vector<Formula> args;
                            std::vector<const std::vector<int>*> tabs;
                            for (int i = 0; i < arity; ++i) {
                                args.push_back(out.witnesses[pick[i]]);
                                tabs.push_back(&out.functions[pick[i]]);
                            }
                            auto t = combine(static_cast<int>(op), tabs);
                            if (!known.count(t))
                                cands.emplace_back(
                                    Formula::apply(sig, static_cast<int>(op), std::move(args)),
                                    std::move(t));
                            return;
                        }
                        if (sizes[j] >= static_cast<int>(by_size.size())) return;
                        for (int id : by_size[sizes[j]]) {
                            pick[j] = id;
                            choose(j + 1);
                        }
                    };
                    choose(0);
                    return;
                }
                for (int sz = 1; sz <= left - (arity - pos - 1); ++sz) {
                    sizes[pos] = sz;
                    comp(pos + 1, left - sz);
                }
            };
            comp(0, s - 1);
        }
        std::size_t before = out.witnesses.size();
        insert_level(std::move(cands), s);
        if (out.witnesses.size() > before) max_witness = s;
    }

    FiniteAlgebra& F = out.algebra;
    F.sig = sig;
    F.size = static_cast<int>(out.witnesses.size());
    for (std::size_t c = 0; c < sig.constants.size(); ++c)
        F.constants.push_back(known.at(out.functions[c]));
    for (std::size_t op = 0; op < sig.operations.size(); ++op) {
        int arity = sig.operations[op].arity;
        F.tables.push_back(make_table(F.size, arity, [&](const int* args) {
            std::vector<const std::vector<int>*> tabs;
            for (int i = 0; i < arity; ++i) tabs.push_back(&out.functions[args[i]]);
            return known.at(combine(static_cast<int>(op), tabs));
        }));
    }
    for (const auto& w : out.witnesses) F.labels.push_back(to_string(w));
    for (const auto& v : vars) out.generators.push_back(known.at(table_of(Formula::variable(v))));
    return out;
}

bool is_homomorphism(const FiniteAlgebra& A, const FiniteAlgebra& B, const std::vector<int>& h) {
    for (std::size_t c = 0; c < A.constants.size(); ++c)
        if (h[A.constants[c]] != B.constants[c]) return false;
    for (std::size_t op = 0; op < A.tables.size(); ++op) {
        int arity = A.sig.operations[op].arity;
        long n = ipow(A.size, arity);
        std::vector<int> args(arity), hargs(arity);
        for (long idx = 0; idx < n; ++idx) {
            long r = idx;
            for (int i = arity - 1; i >= 0; --i) {
                args[i] = static_cast<int>(r % A.size);
                r /= A.size;
                hargs[i] = h[args[i]];
            }
            if (h[A.tables[op][idx]] != B.apply(static_cast<int>(op), hargs)) return false;
        }
    }
    return true;
}

bool isomorphic_matrices(const FiniteAlgebra& A, const std::vector<int>& F,
                         const FiniteAlgebra& B, const std::vector<int>& G) {
    if (A.size != B.size || !(A.sig == B.sig) || F.size() != G.size()) return false;
    std::vector<char> inG(B.size, 0);
    for (int g : G) inG[g] = 1;
    std::vector<int> h(A.size);
    std::iota(h.begin(), h.end(), 0);
    do {
        bool ok = true;
        for (int f : F)
            if (!inG[h[f]]) ok = false;
        if (ok && is_homomorphism(A, B, h)) return true;
    } while (std::next_permutation(h.begin(), h.end()));
    return false;
}

bool isomorphic(const FiniteAlgebra& A, const FiniteAlgebra& B) {
    return isomorphic_matrices(A, {}, B, {});
}

bool has_unary_canonical_form(const Signature& sig) {
    return sig.unary_operations().size() <= 1 && sig.nary_operation() < 0;
}

std::string unary_canonical_form(const FiniteAlgebra& A, const std::vector<int>& marked) {
    auto unary = A.sig.unary_operations();
    if (!has_unary_canonical_form(A.sig))
        throw Error("canonical form needs constants and at most one unary operation");
    std::vector<std::string> label(A.size);
    for (int e = 0; e < A.size; ++e) {
        std::string l = std::binary_search(marked.begin(), marked.end(), e) ? "<*" : "<";
        for (std::size_t c = 0; c < A.constants.size(); ++c)
            if (A.constants[c] == e) l += std::to_string(c) + ".";
        label[e] = l + ">";
    }
    std::vector<std::string> comps;
    if (unary.empty()) {
        for (int e = 0; e < A.size; ++e) comps.push_back("(" + label[e] + ")");
    } else {
        const auto& f = A.tables[unary[0]];
        std::vector<char> cyclic(A.size, 0);
        for (int v = 0; v < A.size; ++v) {
            int w = v;
            for (int j = 0; j < A.size; ++j) {
                w = f[w];
                if (w == v) {
                    cyclic[v] = 1;
                    break;
                }
            }
        }
        std::vector<std::vector<int>> pre(A.size);
        for (int u = 0; u < A.size; ++u)
            if (!cyclic[u]) pre[f[u]].push_back(u);
        std::function<std::string(int)> tree = [&](int v) {
            std::vector<std::string> kids;
            for (int u : pre[v]) kids.push_back(tree(u));
            std::sort(kids.begin(), kids.end());
            std::string s = "(" + label[v];
            for (const auto& k : kids) s += k;
            return s + ")";
        };
        std::vector<char> seen(A.size, 0);
        for (int v = 0; v < A.size; ++v) {
            if (!cyclic[v] || seen[v]) continue;
            std::vector<std::string> cyc;
            int w = v;
            do {
                seen[w] = 1;
                cyc.push_back(tree(w));
                w = f[w];
            } while (w != v);
            std::string best;
            for (std::size_t r = 0; r < cyc.size(); ++r) {
                std::string s;
                for (std::size_t i = 0; i < cyc.size(); ++i) s += cyc[(r + i) % cyc.size()];
                if (r == 0 || s < best) best = s;
            }
            comps.push_back("[" + best + "]");
        }
    }
    std::sort(comps.begin(), comps.end());
    std::string out = std::to_string(A.size) + ":";
    for (const auto& c : comps) out += c;
    return out;
}

std::pair<int, int> box_periodicity(const std::vector<FiniteAlgebra>& algs, int op) {
    int m = 0;
    long period = 1;
    for (const auto& A : algs) {
        if (op < 0 || op >= static_cast<int>(A.tables.size()) || A.sig.operations[op].arity != 1)
            throw Error("box periodicity needs a unary operation");
        std::map<std::vector<int>, int> seen;
        std::vector<int> cur(A.size);
        std::iota(cur.begin(), cur.end(), 0);
        for (int t = 0;; ++t) {
            auto it = seen.find(cur);
            if (it != seen.end()) {
                m = std::max(m, it->second);
                period = std::lcm(period, static_cast<long>(t - it->second));
                break;
            }
            seen.emplace(cur, t);
            for (auto& v : cur) v = A.tables[op][v];
        }
    }
    return {m, static_cast<int>(m + period - 1)};
}

bool satisfies(const FiniteAlgebra& A, const Equation& e) {
    auto vs = variables(e.lhs);
    auto vr = variables(e.rhs);
    vs.insert(vr.begin(), vr.end());
    std::vector<std::string> vars(vs.begin(), vs.end());
    return term_table(A, e.lhs, vars) == term_table(A, e.rhs, vars);
}

int enumeration_size_bound(const Signature& sig, int k, int n) {
    return (k + static_cast<int>(sig.constants.size())) * (n + 1);
}

namespace {

// Partial unary algebra built element by element; -1 marks undefined values.
struct PartialUnary {
    int size = 0;
    std::vector<int> box;
    std::vector<int> consts;
};

int partial_eval(const PartialUnary& P, const Formula& f, const Valuation& v) {
    switch (f.kind()) {
        case NodeKind::variable: return v.at(f.name());
        case NodeKind::constant: return P.consts[f.symbol()];
        default: {
            int a = partial_eval(P, f.arg(0), v);
            return a < 0 ? -1 : P.box[a];
        }
    }
}

// False if some equation is violated by values that are already determined.
bool consistent(const PartialUnary& P, const std::vector<Equation>& eqs) {
    for (const auto& e : eqs) {
        auto vs = variables(e.lhs);
        auto vr = variables(e.rhs);
        vs.insert(vr.begin(), vr.end());
        std::vector<std::string> vars(vs.begin(), vs.end());
        long n = assignment_count(P.size, static_cast<int>(vars.size()));
        for (long i = 0; i < n; ++i) {
            auto a = decode_assignment(i, P.size, static_cast<int>(vars.size()));
            Valuation v;
            for (std::size_t j = 0; j < vars.size(); ++j) v[vars[j]] = a[j];
            int l = partial_eval(P, e.lhs, v);
            int r = partial_eval(P, e.rhs, v);
            if (l >= 0 && r >= 0 && l != r) return false;
        }
    }
    return true;
}

}  // namespace

std::vector<FiniteAlgebra> enumerate_algebras(const Signature& sig, int k,
                                              const std::vector<Equation>& eqs, int max_size) {
    if (!sig.graph_based()) throw Error("algebra enumeration needs a graph-based signature");
    int box = sig.unary_operation();
    int nconst = static_cast<int>(sig.constants.size());
    int atoms = nconst + k;
    std::map<std::string, FiniteAlgebra> found;

    PartialUnary P;
    P.consts.assign(nconst, -1);
    auto emit = [&]() {
        FiniteAlgebra A;
        A.sig = sig;
        A.size = P.size;
        A.constants = P.consts;
        if (box >= 0) A.tables.push_back(std::vector<int>(P.box.begin(), P.box.begin() + P.size));
        for (const auto& e : eqs)
            if (!satisfies(A, e)) return;
        found.emplace(unary_canonical_form(A), std::move(A));
    };

    std::function<void(int)> next_atom;
    // Extend the orbit of element e, which was just created.
    std::function<void(int, int)> extend = [&](int e, int atom) {
        for (int t = 0; t <= P.size; ++t) {
            if (t == P.size) {
                if (P.size >= max_size) break;
                P.box.push_back(-1);
                ++P.size;
                P.box[e] = t;
                if (consistent(P, eqs)) extend(t, atom);
                --P.size;
                P.box.pop_back();
                P.box[e] = -1;
                break;
            }
            P.box[e] = t;
            if (consistent(P, eqs)) next_atom(atom + 1);
            P.box[e] = -1;
        }
    };
    next_atom = [&](int atom) {
        if (atom == atoms) {
            if (P.size > 0) emit();
            return;
        }
        auto assign = [&](int value) {
            if (atom < nconst) P.consts[atom] = value;
        };
        for (int v = 0; v < P.size; ++v) {
            assign(v);
            if (consistent(P, eqs)) next_atom(atom + 1);
        }
        if (P.size < max_size) {
            int e = P.size;
            P.box.push_back(-1);
            ++P.size;
            assign(e);
            if (consistent(P, eqs)) {
                if (box >= 0) extend(e, atom);
                else next_atom(atom + 1);
            }
            --P.size;
            P.box.pop_back();
        }
        if (atom < nconst) P.consts[atom] = -1;
    };
    next_atom(0);

    std::vector<std::pair<std::string, FiniteAlgebra>> items(found.begin(), found.end());
    std::stable_sort(items.begin(), items.end(),
                     [](const auto& a, const auto& b) { return a.second.size < b.second.size; });
    std::vector<FiniteAlgebra> out;
    for (auto& [code, A] : items) out.push_back(std::move(A));
    return out;
}

}  // namespace algsem
