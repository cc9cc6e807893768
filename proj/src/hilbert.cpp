#include "algsem/hilbert.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <unordered_map>

namespace algsem {

namespace {

bool match(const Formula& pattern, const Formula& term, Substitution& s) {
    if (pattern.is_variable()) {
        auto it = s.find(pattern.name());
        if (it != s.end()) return it->second == term;
        s.emplace(pattern.name(), term);
        return true;
    }
    if (pattern.kind() != term.kind() || pattern.name() != term.name() ||
        pattern.args().size() != term.args().size())
        return false;
    for (std::size_t i = 0; i < pattern.args().size(); ++i)
        if (!match(pattern.arg(i), term.arg(i), s)) return false;
    return true;
}

}  // namespace

bool match_pattern(const Formula& pattern, const Formula& term, Substitution& s) {
    return match(pattern, term, s);
}

namespace {

bool bound_by(const Formula& f, const Substitution& s) {
    for (const auto& v : variables(f))
        if (!s.count(v)) return false;
    return true;
}

struct Fact {
    Formula formula;
    int rule = -1;
    Substitution substitution;
    std::vector<int> premises;
};

class Saturator {
public:
    Saturator(const HilbertCalculus& H, const Budget& b, std::vector<Formula> extra)
        : H_(H), b_(b), extra_(std::move(extra)) {
        std::sort(extra_.begin(), extra_.end(), FormulaLess{});
        extra_.erase(std::unique(extra_.begin(), extra_.end()), extra_.end());
    }

    bool add(const Formula& f, int rule, Substitution s, std::vector<int> prem) {
        if (index_.count(f)) return false;
        if (f.height() > b_.max_depth || static_cast<int>(variables(f).size()) > b_.max_vars)
            return false;
        index_.emplace(f, static_cast<int>(facts_.size()));
        by_head_[head(f)].push_back(static_cast<int>(facts_.size()));
        facts_.push_back({f, rule, std::move(s), std::move(prem)});
        return true;
    }

    // Runs until the goal appears or the budget ends.
    int run(const std::optional<Formula>& goal) {
        int rounds = 0;
        std::size_t round_start = 0;
        if (goal && index_.count(*goal)) return rounds;
        while (rounds < b_.max_iterations) {
            ++rounds;
            std::size_t round_end = facts_.size();
            std::vector<Fact> fresh;
            for (std::size_t r = 0; r < H_.rules.size(); ++r) fire(static_cast<int>(r), round_start,
                                                                   round_end, rounds == 1, fresh);
            std::stable_sort(fresh.begin(), fresh.end(), [](const Fact& a, const Fact& c) {
                return formula_less(a.formula, c.formula);
            });
            bool grew = false;
            for (auto& f : fresh) {
                if (static_cast<long>(facts_.size()) >= b_.max_derived) {
                    exhausted_ = true;
                    break;
                }
                if (add(f.formula, f.rule, std::move(f.substitution), std::move(f.premises))) grew = true;
                if (goal && index_.count(*goal)) return rounds;
            }
            round_start = round_end;
            if (!grew || exhausted_) break;
        }
        return rounds;
    }

    int find(const Formula& f) const {
        auto it = index_.find(f);
        return it == index_.end() ? -1 : it->second;
    }
    const std::vector<Fact>& facts() const { return facts_; }

private:
    static std::string head(const Formula& f) {
        return (f.is_variable() ? "v:" : f.is_constant() ? "c:" : "o:") + f.name();
    }

    void fire(int r, std::size_t round_start, std::size_t round_end, bool first,
              std::vector<Fact>& out) {
        const Rule& rule = H_.rules[r];
        std::size_t np = rule.premises.size();
        if (np == 0 && !first) return;
        std::vector<int> used(np, -1);
        std::vector<char> done(np, 0);
        Substitution s;
        std::function<void(std::size_t)> join = [&](std::size_t matched) {
            if (matched == np) {
                bool any_new = np == 0;
                for (int u : used) any_new = any_new || u >= static_cast<int>(round_start);
                if (any_new) conclude(r, s, used, out);
                return;
            }
            // Fully bound premises first, then those with a fixed head.
            std::size_t pick = np;
            int best = 3;
            for (std::size_t j = 0; j < np; ++j) {
                if (done[j]) continue;
                int score = bound_by(rule.premises[j], s) ? 0 : rule.premises[j].is_variable() ? 2 : 1;
                if (score < best) {
                    best = score;
                    pick = j;
                }
            }
            const Formula& p = rule.premises[pick];
            done[pick] = 1;
            auto try_fact = [&](int id) {
                if (id < 0 || id >= static_cast<int>(round_end)) return;
                Substitution saved = s;
                if (match(p, facts_[id].formula, s)) {
                    used[pick] = id;
                    join(matched + 1);
                }
                s = std::move(saved);
            };
            if (best == 0) {
                try_fact(find(substitute(p, s)));
            } else if (best == 1) {
                auto it = by_head_.find(head(p));
                if (it != by_head_.end()) {
                    auto ids = it->second;
                    for (int id : ids) try_fact(id);
                }
            } else {
                for (std::size_t id = 0; id < round_end; ++id) try_fact(static_cast<int>(id));
            }
            done[pick] = 0;
            used[pick] = -1;
        };
        join(0);
    }

    void conclude(int r, const Substitution& s, const std::vector<int>& used,
                  std::vector<Fact>& out) {
        const Rule& rule = H_.rules[r];
        std::vector<std::string> free;
        for (const auto& v : variables(rule.conclusion))
            if (!s.count(v)) free.push_back(v);
        Substitution full = s;
        std::function<void(std::size_t)> go = [&](std::size_t i) {
            if (i == free.size()) {
                Formula c = substitute(rule.conclusion, full);
                if (index_.count(c) || c.height() > b_.max_depth) return;
                out.push_back({c, r, full, used});
                return;
            }
            std::vector<Formula> cands{Formula::variable(free[i])};
            cands.insert(cands.end(), extra_.begin(), extra_.end());
            for (const auto& t : cands) {
                full[free[i]] = t;
                go(i + 1);
            }
            full.erase(free[i]);
        };
        go(0);
    }

public:
    bool exhausted_ = false;

private:
    const HilbertCalculus& H_;
    Budget b_;
    std::vector<Formula> extra_;
    std::vector<Fact> facts_;
    std::unordered_map<Formula, int, FormulaHash> index_;
    std::unordered_map<std::string, std::vector<int>> by_head_;
};

std::vector<Formula> all_subformulas(const std::vector<Formula>& fs) {
    std::vector<Formula> out;
    for (const auto& f : fs)
        for (auto& g : subformulas(f)) out.push_back(std::move(g));
    return out;
}

Proof extract(const Saturator& sat, int goal) {
    std::set<int> need;
    std::vector<int> stack{goal};
    while (!stack.empty()) {
        int id = stack.back();
        stack.pop_back();
        if (!need.insert(id).second) continue;
        for (int p : sat.facts()[id].premises) stack.push_back(p);
    }
    std::unordered_map<int, int> line_of;
    Proof proof;
    for (int id : need) {
        const auto& f = sat.facts()[id];
        ProofLine line{f.formula, f.rule, f.substitution, {}};
        for (int p : f.premises) line.premises.push_back(line_of.at(p));
        line_of[id] = static_cast<int>(proof.lines.size());
        proof.lines.push_back(std::move(line));
    }
    return proof;
}

}  // namespace

std::string to_string(const Proof& p, const HilbertCalculus& H) {
    std::string out;
    for (std::size_t i = 0; i < p.lines.size(); ++i) {
        const auto& l = p.lines[i];
        out += std::to_string(i) + ". " + to_string(l.formula) + "    ";
        if (l.rule < 0) {
            out += "hypothesis\n";
            continue;
        }
        out += "rule " + (static_cast<std::size_t>(l.rule) < H.names.size() ? H.names[l.rule]
                                                                             : std::to_string(l.rule));
        out += " [" + to_string(H.rules[l.rule]) + "]";
        if (!l.premises.empty()) {
            out += " from";
            for (int q : l.premises) out += " " + std::to_string(q);
        }
        out += "\n";
    }
    return out;
}

bool check_proof(const HilbertCalculus& H, const std::vector<Formula>& hypotheses,
                 const Proof& p, const Formula& goal, std::string* message) {
    auto fail = [&](std::size_t i, const std::string& why) {
        if (message) *message = "line " + std::to_string(i) + ": " + why;
        return false;
    };
    for (std::size_t i = 0; i < p.lines.size(); ++i) {
        const auto& l = p.lines[i];
        if (l.rule < 0) {
            if (std::find(hypotheses.begin(), hypotheses.end(), l.formula) == hypotheses.end())
                return fail(i, "not a hypothesis");
            continue;
        }
        if (l.rule >= static_cast<int>(H.rules.size())) return fail(i, "unknown rule");
        const Rule& r = H.rules[l.rule];
        if (l.premises.size() != r.premises.size()) return fail(i, "wrong number of premises");
        if (!(substitute(r.conclusion, l.substitution) == l.formula))
            return fail(i, "conclusion is not the rule instance");
        for (std::size_t j = 0; j < r.premises.size(); ++j) {
            int q = l.premises[j];
            if (q < 0 || q >= static_cast<int>(i)) return fail(i, "premise line out of order");
            if (!(substitute(r.premises[j], l.substitution) == p.lines[q].formula))
                return fail(i, "premise " + std::to_string(j) + " does not match line " +
                                   std::to_string(q));
        }
    }
    if (p.lines.empty() || !(p.lines.back().formula == goal)) {
        if (message) *message = "last line is not the goal";
        return false;
    }
    return true;
}

DeriveResult derives_bounded(const HilbertCalculus& H, const std::vector<Formula>& premises,
                             const Formula& goal, const Budget& b) {
    std::vector<Formula> seeds = premises;
    seeds.push_back(goal);
    Saturator sat(H, b, all_subformulas(seeds));
    for (const auto& p : premises) sat.add(p, -1, {}, {});
    DeriveResult res;
    res.rounds = sat.run(goal);
    res.derived_count = static_cast<long>(sat.facts().size());
    int id = sat.find(goal);
    if (id >= 0) {
        res.derived = true;
        res.proof = extract(sat, id);
    }
    return res;
}

std::vector<Formula> saturate(const HilbertCalculus& H, const std::vector<Formula>& premises,
                              const std::vector<Formula>& extra_terms, const Budget& b) {
    std::vector<Formula> seeds = premises;
    seeds.insert(seeds.end(), extra_terms.begin(), extra_terms.end());
    Saturator sat(H, b, all_subformulas(seeds));
    for (const auto& p : premises) sat.add(p, -1, {}, {});
    sat.run(std::nullopt);
    std::vector<Formula> out;
    for (const auto& f : sat.facts()) out.push_back(f.formula);
    return out;
}

std::optional<std::pair<int, int>> find_box_periodicity_hilbert(const HilbertCalculus& H,
                                                                const Budget& b, int max_sum) {
    int op = H.sig.unary_operation();
    if (!H.sig.graph_based() || op < 0)
        throw Error("periodicity search needs a graph-based signature with a unary operation");
    Formula x = Formula::variable("x");
    for (int sum = 0; sum <= max_sum; ++sum)
        for (int m = 0; 2 * m <= sum; ++m) {
            int n = sum - m;
            Formula lo = iterate_op(H.sig, op, m, x), hi = iterate_op(H.sig, op, n + 1, x);
            if (derives_bounded(H, {lo}, hi, b).derived && derives_bounded(H, {hi}, lo, b).derived)
                return std::pair{m, n};
        }
    return std::nullopt;
}

bool validates_rules(const Matrix& m, const HilbertCalculus& H) {
    MatrixFamily one{m};
    for (const auto& r : H.rules)
        if (!consequence(one, r.premises, r.conclusion)) return false;
    return true;
}

LocallyTabularResult decide_locally_tabular(const HilbertCalculus& H, const Budget& b,
                                            const DecideOptions& opts) {
    LocallyTabularResult res;
    const Signature& sig = H.sig;
    if (!sig.graph_based()) {
        res.decision.answer = Answer::yes;
        res.decision.branch = "non-graph-based";
        res.decision.trace.push_back({"signature is not graph-based", true,
                                      "every such logic has an algebraic semantics"});
        return res;
    }
    int op = sig.unary_operation();
    std::vector<Equation> eqs;
    if (op < 0) {
        // x and y plus one spare generator separate every rule in this language.
        res.generators = 3;
    } else {
        auto mn = find_box_periodicity_hilbert(H, b);
        if (!mn) {
            res.budget_exceeded = true;
            res.decision.answer = Answer::inconclusive;
            res.decision.branch = "graph-based-unary";
            res.decision.trace.push_back({"periodicity box^m x -||- box^(n+1) x", false,
                                          "not found within the budget"});
            return res;
        }
        res.periodicity = mn;
        auto [m, n] = *mn;
        res.generators = (1 << (n + 1)) + 1;
        Formula x = Formula::variable("x");
        eqs.push_back({iterate_op(sig, op, m, x), iterate_op(sig, op, n + 1, x)});
    }
    int bound = op < 0 ? res.generators + static_cast<int>(sig.constants.size())
                       : enumeration_size_bound(sig, res.generators, res.periodicity->second);
    auto algs = enumerate_algebras(sig, res.generators, eqs, bound);
    std::set<std::string> kept;
    for (const auto& A : algs) {
        if (A.size > 16) throw Error("candidate algebra too large for subset enumeration");
        for (std::uint32_t mask = 0; mask < (1u << A.size); ++mask) {
            Matrix m{A, {}};
            for (int e = 0; e < A.size; ++e)
                if (mask >> e & 1) m.designated.push_back(e);
            if (!validates_rules(m, H)) continue;
            if (kept.insert(unary_canonical_form(m.algebra, m.designated)).second)
                res.family.push_back(std::move(m));
        }
    }
    res.decision = decide_matrices(res.family, opts);
    return res;
}

}  // namespace algsem
