#include "algsem/turing.hpp"

#include <algorithm>

namespace algsem {

std::string symbol_name(Symbol s) {
    switch (s) {
        case Symbol::zero: return "0";
        case Symbol::one: return "1";
        case Symbol::blank: return "empty";
    }
    return "?";
}

Symbol parse_symbol(const std::string& s) {
    if (s == "0") return Symbol::zero;
    if (s == "1") return Symbol::one;
    if (s == "empty" || s.empty()) return Symbol::blank;
    throw Error("unknown tape symbol '" + s + "'");
}

bool TuringMachine::is_final(const std::string& q) const {
    return std::find(final_states.begin(), final_states.end(), q) != final_states.end();
}

bool TuringMachine::is_nonfinal(const std::string& q) const {
    return std::find(nonfinal_states.begin(), nonfinal_states.end(), q) != nonfinal_states.end();
}

void TuringMachine::validate() const {
    for (const auto& q : final_states)
        if (is_nonfinal(q)) throw Error("state '" + q + "' is both final and nonfinal");
    for (const auto* set : {&final_states, &nonfinal_states})
        for (const auto& q : *set)
            if (!is_identifier(q)) throw Error("state name '" + q + "' is not an identifier");
    if (!is_nonfinal(initial)) throw Error("initial state must be nonfinal");
    encode_language(*this);  // name collisions
    for (const auto& q : nonfinal_states)
        for (Symbol a : {Symbol::zero, Symbol::one, Symbol::blank}) {
            auto it = delta.find({q, a});
            if (it == delta.end())
                throw Error("delta undefined at (" + q + ", " + symbol_name(a) + ")");
            const Transition& t = it->second;
            if (!is_final(t.next) && !is_nonfinal(t.next))
                throw Error("delta moves to unknown state '" + t.next + "'");
            if (t.write == Symbol::blank) throw Error("delta may only write 0 or 1");
        }
    for (const auto& [key, t] : delta)
        if (!is_nonfinal(key.first))
            throw Error("delta defined on non-nonfinal state '" + key.first + "'");
}

namespace {

bool segment_ok(const std::vector<Symbol>& s) {
    if (s.empty()) return false;
    if (s.size() == 1) return true;
    return std::none_of(s.begin(), s.end(), [](Symbol x) { return x == Symbol::blank; });
}

bool is_empty_segment(const std::vector<Symbol>& s) {
    return s.size() == 1 && s[0] == Symbol::blank;
}

std::string segment_string(const std::vector<Symbol>& s) {
    std::string out = "<";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ",";
        out += symbol_name(s[i]);
    }
    return out + ">";
}

}  // namespace

bool Configuration::valid() const {
    if (!segment_ok(left) || !segment_ok(right)) return false;
    if (!is_empty_segment(left) && !is_empty_segment(right) && head == Symbol::blank) return false;
    return true;
}

std::string to_string(const Configuration& c) {
    return "<" + c.state + ", " + segment_string(c.left) + ", " + symbol_name(c.head) + ", " +
           segment_string(c.right) + ">";
}

Signature encode_language(const TuringMachine& M) {
    Signature sig;
    for (const auto& q : M.nonfinal_states) sig.constants.push_back(q);
    for (const auto& p : M.final_states) sig.constants.push_back(p);
    for (const char* s : {"0", "1", "empty"}) sig.constants.push_back(s);
    sig.operations = {{"dot", 2}, {"lambda", 3}, {"arrow", 2}};
    sig.validate(true);
    return sig;
}

std::vector<Symbol> parse_tape(const std::string& text) {
    std::vector<Symbol> out;
    for (char ch : text) {
        if (ch == '0') out.push_back(Symbol::zero);
        else if (ch == '1') out.push_back(Symbol::one);
        else throw Error("input must be a string over {0,1}");
    }
    if (out.size() < 2) throw Error("input must have length at least 2");
    return out;
}

Configuration initial_configuration(const TuringMachine& M, const std::vector<Symbol>& input) {
    if (input.size() < 2) throw Error("input must have length at least 2");
    for (Symbol s : input)
        if (s == Symbol::blank) throw Error("input must be over {0,1}");
    return {M.initial, {Symbol::blank}, input[0], {input.begin() + 1, input.end()}};
}

namespace {

struct Enc {
    const Signature& sig;
    Formula c(const std::string& name) const {
        return Formula::constant(sig, sig.constant_index(name));
    }
    Formula sym(Symbol s) const { return c(symbol_name(s)); }
    Formula dot(Formula a, Formula b) const {
        return Formula::apply(sig, 0, {std::move(a), std::move(b)});
    }
    Formula lam(Formula a, Formula b, Formula d) const {
        return Formula::apply(sig, 1, {std::move(a), std::move(b), std::move(d)});
    }
    Formula arrow(Formula a, Formula b) const {
        return Formula::apply(sig, 2, {std::move(a), std::move(b)});
    }
    Formula conf(const std::string& q, Formula l, Formula h, Formula r) const {
        return dot(c(q), lam(std::move(l), std::move(h), std::move(r)));
    }
};

Formula var(const std::string& n) { return Formula::variable(n); }

}  // namespace

Formula config_formula(const Signature& sig, const Configuration& c) {
    if (!c.valid()) throw Error("invalid configuration " + to_string(c));
    Enc e{sig};
    Formula left = e.sym(c.left[0]);
    for (std::size_t i = 1; i < c.left.size(); ++i) left = e.dot(left, e.sym(c.left[i]));
    Formula right = e.sym(c.right.back());
    for (std::size_t i = c.right.size() - 1; i-- > 0;) right = e.dot(e.sym(c.right[i]), right);
    return e.conf(c.state, left, e.sym(c.head), right);
}

namespace {

std::optional<Symbol> as_symbol(const Formula& f) {
    if (!f.is_constant()) return std::nullopt;
    if (f.name() == "0") return Symbol::zero;
    if (f.name() == "1") return Symbol::one;
    if (f.name() == "empty") return Symbol::blank;
    return std::nullopt;
}

}  // namespace

std::optional<Configuration> config_from_formula(const TuringMachine& M, const Formula& f) {
    if (!f.is_operation() || f.name() != "dot" || !f.arg(0).is_constant()) return std::nullopt;
    const std::string& q = f.arg(0).name();
    if (!M.is_final(q) && !M.is_nonfinal(q)) return std::nullopt;
    const Formula& l = f.arg(1);
    if (!l.is_operation() || l.name() != "lambda") return std::nullopt;
    Configuration c;
    c.state = q;
    // left-associated
    Formula cur = l.arg(0);
    while (cur.is_operation() && cur.name() == "dot") {
        auto s = as_symbol(cur.arg(1));
        if (!s) return std::nullopt;
        c.left.push_back(*s);
        cur = cur.arg(0);
    }
    auto first = as_symbol(cur);
    if (!first) return std::nullopt;
    c.left.push_back(*first);
    std::reverse(c.left.begin(), c.left.end());
    auto h = as_symbol(l.arg(1));
    if (!h) return std::nullopt;
    c.head = *h;
    cur = l.arg(2);
    while (cur.is_operation() && cur.name() == "dot") {
        auto s = as_symbol(cur.arg(0));
        if (!s) return std::nullopt;
        c.right.push_back(*s);
        cur = cur.arg(1);
    }
    auto last = as_symbol(cur);
    if (!last) return std::nullopt;
    c.right.push_back(*last);
    if (!c.valid()) return std::nullopt;
    return c;
}

HilbertCalculus encode_calculus(const TuringMachine& M, const std::vector<Symbol>& input) {
    M.validate();
    HilbertCalculus H;
    H.sig = encode_language(M);
    Enc e{H.sig};
    Formula x = var("x"), y = var("y"), z = var("z");
    auto add = [&](std::string name, std::vector<Formula> prem, Formula concl) {
        H.rules.push_back({std::move(prem), std::move(concl)});
        H.names.push_back(std::move(name));
    };
    for (Move dir : {Move::left, Move::right})
        for (const auto& [key, t] : M.delta) {
            if (t.move != dir) continue;
            const auto& [q, a] = key;
            std::string label = "[" + q + "," + symbol_name(a) + "]";
            if (dir == Move::left)
                add("R1" + label, {e.conf(q, e.dot(x, y), e.sym(a), z)},
                    e.conf(t.next, x, y, e.dot(e.sym(t.write), z)));
            else
                add("R2" + label, {e.conf(q, x, e.sym(a), e.dot(y, z))},
                    e.conf(t.next, e.dot(x, e.sym(t.write)), y, z));
        }
    std::vector<std::string> states = M.nonfinal_states;
    states.insert(states.end(), M.final_states.begin(), M.final_states.end());
    Formula blank = e.sym(Symbol::blank);
    for (const auto& p : states) {
        Formula plain = e.conf(p, x, y, z);
        Formula padded = e.conf(p, e.dot(blank, x), y, z);
        add("R3-fwd[" + p + "]", {plain}, padded);
        add("R3-back[" + p + "]", {padded}, plain);
    }
    for (const auto& p : states) {
        Formula plain = e.conf(p, x, y, z);
        Formula padded = e.conf(p, x, y, e.dot(z, blank));
        add("R4-fwd[" + p + "]", {plain}, padded);
        add("R4-back[" + p + "]", {padded}, plain);
    }
    add("R5", {}, config_formula(H.sig, initial_configuration(M, input)));
    for (const auto& p : M.final_states) add("R6[" + p + "]", {e.dot(e.c(p), y)}, e.arrow(x, e.dot(x, x)));
    add("R7", {}, e.arrow(x, x));
    add("R8", {x, e.arrow(x, y)}, y);
    for (int op = 0; op < 3; ++op) {
        int n = H.sig.arity(op);
        std::vector<Formula> prem, xs, ys;
        for (int i = 1; i <= n; ++i) {
            Formula xi = var("x" + std::to_string(i)), yi = var("y" + std::to_string(i));
            prem.push_back(e.arrow(xi, yi));
            xs.push_back(xi);
            ys.push_back(yi);
        }
        add("R9[" + H.sig.operations[op].name + "]", prem,
            e.arrow(Formula::apply(H.sig, op, xs), Formula::apply(H.sig, op, ys)));
    }
    return H;
}

std::optional<Configuration> step(const TuringMachine& M, const Configuration& c) {
    if (!M.is_nonfinal(c.state)) return std::nullopt;
    auto it = M.delta.find({c.state, c.head});
    if (it == M.delta.end()) throw Error("delta undefined at " + to_string(c));
    const Transition& t = it->second;
    Configuration d;
    d.state = t.next;
    bool left_empty = is_empty_segment(c.left), right_empty = is_empty_segment(c.right);
    if (t.move == Move::left) {
        // Moving off a one-symbol left segment leaves the blank behind.
        d.head = c.left.back();
        d.left.assign(c.left.begin(), c.left.end() - 1);
        if (d.left.empty()) d.left = {Symbol::blank};
        d.right = {t.write};
        if (!right_empty) d.right.insert(d.right.end(), c.right.begin(), c.right.end());
    } else {
        d.head = c.right.front();
        d.right.assign(c.right.begin() + 1, c.right.end());
        if (d.right.empty()) d.right = {Symbol::blank};
        d.left = left_empty ? std::vector<Symbol>{} : c.left;
        d.left.push_back(t.write);
    }
    if (!d.valid()) throw Error("step produced invalid configuration " + to_string(d));
    return d;
}

namespace {

int rule_index(const HilbertCalculus& H, const std::string& name) {
    auto it = std::find(H.names.begin(), H.names.end(), name);
    if (it == H.names.end()) throw Error("no rule named " + name);
    return static_cast<int>(it - H.names.begin());
}

// Applies a one-premise rule to the last line.
void apply_last(const HilbertCalculus& H, Proof& p, int rule) {
    const Rule& r = H.rules[rule];
    int last = static_cast<int>(p.lines.size()) - 1;
    Substitution s;
    if (!match_pattern(r.premises.at(0), p.lines[last].formula, s))
        throw Error("replay: rule " + H.names[rule] + " does not match line " + std::to_string(last));
    for (const auto& v : variables(r.conclusion))
        if (!s.count(v)) s.emplace(v, Formula::variable(v));
    p.lines.push_back({substitute(r.conclusion, s), rule, s, {last}});
}

}  // namespace

std::optional<HaltingDemo> demo_halting_derivation(const TuringMachine& M,
                                                   const std::vector<Symbol>& input,
                                                   int max_steps) {
    HilbertCalculus H = encode_calculus(M, input);
    HaltingDemo demo;
    demo.run.push_back(initial_configuration(M, input));
    for (int i = 0; i < max_steps && !M.is_final(demo.run.back().state); ++i)
        demo.run.push_back(*step(M, demo.run.back()));
    if (!M.is_final(demo.run.back().state)) return std::nullopt;

    Proof& p = demo.proof;
    p.lines.push_back({config_formula(H.sig, demo.run[0]), rule_index(H, "R5"), {}, {}});
    for (std::size_t i = 0; i + 1 < demo.run.size(); ++i) {
        const Configuration& c = demo.run[i];
        const Transition& t = M.delta.at({c.state, c.head});
        std::string key = "[" + c.state + "," + symbol_name(c.head) + "]";
        bool left_single = c.left.size() == 1, right_empty = is_empty_segment(c.right);
        bool left_empty = is_empty_segment(c.left), right_single = c.right.size() == 1;
        if (t.move == Move::left) {
            if (left_single) apply_last(H, p, rule_index(H, "R3-fwd[" + c.state + "]"));
            apply_last(H, p, rule_index(H, "R1" + key));
            if (right_empty) apply_last(H, p, rule_index(H, "R4-back[" + t.next + "]"));
        } else {
            if (right_single) apply_last(H, p, rule_index(H, "R4-fwd[" + c.state + "]"));
            apply_last(H, p, rule_index(H, "R2" + key));
            if (left_empty) apply_last(H, p, rule_index(H, "R3-back[" + t.next + "]"));
        }
        if (p.lines.back().formula != config_formula(H.sig, demo.run[i + 1]))
            throw Error("replay diverged from the run at step " + std::to_string(i));
    }
    apply_last(H, p, rule_index(H, "R6[" + demo.run.back().state + "]"));
    demo.goal = p.lines.back().formula;
    std::string msg;
    if (!check_proof(H, {}, p, demo.goal, &msg)) throw Error("replayed proof rejected: " + msg);
    return demo;
}

std::vector<Formula> nontrivial_implications(const TuringMachine& M,
                                             const std::vector<Symbol>& input, const Budget& b) {
    HilbertCalculus H = encode_calculus(M, input);
    std::vector<Formula> out;
    for (const auto& f : saturate(H, {}, {}, b))
        if (f.is_operation() && f.name() == "arrow" && f.arg(0) != f.arg(1)) out.push_back(f);
    return out;
}

}  // namespace algsem
