#include "algsem/formula.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <unordered_map>

namespace algsem {

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
    return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

}  // namespace

Formula Formula::variable(const std::string& name) {
    std::size_t h = mix(std::hash<std::string>{}(name), 1);
    return Formula(std::make_shared<const FormulaNode>(
        FormulaNode{NodeKind::variable, -1, name, {}, h, 1, 0}));
}

Formula Formula::constant(int index, const std::string& name) {
    std::size_t h = mix(std::hash<std::string>{}(name), 2);
    return Formula(std::make_shared<const FormulaNode>(
        FormulaNode{NodeKind::constant, index, name, {}, h, 1, 0}));
}

Formula Formula::constant(const Signature& sig, int index) {
    return constant(index, sig.constants.at(index));
}

Formula Formula::apply(int op, const std::string& name, std::vector<Formula> args) {
    std::size_t h = mix(std::hash<std::string>{}(name), 3);
    int size = 1, height = 0;
    for (const auto& a : args) {
        h = mix(h, a.hash());
        size += a.size();
        height = std::max(height, a.height() + 1);
    }
    return Formula(std::make_shared<const FormulaNode>(
        FormulaNode{NodeKind::operation, op, name, std::move(args), h, size, height}));
}

Formula Formula::apply(const Signature& sig, int op, std::vector<Formula> args) {
    const auto& o = sig.operations.at(op);
    if (static_cast<int>(args.size()) != o.arity)
        throw Error("arity mismatch for '" + o.name + "'");
    return apply(op, o.name, std::move(args));
}

bool operator==(const Formula& a, const Formula& b) {
    if (a.p_ == b.p_) return true;
    if (!a.p_ || !b.p_) return false;
    if (a.hash() != b.hash() || a.size() != b.size() || a.kind() != b.kind() ||
        a.name() != b.name())
        return false;
    const auto& x = a.args();
    const auto& y = b.args();
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] != y[i]) return false;
    return true;
}

bool formula_less(const Formula& a, const Formula& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    if (a == b) return false;
    return to_string(a) < to_string(b);
}

namespace {

void print_to(const Formula& f, std::string& out) {
    out += f.name();
    if (f.is_operation()) {
        out += '(';
        for (std::size_t i = 0; i < f.args().size(); ++i) {
            if (i) out += ',';
            print_to(f.arg(i), out);
        }
        out += ')';
    }
}

class Parser {
public:
    Parser(std::string_view text, const Signature& sig) : text_(text), sig_(sig) {}

    Formula parse_all() {
        Formula f = term();
        skip();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return f;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw Error("syntax error at position " + std::to_string(pos_) + ": " + msg);
    }

    void skip() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    std::string ident() {
        skip();
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        if (start == pos_) fail("expected a symbol");
        return std::string(text_.substr(start, pos_ - start));
    }

    Formula term() {
        std::size_t start = (skip(), pos_);
        std::string name = ident();
        skip();
        bool call = pos_ < text_.size() && text_[pos_] == '(';
        int op = sig_.operation_index(name);
        if (call) {
            if (op < 0) {
                pos_ = start;
                fail("unknown operation '" + name + "'");
            }
            ++pos_;
            std::vector<Formula> args;
            args.push_back(term());
            skip();
            while (pos_ < text_.size() && text_[pos_] == ',') {
                ++pos_;
                args.push_back(term());
                skip();
            }
            if (pos_ >= text_.size() || text_[pos_] != ')') fail("expected ')'");
            ++pos_;
            if (static_cast<int>(args.size()) != sig_.arity(op)) {
                pos_ = start;
                fail("arity mismatch: '" + name + "' expects " + std::to_string(sig_.arity(op)) +
                     " arguments, got " + std::to_string(args.size()));
            }
            return Formula::apply(op, name, std::move(args));
        }
        if (op >= 0) {
            pos_ = start;
            fail("arity mismatch: '" + name + "' used without arguments");
        }
        int c = sig_.constant_index(name);
        if (c >= 0) return Formula::constant(c, name);
        if (!is_identifier(name)) {
            pos_ = start;
            fail("unknown symbol '" + name + "'");
        }
        return Formula::variable(name);
    }

    std::string_view text_;
    const Signature& sig_;
    std::size_t pos_ = 0;
};

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == sep) {
            std::string_view piece = text.substr(start, i - start);
            std::size_t a = 0, b = piece.size();
            while (a < b && std::isspace(static_cast<unsigned char>(piece[a]))) ++a;
            while (b > a && std::isspace(static_cast<unsigned char>(piece[b - 1]))) --b;
            if (b > a) out.push_back(piece.substr(a, b - a));
            start = i + 1;
        }
    }
    return out;
}

}  // namespace

std::string to_string(const Formula& f) {
    std::string out;
    print_to(f, out);
    return out;
}

Formula parse_formula(std::string_view text, const Signature& sig) {
    return Parser(text, sig).parse_all();
}

Formula substitute(const Formula& f, const Substitution& s) {
    if (s.empty()) return f;
    std::unordered_map<const FormulaNode*, Formula> memo;
    std::function<Formula(const Formula&)> go = [&](const Formula& g) -> Formula {
        if (g.is_constant()) return g;
        if (g.is_variable()) {
            auto it = s.find(g.name());
            return it == s.end() ? g : it->second;
        }
        auto m = memo.find(g.node());
        if (m != memo.end()) return m->second;
        std::vector<Formula> args;
        args.reserve(g.args().size());
        bool same = true;
        for (const auto& a : g.args()) {
            args.push_back(go(a));
            if (args.back().node() != a.node()) same = false;
        }
        Formula r = same ? g : Formula::apply(g.symbol(), g.name(), std::move(args));
        memo.emplace(g.node(), r);
        return r;
    };
    return go(f);
}

Formula substitute(const Formula& f, const std::string& var, const Formula& value) {
    return substitute(f, Substitution{{var, value}});
}

Substitution compose(const Substitution& s1, const Substitution& s2) {
    Substitution out;
    for (const auto& [v, g] : s2) out[v] = substitute(g, s1);
    for (const auto& [v, g] : s1)
        if (!out.count(v)) out[v] = g;
    return out;
}

std::set<std::string> variables(const Formula& f) {
    std::set<std::string> out;
    std::unordered_map<const FormulaNode*, bool> seen;
    std::function<void(const Formula&)> go = [&](const Formula& g) {
        if (g.is_variable()) {
            out.insert(g.name());
            return;
        }
        if (g.is_constant() || !seen.emplace(g.node(), true).second) return;
        for (const auto& a : g.args()) go(a);
    };
    go(f);
    return out;
}

int occurrences(const Formula& f, const std::string& var) {
    if (f.is_variable()) return f.name() == var ? 1 : 0;
    int n = 0;
    for (const auto& a : f.args()) n += occurrences(a, var);
    return n;
}

bool is_closed(const Formula& f) { return variables(f).empty(); }

std::vector<Formula> subformulas(const Formula& f) {
    std::vector<Formula> out;
    std::unordered_map<const FormulaNode*, bool> seen;
    std::function<void(const Formula&)> go = [&](const Formula& g) {
        if (!seen.emplace(g.node(), true).second) return;
        out.push_back(g);
        for (const auto& a : g.args()) go(a);
    };
    go(f);
    std::sort(out.begin(), out.end(), FormulaLess{});
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Formula iterate(const Formula& ctx, const std::string& var, int n, const Formula& arg) {
    Formula r = arg;
    for (int i = 0; i < n; ++i) r = substitute(ctx, var, r);
    return r;
}

Formula iterate_op(const Signature& sig, int op, int n, const Formula& arg) {
    Formula r = arg;
    for (int i = 0; i < n; ++i) r = Formula::apply(sig, op, {r});
    return r;
}

std::pair<Formula, Formula> box_diamond_from_nary(const Signature& sig, int op,
                                                  const std::string& var) {
    int n = sig.arity(op);
    if (n < 2) throw Error("box/diamond construction needs an operation of arity >= 2");
    Formula x = Formula::variable(var);
    Formula all = Formula::apply(sig, op, std::vector<Formula>(n, x));
    std::vector<Formula> b(n, x), d(n, x);
    b[0] = all;
    d[1] = all;
    return {Formula::apply(sig, op, b), Formula::apply(sig, op, d)};
}

std::string to_string(const Equation& e) { return to_string(e.lhs) + " ~ " + to_string(e.rhs); }

Equation parse_equation(std::string_view text, const Signature& sig) {
    auto parts = split(text, '~');
    if (parts.size() != 2) throw Error("equation must have the form 'lhs ~ rhs'");
    return {parse_formula(parts[0], sig), parse_formula(parts[1], sig)};
}

std::vector<Equation> parse_equations(std::string_view text, const Signature& sig) {
    std::vector<Equation> out;
    for (auto piece : split(text, ';')) out.push_back(parse_equation(piece, sig));
    return out;
}

std::vector<Formula> parse_formula_list(std::string_view text, const Signature& sig) {
    std::vector<Formula> out;
    for (auto piece : split(text, ';')) out.push_back(parse_formula(piece, sig));
    return out;
}

int SubformulaTree::leaf_count(const std::string& label) const {
    int n = 0;
    for (const auto& nd : nodes)
        if (nd.children.empty() && nd.kind == NodeKind::variable && nd.label == label) ++n;
    return n;
}

SubformulaTree subformula_tree(const Formula& f, const std::string* prune) {
    SubformulaTree t;
    std::function<int(const Formula&, int)> go = [&](const Formula& g, int parent) -> int {
        if (prune && g.is_variable() && g.name() == *prune) return -1;
        int id = static_cast<int>(t.nodes.size());
        t.nodes.push_back({g.kind(), g.symbol(), g.name(), parent, {}});
        for (const auto& a : g.args()) {
            int c = go(a, id);
            if (c >= 0) t.nodes[id].children.push_back(c);
        }
        return id;
    };
    go(f, -1);
    return t;
}

Formula formula_from_tree(const SubformulaTree& t) {
    if (t.empty()) throw Error("empty subformula tree");
    std::function<Formula(int)> go = [&](int id) -> Formula {
        const auto& nd = t.nodes[id];
        switch (nd.kind) {
            case NodeKind::variable: return Formula::variable(nd.label);
            case NodeKind::constant: return Formula::constant(nd.symbol, nd.label);
            default: {
                std::vector<Formula> args;
                for (int c : nd.children) args.push_back(go(c));
                return Formula::apply(nd.symbol, nd.label, std::move(args));
            }
        }
    };
    return go(0);
}

std::vector<std::string> variable_names(int count) {
    std::vector<std::string> out;
    for (int i = 0; i < count; ++i) out.push_back("x" + std::to_string(i));
    return out;
}

}  // namespace algsem
