#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "algsem/signature.hpp"

namespace algsem {

enum class NodeKind : std::uint8_t { variable, constant, operation };

class Formula;

struct FormulaNode {
    NodeKind kind;
    int symbol;  // constant or operation index, -1 for variables
    std::string name;
    std::vector<Formula> args;
    std::size_t hash;
    int size;    // number of nodes of the tree
    int height;  // edges on the longest branch, 0 for atoms
};

// Immutable term tree. Subterms may be shared, so the value is a DAG in
// memory while behaving as a tree.
class Formula {
public:
    Formula() = default;

    static Formula variable(const std::string& name);
    static Formula constant(int index, const std::string& name);
    static Formula constant(const Signature& sig, int index);
    static Formula apply(int op, const std::string& name, std::vector<Formula> args);
    static Formula apply(const Signature& sig, int op, std::vector<Formula> args);

    NodeKind kind() const { return p_->kind; }
    bool is_variable() const { return p_->kind == NodeKind::variable; }
    bool is_constant() const { return p_->kind == NodeKind::constant; }
    bool is_operation() const { return p_->kind == NodeKind::operation; }
    bool is_atom() const { return p_->kind != NodeKind::operation; }
    int symbol() const { return p_->symbol; }
    const std::string& name() const { return p_->name; }
    const std::vector<Formula>& args() const { return p_->args; }
    const Formula& arg(std::size_t i) const { return p_->args[i]; }
    std::size_t hash() const { return p_->hash; }
    int size() const { return p_->size; }
    int height() const { return p_->height; }
    const FormulaNode* node() const { return p_.get(); }
    explicit operator bool() const { return static_cast<bool>(p_); }

    friend bool operator==(const Formula& a, const Formula& b);
    friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }

private:
    explicit Formula(std::shared_ptr<const FormulaNode> p) : p_(std::move(p)) {}
    std::shared_ptr<const FormulaNode> p_;
};

struct FormulaHash {
    std::size_t operator()(const Formula& f) const { return f.hash(); }
};

// Size first, then printed form.
bool formula_less(const Formula& a, const Formula& b);
struct FormulaLess {
    bool operator()(const Formula& a, const Formula& b) const { return formula_less(a, b); }
};

// Fully parenthesized prefix form, no spaces: and(x,box(c0)).
std::string to_string(const Formula& f);

// term := var | const | op '(' term {',' term} ')'
Formula parse_formula(std::string_view text, const Signature& sig);

using Substitution = std::map<std::string, Formula>;

Formula substitute(const Formula& f, const Substitution& s);
Formula substitute(const Formula& f, const std::string& var, const Formula& value);
// s1 after s2: x maps to s1(s2(x)).
Substitution compose(const Substitution& s1, const Substitution& s2);

std::set<std::string> variables(const Formula& f);
int occurrences(const Formula& f, const std::string& var);
bool is_closed(const Formula& f);
std::vector<Formula> subformulas(const Formula& f);  // distinct, canonical order

// ctx applied n times around arg, ctx being a formula in `var`. n = 0 gives arg.
Formula iterate(const Formula& ctx, const std::string& var, int n, const Formula& arg);
// op applied n times: box^n(arg).
Formula iterate_op(const Signature& sig, int op, int n, const Formula& arg);

// For f of arity n >= 2: f(f(x..x),x..x) and f(x,f(x..x),x..x).
std::pair<Formula, Formula> box_diamond_from_nary(const Signature& sig, int op,
                                                  const std::string& var = "x");

struct Equation {
    Formula lhs;
    Formula rhs;
    bool operator==(const Equation&) const = default;
};

std::string to_string(const Equation& e);
// "lhs ~ rhs"
Equation parse_equation(std::string_view text, const Signature& sig);
// Semicolon separated list of equations; empty text gives the empty list.
std::vector<Equation> parse_equations(std::string_view text, const Signature& sig);
// Semicolon separated list of formulas.
std::vector<Formula> parse_formula_list(std::string_view text, const Signature& sig);

// Labelled rooted tree of a formula; node 0 is the root, children listed in order.
struct SubformulaTree {
    struct Node {
        NodeKind kind;
        int symbol;
        std::string label;
        int parent;
        std::vector<int> children;
    };
    std::vector<Node> nodes;

    std::size_t size() const { return nodes.size(); }
    bool empty() const { return nodes.empty(); }
    int leaf_count(const std::string& label) const;
};

// With prune set, leaves labelled by that variable are dropped.
SubformulaTree subformula_tree(const Formula& f, const std::string* prune = nullptr);
// Inverse of subformula_tree without pruning.
Formula formula_from_tree(const SubformulaTree& t);

std::vector<std::string> variable_names(int count);  // x0, x1, ...

}  // namespace algsem
