#include "algsem/signature.hpp"

#include <cctype>
#include <set>

namespace algsem {

bool is_identifier(const std::string& s) {
    if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

int Signature::constant_index(const std::string& name) const {
    for (std::size_t i = 0; i < constants.size(); ++i)
        if (constants[i] == name) return static_cast<int>(i);
    return -1;
}

int Signature::operation_index(const std::string& name) const {
    for (std::size_t i = 0; i < operations.size(); ++i)
        if (operations[i].name == name) return static_cast<int>(i);
    return -1;
}

bool Signature::graph_based() const {
    int unary = 0;
    for (const auto& op : operations) {
        if (op.arity > 1) return false;
        if (op.arity == 1) ++unary;
    }
    return unary <= 1;
}

int Signature::unary_operation() const {
    for (std::size_t i = 0; i < operations.size(); ++i)
        if (operations[i].arity == 1) return static_cast<int>(i);
    return -1;
}

std::vector<int> Signature::unary_operations() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < operations.size(); ++i)
        if (operations[i].arity == 1) out.push_back(static_cast<int>(i));
    return out;
}

int Signature::nary_operation() const {
    for (std::size_t i = 0; i < operations.size(); ++i)
        if (operations[i].arity >= 2) return static_cast<int>(i);
    return -1;
}

void Signature::validate(bool allow_numeric) const {
    std::set<std::string> seen;
    auto check = [&](const std::string& n, bool numeric_ok) {
        bool numeric = !n.empty();
        for (char c : n)
            if (!std::isdigit(static_cast<unsigned char>(c))) numeric = false;
        if (!is_identifier(n) && !(numeric_ok && numeric))
            throw Error("invalid symbol name '" + n + "'");
        if (!seen.insert(n).second) throw Error("duplicate symbol name '" + n + "'");
    };
    for (const auto& c : constants) check(c, allow_numeric);
    for (const auto& op : operations) {
        check(op.name, false);
        if (op.arity < 1) throw Error("operation '" + op.name + "' must have arity >= 1");
    }
}

}  // namespace algsem
