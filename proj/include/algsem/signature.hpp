#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace algsem {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Operation {
    std::string name;
    int arity = 1;
    bool operator==(const Operation&) const = default;
};

struct Signature {
    std::vector<std::string> constants;
    std::vector<Operation> operations;

    int constant_index(const std::string& name) const;
    int operation_index(const std::string& name) const;
    int arity(int op) const { return operations.at(op).arity; }

    // Only constants and at most one unary operation.
    bool graph_based() const;
    // Index of the first operation with arity 1, or -1.
    int unary_operation() const;
    std::vector<int> unary_operations() const;
    // Index of the first operation with arity >= 2, or -1.
    int nary_operation() const;

    // Throws on duplicate or malformed names. Numeric constant names are
    // accepted only when allow_numeric is set (tape symbols of the TM encoding).
    void validate(bool allow_numeric = false) const;

    bool operator==(const Signature&) const = default;
};

bool is_identifier(const std::string& s);

}  // namespace algsem
