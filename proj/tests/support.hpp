#pragma once

#include <random>
#include <string>
#include <vector>

#include "algsem/io.hpp"

namespace test_support {

inline algsem::Problem fixture(const std::string& name) {
    return algsem::load_problem(std::string(ALGSEM_FIXTURES) + "/" + name + ".json");
}

inline algsem::TmProblem tm_fixture(const std::string& name) {
    return algsem::load_tm(std::string(ALGSEM_FIXTURES) + "/" + name + ".json");
}

inline algsem::Signature signature(std::vector<std::string> constants,
                                   std::vector<algsem::Operation> ops) {
    algsem::Signature s;
    s.constants = std::move(constants);
    s.operations = std::move(ops);
    return s;
}

// Uniform tables over a given signature.
inline algsem::FiniteAlgebra random_algebra(const algsem::Signature& sig, int size,
                                            std::mt19937& rng) {
    algsem::FiniteAlgebra A;
    A.sig = sig;
    A.size = size;
    std::uniform_int_distribution<int> pick(0, size - 1);
    for (std::size_t i = 0; i < sig.constants.size(); ++i) A.constants.push_back(pick(rng));
    for (const auto& op : sig.operations) {
        long cells = 1;
        for (int i = 0; i < op.arity; ++i) cells *= size;
        std::vector<int> t(cells);
        for (auto& v : t) v = pick(rng);
        A.tables.push_back(std::move(t));
    }
    return A;
}

inline std::vector<int> random_subset(int size, std::mt19937& rng) {
    std::vector<int> out;
    for (int e = 0; e < size; ++e)
        if (rng() & 1) out.push_back(e);
    return out;
}

}  // namespace test_support
