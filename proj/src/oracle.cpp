#include "algsem/oracle.hpp"

#include <functional>
#include <optional>
#include <set>

namespace algsem {

ConsequenceResult consequence_oracle(const MatrixFamily& M, const std::vector<Formula>& premises,
                                     const Formula& conclusion) {
    std::set<std::string> names = variables(conclusion);
    for (const auto& p : premises)
        for (const auto& v : variables(p)) names.insert(v);
    std::vector<std::string> vars(names.begin(), names.end());
    for (std::size_t mi = 0; mi < M.size(); ++mi) {
        const Matrix& m = M[mi];
        Valuation v;
        std::optional<Valuation> bad;
        std::function<void(std::size_t)> go = [&](std::size_t i) {
            if (bad) return;
            if (i == vars.size()) {
                for (const auto& p : premises)
                    if (!m.is_designated(evaluate(m.algebra, p, v))) return;
                if (!m.is_designated(evaluate(m.algebra, conclusion, v))) bad = v;
                return;
            }
            for (int e = 0; e < m.algebra.size; ++e) {
                v[vars[i]] = e;
                go(i + 1);
            }
        };
        go(0);
        if (bad) return {false, static_cast<int>(mi), *bad};
    }
    return {};
}

namespace {

Congruence largest(const std::vector<Congruence>& cs, int n) {
    Congruence best = identity_congruence(n);
    for (const auto& c : cs)
        if (best.refines(c)) best = c;
    // The admissible set is closed under joins, so the maximum is unique.
    for (const auto& c : cs)
        if (!c.refines(best)) throw Error("oracle: no largest admissible congruence");
    return best;
}

}  // namespace

Congruence leibniz_congruence_oracle(const FiniteAlgebra& A, const std::vector<int>& F,
                                     int bound) {
    std::vector<Congruence> ok;
    for (const auto& c : all_congruences(A, bound))
        if (compatible_with(c, F)) ok.push_back(c);
    return largest(ok, A.size);
}

Congruence tarski_congruence_oracle(const MatrixFamily& M, const FiniteAlgebra& A, int bound) {
    auto filters = all_filters(M, A, bound);
    std::vector<Congruence> ok;
    for (const auto& c : all_congruences(A, bound)) {
        bool good = true;
        for (const auto& F : filters)
            if (!compatible_with(c, F)) good = false;
        if (good) ok.push_back(c);
    }
    return largest(ok, A.size);
}

}  // namespace algsem
