#include "algsem/io.hpp"

#include <fstream>
#include <functional>
#include <set>

namespace algsem {

namespace {

const Json& field(const Json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key))
        throw Error(where + ": missing field '" + key + "'");
    return j.at(key);
}

std::string string_field(const Json& j, const char* key, const std::string& where) {
    const Json& v = field(j, key, where);
    if (!v.is_string()) throw Error(where + ": field '" + key + "' must be a string");
    return v.get<std::string>();
}

int element_of(const FiniteAlgebra& A, const Json& v, const std::string& where) {
    if (v.is_number_integer()) {
        int e = v.get<int>();
        if (e < 0 || e >= A.size) throw Error(where + ": element index out of range");
        return e;
    }
    if (v.is_string()) {
        try {
            return A.element(v.get<std::string>());
        } catch (const Error& ex) {
            throw Error(where + ": " + ex.what());
        }
    }
    throw Error(where + ": element must be a label or an index");
}

void flatten(const Json& v, std::vector<const Json*>& out) {
    if (v.is_array())
        for (const auto& x : v) flatten(x, out);
    else
        out.push_back(&v);
}

Signature parse_signature(const Json& j) {
    Signature sig;
    const std::string where = "signature";
    if (j.contains("constants")) {
        for (const auto& c : j.at("constants")) {
            if (!c.is_string()) throw Error(where + ": constant names must be strings");
            sig.constants.push_back(c.get<std::string>());
        }
    }
    if (j.contains("operations")) {
        for (const auto& o : j.at("operations")) {
            Operation op;
            op.name = string_field(o, "name", where);
            const Json& a = field(o, "arity", where);
            if (!a.is_number_integer()) throw Error(where + ": arity must be an integer");
            op.arity = a.get<int>();
            sig.operations.push_back(op);
        }
    }
    sig.validate();
    return sig;
}

FiniteAlgebra parse_algebra(const Json& j, const Signature& sig) {
    FiniteAlgebra A;
    A.sig = sig;
    std::string name = string_field(j, "name", "algebra");
    std::string where = "algebra '" + name + "'";
    const Json& el = field(j, "elements", where);
    if (el.is_number_integer()) {
        A.size = el.get<int>();
    } else if (el.is_array()) {
        for (const auto& e : el) {
            if (!e.is_string()) throw Error(where + ": element labels must be strings");
            A.labels.push_back(e.get<std::string>());
        }
        A.size = static_cast<int>(A.labels.size());
        for (std::size_t i = 0; i < A.labels.size(); ++i)
            for (std::size_t k = 0; k < i; ++k)
                if (A.labels[i] == A.labels[k]) throw Error(where + ": duplicate element label");
    } else {
        throw Error(where + ": 'elements' must be a count or a label list");
    }
    if (A.size < 1) throw Error(where + ": needs at least one element");
    A.constants.assign(sig.constants.size(), -1);
    if (!sig.constants.empty()) {
        const Json& cs = field(j, "constants", where);
        for (std::size_t i = 0; i < sig.constants.size(); ++i) {
            if (!cs.contains(sig.constants[i]))
                throw Error(where + ": no value for constant '" + sig.constants[i] + "'");
            A.constants[i] = element_of(A, cs.at(sig.constants[i]), where);
        }
        for (const auto& [k, v] : cs.items())
            if (sig.constant_index(k) < 0) throw Error(where + ": unknown constant '" + k + "'");
    }
    if (!sig.operations.empty()) {
        const Json& ops = field(j, "operations", where);
        for (const auto& op : sig.operations) {
            if (!ops.contains(op.name))
                throw Error(where + ": no table for operation '" + op.name + "'");
            std::vector<const Json*> cells;
            flatten(ops.at(op.name), cells);
            long expected = 1;
            for (int i = 0; i < op.arity; ++i) expected *= A.size;
            if (static_cast<long>(cells.size()) != expected)
                throw Error(where + ": table of '" + op.name + "' has " +
                            std::to_string(cells.size()) + " entries, expected " +
                            std::to_string(expected));
            std::vector<int> table;
            for (const Json* c : cells) table.push_back(element_of(A, *c, where));
            A.tables.push_back(std::move(table));
        }
        for (const auto& [k, v] : ops.items())
            if (sig.operation_index(k) < 0) throw Error(where + ": unknown operation '" + k + "'");
    }
    A.validate();
    return A;
}

Json valuation_json(const Valuation& v, const FiniteAlgebra* A) {
    Json out = Json::object();
    for (const auto& [k, e] : v) out[k] = A ? A->label(e) : std::to_string(e);
    return out;
}

}  // namespace

MatrixFamily Problem::family() const {
    MatrixFamily M;
    for (const auto& m : matrices) M.push_back(m.matrix);
    return M;
}

const FiniteAlgebra& Problem::algebra(const std::string& n) const {
    for (const auto& [name, A] : algebras)
        if (name == n) return A;
    throw Error("no algebra named '" + n + "'");
}

const Matrix& Problem::matrix(const std::string& n) const {
    for (const auto& m : matrices)
        if (m.name == n) return m.matrix;
    const Matrix* found = nullptr;
    int count = 0;
    for (const auto& m : matrices)
        if (m.algebra == n) {
            found = &m.matrix;
            ++count;
        }
    if (count == 1) return *found;
    throw Error("no matrix named '" + n + "'");
}

Problem parse_problem(const Json& j) {
    if (!j.is_object()) throw Error("problem file must hold a JSON object");
    Problem p;
    if (j.contains("name")) p.name = j.at("name").get<std::string>();
    if (j.contains("description")) p.description = j.at("description").get<std::string>();
    p.sig = parse_signature(field(j, "signature", "problem"));
    if (j.contains("algebras")) {
        for (const auto& a : j.at("algebras")) {
            FiniteAlgebra A = parse_algebra(a, p.sig);
            std::string name = a.at("name").get<std::string>();
            for (const auto& [n, _] : p.algebras)
                if (n == name) throw Error("duplicate algebra name '" + name + "'");
            p.algebras.emplace_back(name, std::move(A));
        }
    }
    if (j.contains("matrices")) {
        int index = 0;
        for (const auto& m : j.at("matrices")) {
            NamedMatrix nm;
            nm.algebra = string_field(m, "algebra", "matrix");
            nm.name = m.contains("name") ? m.at("name").get<std::string>()
                                         : nm.algebra + "#" + std::to_string(index);
            std::string where = "matrix '" + nm.name + "'";
            nm.matrix.algebra = p.algebra(nm.algebra);
            std::set<int> d;
            for (const auto& e : field(m, "designated", where))
                d.insert(element_of(nm.matrix.algebra, e, where));
            nm.matrix.designated.assign(d.begin(), d.end());
            p.matrices.push_back(std::move(nm));
            ++index;
        }
    }
    if (j.contains("calculus")) {
        HilbertCalculus H;
        H.sig = p.sig;
        for (const auto& r : j.at("calculus")) {
            Rule rule;
            if (r.contains("premises"))
                for (const auto& f : r.at("premises"))
                    rule.premises.push_back(parse_formula(f.get<std::string>(), p.sig));
            rule.conclusion = parse_formula(string_field(r, "conclusion", "calculus"), p.sig);
            H.rules.push_back(std::move(rule));
            H.names.push_back(r.contains("name") ? r.at("name").get<std::string>()
                                                 : "r" + std::to_string(H.rules.size()));
        }
        p.calculus = std::move(H);
    }
    if (j.contains("tau")) p.tau = parse_tau(j.at("tau").get<std::string>(), p.sig);
    return p;
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw Error(path + ": " + e.what());
    }
}

Problem load_problem(const std::string& path) {
    try {
        return parse_problem(read_json_file(path));
    } catch (const Json::exception& e) {
        throw Error(path + ": " + e.what());
    }
}

TmProblem parse_tm(const Json& j) {
    TmProblem t;
    if (j.contains("name")) t.name = j.at("name").get<std::string>();
    const Json& st = field(j, "states", "tm");
    for (const auto& q : field(st, "final", "tm states")) t.machine.final_states.push_back(q.get<std::string>());
    for (const auto& q : field(st, "nonfinal", "tm states"))
        t.machine.nonfinal_states.push_back(q.get<std::string>());
    t.machine.initial = string_field(st, "initial", "tm states");
    for (const auto& d : field(j, "delta", "tm")) {
        std::string q = string_field(d, "state", "delta");
        Symbol a = parse_symbol(string_field(d, "read", "delta"));
        Transition tr;
        tr.next = string_field(d, "next", "delta");
        tr.write = parse_symbol(string_field(d, "write", "delta"));
        std::string mv = string_field(d, "move", "delta");
        if (mv == "L") tr.move = Move::left;
        else if (mv == "R") tr.move = Move::right;
        else throw Error("delta: move must be L or R");
        if (!t.machine.delta.emplace(std::make_pair(q, a), tr).second)
            throw Error("delta: duplicate entry for (" + q + ", " + symbol_name(a) + ")");
    }
    t.machine.validate();
    t.input = parse_tape(string_field(j, "input", "tm"));
    if (j.contains("saturation")) {
        const Json& s = j.at("saturation");
        t.saturation.max_depth = s.value("max_depth", t.saturation.max_depth);
        t.saturation.max_vars = s.value("max_vars", t.saturation.max_vars);
        t.saturation.max_derived = s.value("max_derived", t.saturation.max_derived);
        t.saturation.max_iterations = s.value("max_iterations", t.saturation.max_iterations);
    }
    return t;
}

TmProblem load_tm(const std::string& path) {
    try {
        return parse_tm(read_json_file(path));
    } catch (const Json::exception& e) {
        throw Error(path + ": " + e.what());
    }
}

std::string element_list(const FiniteAlgebra& A, const std::vector<int>& xs) {
    std::string out = "{";
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + A.label(xs[i]);
    return out + "}";
}

Json to_json(const Signature& sig) {
    Json ops = Json::array();
    for (const auto& o : sig.operations) ops.push_back({{"name", o.name}, {"arity", o.arity}});
    return {{"constants", sig.constants}, {"operations", ops}};
}

Json to_json(const Rule& r) {
    Json prem = Json::array();
    for (const auto& p : r.premises) prem.push_back(to_string(p));
    return {{"premises", prem}, {"conclusion", to_string(r.conclusion)}, {"text", to_string(r)}};
}

Json to_json(const HilbertCalculus& H) {
    Json rules = Json::array();
    for (std::size_t i = 0; i < H.rules.size(); ++i) {
        Json r = to_json(H.rules[i]);
        if (i < H.names.size()) r["name"] = H.names[i];
        rules.push_back(r);
    }
    return {{"signature", to_json(H.sig)}, {"rules", rules}};
}

Json to_json(const Congruence& c, const FiniteAlgebra& A) {
    Json blocks = Json::array();
    for (const auto& b : c.blocks()) {
        Json blk = Json::array();
        for (int e : b) blk.push_back(A.label(e));
        blocks.push_back(blk);
    }
    return {{"blocks", blocks}, {"text", to_string(c, &A)}};
}

Json to_json(const Matrix& m) {
    Json ops = Json::object();
    for (std::size_t i = 0; i < m.algebra.tables.size(); ++i) {
        Json t = Json::array();
        for (int v : m.algebra.tables[i]) t.push_back(m.algebra.label(v));
        ops[m.algebra.sig.operations[i].name] = t;
    }
    Json consts = Json::object();
    for (std::size_t i = 0; i < m.algebra.constants.size(); ++i)
        consts[m.algebra.sig.constants[i]] = m.algebra.label(m.algebra.constants[i]);
    Json elements = Json::array();
    for (int e = 0; e < m.algebra.size; ++e) elements.push_back(m.algebra.label(e));
    Json des = Json::array();
    for (int e : m.designated) des.push_back(m.algebra.label(e));
    return {{"elements", elements}, {"constants", consts}, {"operations", ops}, {"designated", des}};
}

Json to_json(const Witness& w, std::size_t max_chars) {
    Json tau = Json::array();
    bool elided = false;
    for (const auto& e : w.tau) {
        if (static_cast<std::size_t>(e.lhs.size() + e.rhs.size()) > max_chars / 4) {
            elided = true;
            tau.push_back({{"lhs_nodes", e.lhs.size()}, {"rhs_nodes", e.rhs.size()},
                           {"lhs_height", e.lhs.height()}, {"rhs_height", e.rhs.height()}});
        } else {
            tau.push_back(to_string(e));
        }
    }
    Json ev = Json::object();
    for (const auto& [k, v] : w.evidence) ev[k] = v;
    Json j{{"tau", tau}, {"kind", to_string(w.kind)}, {"evidence", ev}};
    if (elided) j["tau_elided"] = true;
    return j;
}

Json to_json(const Refutation& r, const MatrixFamily& M) {
    Json j{{"condition", r.condition},
           {"instance", to_json(r.instance)},
           {"instance_valid", r.instance_valid}};
    if (!r.evidence.holds) {
        const FiniteAlgebra* A = r.evidence.matrix >= 0 && r.evidence.matrix < static_cast<int>(M.size())
                                     ? &M[r.evidence.matrix].algebra
                                     : nullptr;
        j["counter_matrix"] = r.evidence.matrix;
        j["valuation"] = valuation_json(r.evidence.valuation, A);
    }
    return j;
}

Json to_json(const Decision& d, const MatrixFamily& M, std::size_t max_chars) {
    Json trace = Json::array();
    for (const auto& t : d.trace)
        trace.push_back({{"condition", t.condition}, {"holds", t.holds}, {"detail", t.detail}});
    Json j{{"answer", to_string(d.answer)}, {"branch", d.branch}, {"trace", trace}};
    if (d.witness) j["witness"] = to_json(*d.witness, max_chars);
    if (d.refutation) j["refutation"] = to_json(*d.refutation, M);
    if (d.periodicity) j["periodicity"] = {{"m", d.periodicity->first}, {"n", d.periodicity->second}};
    return j;
}

Json to_json(const VerifyReport& r) {
    Json ce = Json::array();
    for (const auto& c : r.counterexamples) {
        Json g = Json::array();
        for (const auto& f : c.gamma) g.push_back(to_string(f));
        ce.push_back({{"gamma", g}, {"phi", to_string(c.phi)}, {"reason", c.reason}});
    }
    return {{"pass", r.pass},
            {"pool_size", r.pool_size},
            {"pairs", r.pairs},
            {"derivable", r.derivable},
            {"refuted", r.refuted},
            {"closure_checks", r.closure_checks},
            {"unknown", r.unknown},
            {"counterexamples", ce},
            {"note", r.note}};
}

Json to_json(const Proof& p, const HilbertCalculus& H) {
    Json lines = Json::array();
    for (std::size_t i = 0; i < p.lines.size(); ++i) {
        const auto& l = p.lines[i];
        Json s = Json::object();
        for (const auto& [k, v] : l.substitution) s[k] = to_string(v);
        Json line{{"index", i}, {"formula", to_string(l.formula)}, {"premises", l.premises}};
        if (l.rule < 0) {
            line["rule"] = "hypothesis";
        } else {
            line["rule"] = static_cast<std::size_t>(l.rule) < H.names.size()
                               ? H.names[l.rule]
                               : std::to_string(l.rule);
            line["rule_index"] = l.rule;
            line["substitution"] = s;
        }
        lines.push_back(line);
    }
    return {{"lines", lines}};
}

Json to_json(const Configuration& c) {
    auto seg = [](const std::vector<Symbol>& s) {
        Json a = Json::array();
        for (Symbol x : s) a.push_back(symbol_name(x));
        return a;
    };
    return {{"state", c.state}, {"left", seg(c.left)}, {"head", symbol_name(c.head)},
            {"right", seg(c.right)}, {"text", to_string(c)}};
}

Json to_json(const ChainResult& c) {
    Json chain = Json::array();
    for (const auto& f : c.chain) chain.push_back(to_string(f));
    return {{"member", c.member}, {"chain", chain}, {"explored", c.explored}};
}

Json to_json(const CrossCheckReport& r) {
    Json ev = Json::array();
    for (const auto& f : r.evidence) ev.push_back(to_string(f));
    return {{"status", r.status}, {"detail", r.detail}, {"evidence", ev}};
}

}  // namespace algsem
