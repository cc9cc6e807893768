#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "algsem/formula.hpp"

namespace algsem {

// Hash-consed store of ground terms; variables are treated as constants.
class TermBank {
public:
    int intern(const Formula& f);
    int node(int label, const std::vector<int>& children);

    int size() const { return static_cast<int>(labels_.size()); }
    int label(int id) const { return labels_[id]; }
    const std::vector<int>& children(int id) const { return children_[id]; }
    const std::vector<int>& parents(int id) const { return parents_[id]; }
    // Node with exactly this label and children, or -1.
    int find(int label, const std::vector<int>& children) const;

private:
    struct KeyHash {
        std::size_t operator()(const std::vector<int>& k) const;
    };
    int label_id(const Formula& f);

    std::unordered_map<std::string, int> label_ids_;
    std::vector<int> labels_;
    std::vector<std::vector<int>> children_;
    std::vector<std::vector<int>> parents_;
    std::unordered_map<std::vector<int>, int, KeyHash> table_;  // label followed by children
    std::unordered_map<const FormulaNode*, int> memo_;
    std::vector<Formula> keep_;  // keeps memo keys alive
};

// Congruence closure over a TermBank. Nodes added to the bank after
// construction are picked up lazily. reset() undoes every merge.
class CongruenceClosure {
public:
    explicit CongruenceClosure(const TermBank& bank) : bank_(bank) {}

    void merge(int a, int b);
    int find(int a);
    bool equivalent(int a, int b) { return find(a) == find(b); }
    void reset();

private:
    struct KeyHash {
        std::size_t operator()(const std::vector<int>& k) const;
    };
    void sync();
    std::vector<int> signature(int id) const;
    int lookup(const std::vector<int>& sig) const;
    void touch(int id);

    const TermBank& bank_;
    std::vector<int> rep_, next_, size_;
    std::vector<char> touched_;
    std::vector<int> touched_list_;
    std::unordered_map<std::vector<int>, int, KeyHash> overlay_;  // -1 marks a removed entry
    std::vector<std::pair<int, int>> pending_;
};

}  // namespace algsem
