#include "algsem/term_closure.hpp"

#include <algorithm>

namespace algsem {

namespace {

std::size_t hash_key(const std::vector<int>& k) {
    std::size_t h = k.size();
    for (int x : k) h = (h ^ static_cast<std::size_t>(x + 1)) * 0x100000001b3ULL;
    return h;
}

}  // namespace

std::size_t TermBank::KeyHash::operator()(const std::vector<int>& k) const { return hash_key(k); }
std::size_t CongruenceClosure::KeyHash::operator()(const std::vector<int>& k) const {
    return hash_key(k);
}

int TermBank::label_id(const Formula& f) {
    std::string key = (f.is_variable() ? "v:" : f.is_constant() ? "c:" : "o:") + f.name();
    auto [it, fresh] = label_ids_.emplace(key, static_cast<int>(label_ids_.size()));
    return it->second;
}

int TermBank::find(int label, const std::vector<int>& children) const {
    std::vector<int> key;
    key.reserve(children.size() + 1);
    key.push_back(label);
    key.insert(key.end(), children.begin(), children.end());
    auto it = table_.find(key);
    return it == table_.end() ? -1 : it->second;
}

int TermBank::node(int label, const std::vector<int>& children) {
    std::vector<int> key;
    key.reserve(children.size() + 1);
    key.push_back(label);
    key.insert(key.end(), children.begin(), children.end());
    auto it = table_.find(key);
    if (it != table_.end()) return it->second;
    int id = size();
    labels_.push_back(label);
    children_.push_back(children);
    parents_.emplace_back();
    for (int c : children)
        if (parents_[c].empty() || parents_[c].back() != id) parents_[c].push_back(id);
    table_.emplace(std::move(key), id);
    return id;
}

int TermBank::intern(const Formula& f) {
    auto it = memo_.find(f.node());
    if (it != memo_.end()) return it->second;
    std::vector<int> kids;
    kids.reserve(f.args().size());
    for (const auto& a : f.args()) kids.push_back(intern(a));
    int id = node(label_id(f), kids);
    memo_.emplace(f.node(), id);
    keep_.push_back(f);
    return id;
}

std::vector<int> CongruenceClosure::signature(int id) const {
    const auto& kids = bank_.children(id);
    std::vector<int> sig;
    sig.reserve(kids.size() + 1);
    sig.push_back(bank_.label(id));
    for (int c : kids) sig.push_back(rep_[c]);
    return sig;
}

// A base-table hit is valid: a node whose original children are all current
// representatives still has its original signature.
int CongruenceClosure::lookup(const std::vector<int>& sig) const {
    auto it = overlay_.find(sig);
    if (it != overlay_.end()) return it->second;
    return bank_.find(sig[0], std::vector<int>(sig.begin() + 1, sig.end()));
}

void CongruenceClosure::touch(int id) {
    if (!touched_[id]) {
        touched_[id] = 1;
        touched_list_.push_back(id);
    }
}

void CongruenceClosure::sync() {
    int old = static_cast<int>(rep_.size());
    int n = bank_.size();
    if (old == n) return;
    for (int i = old; i < n; ++i) {
        rep_.push_back(i);
        next_.push_back(i);
        size_.push_back(1);
        touched_.push_back(0);
    }
    // A new node may be congruent to an older node through earlier merges.
    for (int i = old; i < n; ++i) {
        auto sig = signature(i);
        int q = lookup(sig);
        if (q >= 0 && q != i) {
            pending_.emplace_back(i, q);
        } else if (q < 0) {
            overlay_[sig] = i;
        }
    }
}

int CongruenceClosure::find(int a) {
    sync();
    if (!pending_.empty()) merge(a, a);
    return rep_[a];
}

void CongruenceClosure::merge(int a, int b) {
    sync();
    pending_.emplace_back(a, b);
    while (!pending_.empty()) {
        auto [x, y] = pending_.back();
        pending_.pop_back();
        int rx = rep_[x], ry = rep_[y];
        if (rx == ry) continue;
        if (size_[rx] > size_[ry]) std::swap(rx, ry);
        // Parents of the smaller class lose their signatures.
        std::vector<int> moved;
        int cur = rx;
        do {
            moved.push_back(cur);
            cur = next_[cur];
        } while (cur != rx);
        std::vector<int> parents;
        for (int mbr : moved)
            for (int p : bank_.parents(mbr)) parents.push_back(p);
        std::sort(parents.begin(), parents.end());
        parents.erase(std::unique(parents.begin(), parents.end()), parents.end());
        for (int p : parents) {
            auto sig = signature(p);
            if (lookup(sig) == p) overlay_[sig] = -1;
        }
        for (int mbr : moved) {
            touch(mbr);
            rep_[mbr] = ry;
        }
        touch(ry);
        std::swap(next_[rx], next_[ry]);
        size_[ry] += size_[rx];
        for (int p : parents) {
            auto sig = signature(p);
            int q = lookup(sig);
            if (q >= 0) {
                if (rep_[q] != rep_[p]) pending_.emplace_back(p, q);
            } else {
                overlay_[sig] = p;
            }
        }
    }
}

void CongruenceClosure::reset() {
    for (int id : touched_list_) {
        rep_[id] = id;
        next_[id] = id;
        size_[id] = 1;
        touched_[id] = 0;
    }
    touched_list_.clear();
    overlay_.clear();
    pending_.clear();
    // Nodes registered in the overlay by sync() are all base-table entries.
}

}  // namespace algsem
