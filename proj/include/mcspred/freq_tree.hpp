#pragma once

#include <algorithm>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mcspred/types.hpp"

namespace mcspred {

// Counting trie over recent-context suffixes.
//
// A root-to-node path of length d spells a context of d symbols in temporal
// order, oldest first. On every ingest step the update rule credits, for each
// suffix of the current window ending at the newest symbol, only the terminal
// node of that suffix's path. Counts are per-suffix credits rather than
// subtree sums, so for every internal node the children's counts sum to at
// most the node's own count (the remainder are occurrences whose continuation
// was never recorded).

struct TreeNode {
    Symbol symbol = -1;
    long long count = 0;
    std::vector<TreeNode> children;  // ascending symbol order

    const TreeNode* child(Symbol s) const {
        auto it = std::lower_bound(children.begin(), children.end(), s,
                                   [](const TreeNode& n, Symbol v) { return n.symbol < v; });
        return (it != children.end() && it->symbol == s) ? &*it : nullptr;
    }

    TreeNode& child_or_insert(Symbol s) {
        auto it = std::lower_bound(children.begin(), children.end(), s,
                                   [](const TreeNode& n, Symbol v) { return n.symbol < v; });
        if (it != children.end() && it->symbol == s) return *it;
        return *children.insert(it, TreeNode{s, 0, {}});
    }

    long long children_total() const {
        long long sum = 0;
        for (const TreeNode& ch : children) sum += ch.count;
        return sum;
    }
};

class FrequencyTree {
public:
    // max_depth 0 means unbounded (variable-depth construction).
    explicit FrequencyTree(int max_depth = 0) : max_depth_(max_depth) {
        if (max_depth < 0) throw DomainError("tree depth must be >= 0");
    }

    // One ingest step: credits the terminal node of every suffix of `window`
    // (the newest symbol last), creating nodes as needed. Suffixes longer
    // than max_depth are skipped on bounded trees.
    void credit_suffixes(std::span<const Symbol> window) {
        std::size_t longest = window.size();
        if (max_depth_ > 0) longest = std::min(longest, static_cast<std::size_t>(max_depth_));
        for (std::size_t len = 1; len <= longest; ++len) {
            TreeNode* node = &root_;
            for (std::size_t i = window.size() - len; i < window.size(); ++i)
                node = &node->child_or_insert(window[i]);
            ++node->count;
        }
        ++total_;
    }

    const TreeNode* find(std::span<const Symbol> context) const {
        const TreeNode* node = &root_;
        for (Symbol s : context) {
            node = node->child(s);
            if (node == nullptr) return nullptr;
        }
        return node;
    }

    // Count at the node reached by walking `context`; absent paths count 0.
    long long context_count(std::span<const Symbol> context) const {
        const TreeNode* node = find(context);
        return node ? node->count : 0;
    }

    // Sum of the children counts below `context` (recorded continuations).
    long long continuation_total(std::span<const Symbol> context) const {
        const TreeNode* node = find(context);
        return node ? node->children_total() : 0;
    }

    const TreeNode& root() const { return root_; }
    long long total() const { return total_; }
    int max_depth() const { return max_depth_; }

    template <typename Fn>
    void for_each_node(Fn&& fn) const {
        std::vector<Symbol> path;
        visit(root_, path, fn);
    }

    // Pre-order text dump, one "depth,symbol,count" line per node, children
    // in ascending symbol order.
    std::string dump() const {
        std::ostringstream out;
        for_each_node([&out](const std::vector<Symbol>& path, long long count) {
            out << path.size() << ',' << path.back() << ',' << count << '\n';
        });
        return out.str();
    }

private:
    template <typename Fn>
    void visit(const TreeNode& node, std::vector<Symbol>& path, Fn& fn) const {
        for (const TreeNode& ch : node.children) {
            path.push_back(ch.symbol);
            fn(const_cast<const std::vector<Symbol>&>(path), ch.count);
            visit(ch, path, fn);
            path.pop_back();
        }
    }

    TreeNode root_;
    int max_depth_ = 0;
    long long total_ = 0;
};

// Fixed-depth ingest: the window is the most recent min(max_depth, n) symbols
// including the newest one. `history` must end with the newly arrived symbol.
inline void ppm_ingest(FrequencyTree& tree, std::span<const Symbol> history) {
    if (tree.max_depth() <= 0) throw DomainError("ppm_ingest requires a bounded tree depth");
    if (history.empty()) throw DomainError("ppm_ingest needs at least the incoming symbol");
    const std::size_t len = std::min(history.size(), static_cast<std::size_t>(tree.max_depth()));
    tree.credit_suffixes(history.subspan(history.size() - len));
}

// Variable-depth builder. An LZ78-style dictionary of parsed words drives the
// window bound: the current word grows until it falls outside the dictionary,
// at which point it is inserted and reset; the window keeps the most recent
// W_Lmax symbols where W_Lmax is the longest dictionary word.
class ActiveLezi {
public:
    void ingest(FrequencyTree& tree, Symbol v) {
        word_.push_back(v);
        window_.push_back(v);
        if (dictionary_.insert(word_).second) {
            w_lmax_ = std::max(w_lmax_, static_cast<int>(word_.size()));
            word_.clear();
        }
        while (static_cast<int>(window_.size()) > w_lmax_)
            window_.erase(window_.begin());
        tree.credit_suffixes(window_);
    }

    int window_length() const { return static_cast<int>(window_.size()); }
    int w_lmax() const { return w_lmax_; }
    std::size_t dictionary_size() const { return dictionary_.size(); }

private:
    std::vector<Symbol> window_;
    std::vector<Symbol> word_;
    std::set<std::vector<Symbol>> dictionary_;
    int w_lmax_ = 0;
};

// Symbols observed at depth 1 and their cardinality m_u.
inline std::pair<int, std::vector<Symbol>> observed_alphabet(const FrequencyTree& tree) {
    if (tree.total() == 0) throw DomainError("observed_alphabet on empty tree");
    std::vector<Symbol> symbols;
    for (const TreeNode& ch : tree.root().children)
        if (ch.count > 0) symbols.push_back(ch.symbol);
    return {static_cast<int>(symbols.size()), symbols};
}

}  // namespace mcspred
