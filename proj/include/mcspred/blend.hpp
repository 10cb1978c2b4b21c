#pragma once

#include <span>
#include <vector>

#include "mcspred/freq_tree.hpp"
#include "mcspred/types.hpp"

namespace mcspred {

// Blended conditional probabilities over a frequency tree.
//
// An order-k estimate mixes the maximum-likelihood conditional read at depth
// k+1 with the order-(k-1) estimate for the shortened context, weighted by
// the probability mass the recorded depth-(k+1) continuations leave
// unaccounted for:
//
//   P_k(t | c_1..c_k) = count(c_1..c_k, t) / count(c_1..c_k)
//                     + (1 - sum_s count(c_1..c_k, s) / count(c_1..c_k))
//                       * P_{k-1}(t | c_2..c_k)
//   P_0(t)            = count(t) / n
//
// A context with zero count contributes nothing at its own order and passes
// weight 1 down to the next order. The result is a proper distribution:
// sum_t P_k(t | context) = 1 for every context.

inline double prob_order0(const FrequencyTree& tree, Symbol t) {
    if (tree.total() == 0) throw DomainError("order-0 probability on an empty tree");
    const TreeNode* node = tree.root().child(t);
    return node ? double(node->count) / double(tree.total()) : 0.0;
}

inline double prob_blended(const FrequencyTree& tree, std::span<const Symbol> context, Symbol t) {
    if (tree.max_depth() > 0 && static_cast<int>(context.size()) + 1 > tree.max_depth())
        throw DomainError("blend order exceeds tree depth - 1");
    if (context.empty()) return prob_order0(tree, t);

    const double lower = prob_blended(tree, context.subspan(1), t);
    const TreeNode* node = tree.find(context);
    if (node == nullptr || node->count == 0) return lower;  // escape weight 1

    long long extension = 0;
    long long stored = 0;
    for (const TreeNode& ch : node->children) {
        stored += ch.count;
        if (ch.symbol == t) extension = ch.count;
    }
    const double c = double(node->count);
    return double(extension) / c + (1.0 - double(stored) / c) * lower;
}

// Full conditional distribution over the alphabet, equal to prob_blended
// evaluated at every symbol but computed in one pass per order.
inline std::vector<double> blended_distribution(const FrequencyTree& tree,
                                                std::span<const Symbol> context,
                                                int alphabet_size) {
    if (tree.total() == 0) throw DomainError("blended distribution on an empty tree");
    if (tree.max_depth() > 0 && static_cast<int>(context.size()) + 1 > tree.max_depth())
        throw DomainError("blend order exceeds tree depth - 1");

    std::vector<double> dist(static_cast<std::size_t>(alphabet_size), 0.0);
    const double n = double(tree.total());
    for (const TreeNode& ch : tree.root().children)
        if (ch.symbol >= 0 && ch.symbol < alphabet_size)
            dist[static_cast<std::size_t>(ch.symbol)] = double(ch.count) / n;

    for (std::size_t len = 1; len <= context.size(); ++len) {
        const TreeNode* node = tree.find(context.subspan(context.size() - len));
        if (node == nullptr || node->count == 0) continue;
        const double c = double(node->count);
        const double escape = 1.0 - double(node->children_total()) / c;
        for (double& p : dist) p *= escape;
        for (const TreeNode& ch : node->children)
            if (ch.symbol >= 0 && ch.symbol < alphabet_size)
                dist[static_cast<std::size_t>(ch.symbol)] += double(ch.count) / c;
    }
    return dist;
}

}  // namespace mcspred
