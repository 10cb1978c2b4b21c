#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "mcspred/blend.hpp"
#include "mcspred/freq_tree.hpp"
#include "mcspred/types.hpp"

namespace mcspred {

// Online predictive-information estimation. For each candidate order k the
// running mean of the instantaneous predictive information is kept; the
// finite differences of those means form the learning curve whose decay
// bounds the model order from above.

struct PredictiveInfoEstimate {
    int max_order;             // K, candidate orders 1..K
    int alphabet_size;         // p in the log2(p) reference term
    std::vector<double> mean_bits;  // running mean per order, index k-1
    long long n_used = 0;

    PredictiveInfoEstimate(int K, int p)
        : max_order(K), alphabet_size(p), mean_bits(static_cast<std::size_t>(K), 0.0) {
        if (K < 1) throw DomainError("predictive-info estimate needs K >= 1");
        if (p < 2) throw DomainError("predictive-info estimate needs p >= 2");
    }
};

// log2(p) minus the entropy of the blended conditional, written as the
// divergence sum_t P(t) log2(p * P(t)) so an exactly uniform conditional
// lands on exactly zero.
inline double ipred_instant(const FrequencyTree& tree, std::span<const Symbol> context,
                            int alphabet_size) {
    const std::vector<double> dist = blended_distribution(tree, context, alphabet_size);
    double bits = 0.0;
    for (double p : dist)
        if (p > 0.0) bits += p * std::log2(p * double(alphabet_size));
    return bits;
}

// One update per newly ingested symbol, after the tree update; `history`
// must end with that symbol. Averaging starts once history holds K+1
// symbols so every order sees the same number of samples.
inline void ipred_update(PredictiveInfoEstimate& est, const FrequencyTree& tree,
                         std::span<const Symbol> history) {
    if (static_cast<long long>(history.size()) < est.max_order + 1) return;
    ++est.n_used;
    for (int k = 1; k <= est.max_order; ++k) {
        const auto ctx = history.subspan(history.size() - static_cast<std::size_t>(k));
        const double inst = ipred_instant(tree, ctx, est.alphabet_size);
        est.mean_bits[static_cast<std::size_t>(k - 1)] +=
            (inst - est.mean_bits[static_cast<std::size_t>(k - 1)]) / double(est.n_used);
    }
}

// L(k) = Ipred(k) - Ipred(k-1), with Ipred(0) taken as 0.
inline std::vector<double> learning_curve(const PredictiveInfoEstimate& est) {
    std::vector<double> curve(est.mean_bits.size(), 0.0);
    for (std::size_t i = 0; i < est.mean_bits.size(); ++i)
        curve[i] = est.mean_bits[i] - (i == 0 ? 0.0 : est.mean_bits[i - 1]);
    return curve;
}

// Largest k whose learning-curve increment still exceeds epsilon; an order-1
// model is the universal fallback when no increment qualifies.
inline int k_opt(const PredictiveInfoEstimate& est, double epsilon) {
    if (epsilon <= 0.0) throw DomainError("epsilon must be positive");
    const std::vector<double> curve = learning_curve(est);
    for (int k = est.max_order; k >= 1; --k)
        if (curve[static_cast<std::size_t>(k - 1)] > epsilon) return k;
    return 1;
}

}  // namespace mcspred
