#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "mcspred/freq_tree.hpp"
#include "mcspred/types.hpp"

namespace mcspred {

enum class Criterion { kMdl, kAic, kAicc };

inline const char* criterion_name(Criterion c) {
    switch (c) {
        case Criterion::kMdl: return "mdl";
        case Criterion::kAic: return "aic";
        case Criterion::kAicc: return "aicc";
    }
    return "?";
}

// Where the log-likelihood position sums begin. kPerOrder evaluates order i
// from position i+1 on; kCommonStart starts every order at the same position
// (the largest candidate + 1) so all orders share one N.
enum class LoglikSpan { kPerOrder, kCommonStart };

// Parameter count of an order-i Markov model on an m_u-symbol alphabet.
inline long long n_params(int m_u, int order) {
    if (m_u < 1 || order < 1) throw DomainError("n_params needs m_u >= 1 and order >= 1");
    long long params = m_u - 1;
    for (int j = 1; j < order; ++j) params *= m_u;
    return params;
}

namespace detail {

// Sum over positions of ln of the plug-in conditional: occurrences of the
// (order+1)-gram over occurrences of its context followed by anything. Both
// counts come from the same tree the sequence was ingested into, so every
// evaluated transition has a positive conditional.
inline double loglik_from(const FrequencyTree& tree, std::span<const Symbol> seq, int order,
                          std::size_t first_predicted) {
    double sum = 0.0;
    for (std::size_t pos = first_predicted; pos < seq.size(); ++pos) {
        const auto gram = seq.subspan(pos - static_cast<std::size_t>(order),
                                      static_cast<std::size_t>(order) + 1);
        const auto ctx = gram.first(static_cast<std::size_t>(order));
        const long long joint = tree.context_count(gram);
        const long long cond = tree.continuation_total(ctx);
        sum += std::log(double(joint) / double(cond));
    }
    return sum;
}

}  // namespace detail

inline double sequence_loglik(const FrequencyTree& tree, std::span<const Symbol> seq, int order) {
    if (order < 1) throw DomainError("sequence_loglik needs order >= 1");
    if (seq.size() <= static_cast<std::size_t>(order))
        throw DomainError("sequence shorter than order + 1");
    if (tree.max_depth() > 0 && order + 1 > tree.max_depth())
        throw DomainError("tree too shallow for order " + std::to_string(order));
    return detail::loglik_from(tree, seq, order, static_cast<std::size_t>(order));
}

struct CriterionRow {
    int order = 0;
    double loglik = 0.0;       // nats
    long long n_params = 0;
    long long n_evaluated = 0;  // N in the penalties
    double mdl = 0.0;
    double aic = 0.0;
    double aicc = 0.0;
};

struct CriterionReport {
    int m_u = 0;
    std::vector<CriterionRow> rows;
    int chosen_mdl = 1;
    int chosen_aic = 1;
    int chosen_aicc = 1;

    int chosen(Criterion c) const {
        switch (c) {
            case Criterion::kMdl: return chosen_mdl;
            case Criterion::kAic: return chosen_aic;
            case Criterion::kAicc: return chosen_aicc;
        }
        return 1;
    }
};

// MDL, AIC and finite-sample-corrected AIC per candidate order. Orders with
// N <= n_params + 1 get an infinite AICc and are excluded from its argmin.
// Ties break toward the smaller order.
inline CriterionReport criteria(std::span<const double> loglik, std::span<const long long> nparams,
                                std::span<const long long> n_evaluated, int m_u = 0) {
    if (loglik.empty() || loglik.size() != nparams.size() || loglik.size() != n_evaluated.size())
        throw DomainError("criteria: mismatched or empty inputs");

    CriterionReport report;
    report.m_u = m_u;
    for (std::size_t i = 0; i < loglik.size(); ++i) {
        CriterionRow row;
        row.order = static_cast<int>(i) + 1;
        row.loglik = loglik[i];
        row.n_params = nparams[i];
        row.n_evaluated = n_evaluated[i];
        if (row.n_evaluated <= 0) throw DomainError("criteria: N must be positive");
        const double n_i = double(row.n_params);
        const double N = double(row.n_evaluated);
        row.mdl = -row.loglik + n_i / 2.0 * std::log(N);
        row.aic = -2.0 * row.loglik + 2.0 * n_i;
        row.aicc = (row.n_evaluated > row.n_params + 1)
                       ? row.aic + 2.0 * n_i * (n_i - 1.0) / (N - n_i - 1.0)
                       : std::numeric_limits<double>::infinity();
        report.rows.push_back(row);
    }

    auto argmin = [&report](double CriterionRow::* field) {
        int best = report.rows.front().order;
        double best_value = report.rows.front().*field;
        for (const CriterionRow& row : report.rows)
            if (row.*field < best_value) {
                best_value = row.*field;
                best = row.order;
            }
        return best;
    };
    report.chosen_mdl = argmin(&CriterionRow::mdl);
    report.chosen_aic = argmin(&CriterionRow::aic);
    report.chosen_aicc = argmin(&CriterionRow::aicc);
    return report;
}

// Full report for candidate orders 1..k_max on one sequence. Orders the
// sequence is too short to evaluate are dropped. A candidate conditioning on
// i past symbols estimates one (m_u - 1)-probability row per i-symbol
// context, so its penalty uses n_params(m_u, i + 1) parameters.
inline CriterionReport order_report(const FrequencyTree& tree, std::span<const Symbol> seq,
                                    int k_max, LoglikSpan span_mode = LoglikSpan::kPerOrder) {
    if (k_max < 1) throw DomainError("order_report needs k_max >= 1");
    const auto [m_u, symbols] = observed_alphabet(tree);

    std::vector<double> logliks;
    std::vector<long long> nparams;
    std::vector<long long> n_eval;
    for (int i = 1; i <= k_max; ++i) {
        if (seq.size() <= static_cast<std::size_t>(i)) break;
        const std::size_t first = span_mode == LoglikSpan::kCommonStart
                                      ? static_cast<std::size_t>(k_max)
                                      : static_cast<std::size_t>(i);
        if (seq.size() <= first) break;
        logliks.push_back(detail::loglik_from(tree, seq, i, first));
        nparams.push_back(n_params(m_u, i + 1));
        n_eval.push_back(static_cast<long long>(seq.size() - first));
    }
    if (logliks.empty()) throw DomainError("sequence too short for any candidate order");
    return criteria(logliks, nparams, n_eval, m_u);
}

// Minimizing order under the given criterion, bounded above by k_max.
inline int select_order(std::span<const Symbol> seq, const FrequencyTree& tree, int k_max,
                        Criterion criterion = Criterion::kAicc,
                        LoglikSpan span_mode = LoglikSpan::kPerOrder) {
    return order_report(tree, seq, k_max, span_mode).chosen(criterion);
}

}  // namespace mcspred
