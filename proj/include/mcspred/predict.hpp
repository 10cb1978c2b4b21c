#pragma once

#include <algorithm>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mcspred/blend.hpp"
#include "mcspred/complexity.hpp"
#include "mcspred/freq_tree.hpp"
#include "mcspred/order_select.hpp"
#include "mcspred/types.hpp"

namespace mcspred {

// VO predictors re-select their order online; FM predictors use a fixed
// order-3 model (depth-4 tree reads). Median and no-prediction are the
// reference baselines.
enum class PredictorKind { kVoMap, kVoBrm, kFmMap, kFmBrm, kMedian, kNoPrediction };

constexpr int kFixedMarkovOrder = 3;

inline const char* predictor_name(PredictorKind k) {
    switch (k) {
        case PredictorKind::kVoMap: return "vo_map";
        case PredictorKind::kVoBrm: return "vo_brm";
        case PredictorKind::kFmMap: return "fm_map";
        case PredictorKind::kFmBrm: return "fm_brm";
        case PredictorKind::kMedian: return "median";
        case PredictorKind::kNoPrediction: return "no_prediction";
    }
    return "?";
}

inline bool parse_predictor(const std::string& name, PredictorKind& out) {
    for (PredictorKind k : {PredictorKind::kVoMap, PredictorKind::kVoBrm, PredictorKind::kFmMap,
                            PredictorKind::kFmBrm, PredictorKind::kMedian,
                            PredictorKind::kNoPrediction}) {
        if (name == predictor_name(k)) {
            out = k;
            return true;
        }
    }
    return false;
}

inline bool uses_tree(PredictorKind k) {
    return k == PredictorKind::kVoMap || k == PredictorKind::kVoBrm ||
           k == PredictorKind::kFmMap || k == PredictorKind::kFmBrm;
}
inline bool variable_order(PredictorKind k) {
    return k == PredictorKind::kVoMap || k == PredictorKind::kVoBrm;
}
inline bool risk_based(PredictorKind k) {
    return k == PredictorKind::kVoBrm || k == PredictorKind::kFmBrm;
}

// Argmax of the estimated distribution; ties break toward the lower symbol
// (the lower rate never adds packet loss).
inline Symbol map_decision(std::span<const double> probs) {
    if (probs.empty()) throw DomainError("map_decision on empty distribution");
    Symbol best = 0;
    for (Symbol s = 1; s < static_cast<Symbol>(probs.size()); ++s)
        if (probs[static_cast<std::size_t>(s)] > probs[static_cast<std::size_t>(best)]) best = s;
    return best;
}

// Expected cost of transmitting at rate index j: an over-prediction forfeits
// the whole true rate, an under- or exact prediction forfeits the rate gap.
inline double brm_expected_cost(std::span<const double> probs, const RateTable& rates, Symbol j) {
    const double r_j = rates.rate(j);
    double cost = 0.0;
    for (Symbol i = 0; i < static_cast<Symbol>(probs.size()); ++i) {
        const double p = probs[static_cast<std::size_t>(i)];
        if (p <= 0.0) continue;
        const double r_i = rates.rate(i);
        cost += p * (r_i < r_j ? r_i : r_i - r_j);
    }
    return cost;
}

// Argmin expected cost over the whole alphabet; ties toward the lower symbol.
inline Symbol brm_decision(std::span<const double> probs, const RateTable& rates) {
    if (probs.empty()) throw DomainError("brm_decision on empty distribution");
    Symbol best = 0;
    double best_cost = brm_expected_cost(probs, rates, 0);
    for (Symbol j = 1; j < static_cast<Symbol>(probs.size()); ++j) {
        const double cost = brm_expected_cost(probs, rates, j);
        if (cost < best_cost) {
            best_cost = cost;
            best = j;
        }
    }
    return best;
}

inline Symbol predict_map(const FrequencyTree& tree, std::span<const Symbol> context,
                          int alphabet_size) {
    return map_decision(blended_distribution(tree, context, alphabet_size));
}

inline Symbol predict_brm(const FrequencyTree& tree, std::span<const Symbol> context,
                          int alphabet_size, const RateTable& rates) {
    return brm_decision(blended_distribution(tree, context, alphabet_size), rates);
}

// Median of the last min(window, available) values; an even count takes the
// lower middle so the result stays in the alphabet.
inline Symbol predict_median(std::span<const Symbol> history, int window) {
    if (history.empty()) throw DomainError("predict_median needs history");
    if (window < 1) throw DomainError("median window must be >= 1");
    const std::size_t take = std::min(history.size(), static_cast<std::size_t>(window));
    std::vector<Symbol> recent(history.end() - static_cast<std::ptrdiff_t>(take), history.end());
    std::sort(recent.begin(), recent.end());
    return recent[(recent.size() - 1) / 2];
}

inline Symbol predict_last(std::span<const Symbol> history) {
    if (history.empty()) throw DomainError("predict_last needs history");
    return history.back();
}

struct PipelineConfig {
    int tree_depth = 5;        // m
    int max_order = 4;         // K, candidate orders 1..K
    double epsilon = 0.05;     // learning-curve stopping threshold, bits
    Criterion criterion = Criterion::kAicc;
    LoglikSpan loglik_span = LoglikSpan::kPerOrder;
    int recompute_period = 100;
    int bootstrap_len = 100;
    int median_window = 9;

    void validate() const {
        if (tree_depth < 2) throw DomainError("tree depth must be >= 2");
        if (max_order < 1) throw DomainError("max order must be >= 1");
        if (tree_depth < max_order + 1)
            throw DomainError("tree depth must be >= max order + 1 (blending reads depth k+1)");
        if (epsilon <= 0.0) throw DomainError("epsilon must be positive");
        if (recompute_period < 1) throw DomainError("recompute period must be >= 1");
        if (bootstrap_len < 1) throw DomainError("bootstrap length must be >= 1");
        if (median_window < 1) throw DomainError("median window must be >= 1");
    }
};

struct StepResult {
    Symbol predicted = 0;
    bool cold = false;   // no history yet; excluded from metrics
    int order_used = 0;  // 0 for cold and for non-tree predictors
};

// Emitted before each tree-based prediction once history exists; lets tests
// and diagnostics audit the estimated distribution and both decision rules.
struct StepObservation {
    long long position;               // 1-based position being predicted
    std::span<const double> probs;
    Symbol map_choice;
    Symbol brm_choice;
};

// Per-user online state. Each incoming symbol is predicted from prior
// symbols only, then ingested. VO pipelines run order 1 until the first
// scheduled re-selection; afterwards blending is read only to depth
// (selected order + 1), which virtually truncates the tree.
class UserPipeline {
public:
    UserPipeline(PredictorKind kind, const Alphabet& alphabet, RateTable rates,
                 PipelineConfig config = {})
        : kind_(kind),
          alphabet_(alphabet),
          rates_(std::move(rates)),
          config_(config),
          tree_(config.tree_depth),
          estimate_(config.max_order, alphabet.size) {
        config_.validate();
        if (rates_.size() != alphabet_.size)
            throw DomainError("rate table size does not match alphabet");
    }

    StepResult step(Symbol x_new) {
        if (!alphabet_.contains(x_new))
            throw DomainError("symbol " + std::to_string(x_new) + " outside alphabet");

        StepResult result;
        const long long n = static_cast<long long>(history_.size());
        if (n == 0) {
            result = {0, true, 0};
        } else {
            switch (kind_) {
                case PredictorKind::kNoPrediction:
                    result = {predict_last(history_), false, 0};
                    break;
                case PredictorKind::kMedian:
                    result = {predict_median(history_, config_.median_window), false, 0};
                    break;
                default: {
                    const int wanted = variable_order(kind_) ? current_order_ : kFixedMarkovOrder;
                    const int order = static_cast<int>(
                        std::min<long long>({wanted, n, config_.tree_depth - 1}));
                    const auto context = std::span<const Symbol>(history_).last(
                        static_cast<std::size_t>(order));
                    const std::vector<double> dist =
                        blended_distribution(tree_, context, alphabet_.size);
                    const Symbol map_pick = map_decision(dist);
                    const Symbol brm_pick = brm_decision(dist, rates_);
                    if (observer) observer({n + 1, dist, map_pick, brm_pick});
                    result = {risk_based(kind_) ? brm_pick : map_pick, false, order};
                }
            }
        }

        history_.push_back(x_new);
        if (uses_tree(kind_)) ppm_ingest(tree_, history_);
        if (variable_order(kind_)) {
            ipred_update(estimate_, tree_, history_);
            const long long count = static_cast<long long>(history_.size());
            if (count >= config_.bootstrap_len && count % config_.recompute_period == 0) {
                k_opt_bound_ = k_opt(estimate_, config_.epsilon);
                current_order_ =
                    select_order(history_, tree_, k_opt_bound_, config_.criterion,
                                 config_.loglik_span);
            }
        }
        return result;
    }

    const FrequencyTree& tree() const { return tree_; }
    const PredictiveInfoEstimate& estimate() const { return estimate_; }
    const std::vector<Symbol>& history() const { return history_; }
    int current_order() const { return current_order_; }
    int k_opt_bound() const { return k_opt_bound_; }
    PredictorKind kind() const { return kind_; }
    const PipelineConfig& config() const { return config_; }

    std::function<void(const StepObservation&)> observer;

private:
    PredictorKind kind_;
    Alphabet alphabet_;
    RateTable rates_;
    PipelineConfig config_;
    FrequencyTree tree_;
    PredictiveInfoEstimate estimate_;
    std::vector<Symbol> history_;
    int current_order_ = 1;
    int k_opt_bound_ = 1;
};

}  // namespace mcspred
