#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "mcspred/types.hpp"

namespace mcspred {

struct UserMetrics {
    double p_loss = 0.0;
    double r_eff = 0.0;
    long long packets = 0;
};

// Fraction of packets lost: a packet is lost exactly when the predicted MCS
// exceeds the actual one.
inline double packet_loss(std::span<const Symbol> actual, std::span<const Symbol> predicted) {
    if (actual.size() != predicted.size()) throw DomainError("packet_loss: length mismatch");
    if (actual.empty()) throw DomainError("packet_loss: empty input");
    long long lost = 0;
    for (std::size_t i = 0; i < actual.size(); ++i)
        if (predicted[i] > actual[i]) ++lost;
    return double(lost) / double(actual.size());
}

// Delivered rate over the rate an ideal predictor would have achieved. Lost
// packets (over-predictions) deliver nothing, so the ratio lives in [0, 1].
inline double rate_efficiency(std::span<const Symbol> actual, std::span<const Symbol> predicted,
                              const RateTable& rates) {
    if (actual.size() != predicted.size()) throw DomainError("rate_efficiency: length mismatch");
    if (actual.empty()) throw DomainError("rate_efficiency: empty input");
    double achieved = 0.0;
    double ideal = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        ideal += rates.rate(actual[i]);
        if (predicted[i] <= actual[i]) achieved += rates.rate(predicted[i]);
    }
    if (ideal <= 0.0) throw DomainError("rate_efficiency: ideal rate is zero");
    return achieved / ideal;
}

inline UserMetrics user_metrics(std::span<const Symbol> actual, std::span<const Symbol> predicted,
                                const RateTable& rates) {
    return {packet_loss(actual, predicted), rate_efficiency(actual, predicted, rates),
            static_cast<long long>(actual.size())};
}

// Empirical CDF: sorted values with step heights k/n.
inline std::vector<std::pair<double, double>> cdf(std::span<const double> values) {
    if (values.empty()) throw DomainError("cdf of empty sample");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::pair<double, double>> steps;
    steps.reserve(sorted.size());
    for (std::size_t k = 0; k < sorted.size(); ++k)
        steps.emplace_back(sorted[k], double(k + 1) / double(sorted.size()));
    return steps;
}

// Smallest sample value whose empirical CDF reaches q.
inline double percentile(std::span<const double> values, double q) {
    if (values.empty()) throw DomainError("percentile of empty sample");
    if (q <= 0.0 || q > 1.0) throw DomainError("percentile needs q in (0, 1]");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t rank = static_cast<std::size_t>(std::ceil(q * double(sorted.size())));
    return sorted[std::max<std::size_t>(rank, 1) - 1];
}

}  // namespace mcspred
