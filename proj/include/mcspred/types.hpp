#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcspred {

// MCS index. Symbols of an alphabet of size p are the integers 0..p-1.
using Symbol = int;

// Malformed input file; the message names the offending line.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Value outside a documented domain (bad symbol, bad configuration, ...).
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Alphabet {
    int size = 28;

    explicit Alphabet(int p = 28) : size(p) {
        if (p < 2) throw DomainError("alphabet size must be >= 2, got " + std::to_string(p));
    }
    bool contains(Symbol s) const { return s >= 0 && s < size; }
};

// Spectral efficiency (bits/symbol) per MCS index, strictly increasing.
class RateTable {
public:
    explicit RateTable(std::vector<double> rates) : rate_(std::move(rates)) {
        if (rate_.size() < 2) throw DomainError("rate table needs at least two entries");
        for (std::size_t i = 0; i < rate_.size(); ++i) {
            if (rate_[i] <= 0.0) throw DomainError("rates must be positive");
            if (i > 0 && rate_[i] <= rate_[i - 1])
                throw DomainError("rates must be strictly increasing in MCS index");
        }
    }

    double rate(Symbol s) const {
        if (s < 0 || s >= static_cast<Symbol>(rate_.size()))
            throw DomainError("rate lookup outside alphabet: " + std::to_string(s));
        return rate_[static_cast<std::size_t>(s)];
    }
    int size() const { return static_cast<int>(rate_.size()); }

private:
    std::vector<double> rate_;
};

// Endpoints are the LTE efficiency extremes (QPSK 0.076 code rate up to
// 64-QAM 0.93); intermediate indices interpolate uniformly in the log domain.
inline RateTable default_rate_table(int p) {
    if (p < 2) throw DomainError("rate table needs p >= 2");
    constexpr double kLowest = 0.1523;
    constexpr double kHighest = 5.5547;
    std::vector<double> r(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i)
        r[static_cast<std::size_t>(i)] = kLowest * std::pow(kHighest / kLowest, double(i) / double(p - 1));
    r.front() = kLowest;
    r.back() = kHighest;
    return RateTable(std::move(r));
}

struct TraceSample {
    long long t = 0;  // feedback index, one per feedback period
    Symbol x = 0;
};

// One user's MCS feedback sequence at feedback granularity.
struct Trace {
    std::string user_id;
    std::vector<TraceSample> samples;
    int delta = 5;  // feedback period in subframes

    std::vector<Symbol> symbols() const {
        std::vector<Symbol> out;
        out.reserve(samples.size());
        for (const TraceSample& s : samples) out.push_back(s.x);
        return out;
    }
};

}  // namespace mcspred
